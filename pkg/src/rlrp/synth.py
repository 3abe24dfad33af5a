"""Synthetic ground truth with a known cartoon/texture split."""
from dataclasses import dataclass

import numpy as np

from .core import ShapeMismatch


@dataclass(frozen=True)
class GroundTruth:
    cartoon: np.ndarray
    texture: np.ndarray
    composite: np.ndarray
    weights: tuple
    rank: int = 0
    regions: int = 0
    seed: int = 0


def make_cartoon(h, w, regions=4, seed=0, channels=1):
    """Piecewise-constant image: ``regions - 1`` rectangles or discs on a background.

    Every region has one gray level, so the image has at most `regions`
    distinct values. ``regions=1`` is a constant image.
    """
    if regions < 1:
        raise ValueError("regions must be >= 1")
    rng = np.random.default_rng(seed)
    levels = rng.uniform(0.1, 0.9, size=(regions, channels))
    img = np.empty((channels, h, w))
    img[:] = levels[0][:, None, None]
    yy, xx = np.mgrid[:h, :w]
    for lvl in levels[1:]:
        cy, cx = rng.uniform(0.2, 0.8) * h, rng.uniform(0.2, 0.8) * w
        ry, rx = rng.uniform(0.12, 0.3) * h, rng.uniform(0.12, 0.3) * w
        if rng.random() < 0.5:
            inside = (np.abs(yy - cy) <= ry) & (np.abs(xx - cx) <= rx)
        else:
            inside = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
        img[:, inside] = lvl[:, None]
    return img[0] if channels == 1 else img


def outer_profiles(row_profiles, col_profiles):
    """``sum_k outer(row_profiles[k], col_profiles[k])``."""
    return np.einsum("ki,kj->ij", np.atleast_2d(row_profiles), np.atleast_2d(col_profiles))


def rescale_unit(x):
    """Affine map onto [0, 1]; a constant input maps to zeros."""
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def sinusoid_profiles(h, w, rank, rng):
    ys, xs = np.arange(h), np.arange(w)
    rows, cols = [], []
    for _ in range(rank):
        fy = rng.integers(2, max(3, h // 4) + 1)
        fx = rng.integers(2, max(3, w // 4) + 1)
        rows.append(np.cos(2 * np.pi * fy * ys / h + rng.uniform(0, 2 * np.pi)))
        cols.append(np.cos(2 * np.pi * fx * xs / w + rng.uniform(0, 2 * np.pi)))
    return np.array(rows), np.array(cols)


def make_texture(h, w, rank=2, seed=0, channels=1):
    """Oscillatory texture of low rank, rescaled to [0, 1].

    Each channel is a sum of `rank` outer products of periodic cosine
    profiles. The affine rescale adds a constant, so the numeric rank is at
    most ``rank + 1``.
    """
    if not 1 <= rank <= min(h, w):
        raise ValueError(f"rank must be in [1, {min(h, w)}]")
    rng = np.random.default_rng(seed)
    out = np.stack([rescale_unit(outer_profiles(*sinusoid_profiles(h, w, rank, rng)))
                    for _ in range(channels)])
    return out[0] if channels == 1 else out


def compose(cartoon, texture, w_cartoon=0.7, *, rank=0, regions=0, seed=0):
    """Blend ``w_cartoon * cartoon + (1 - w_cartoon) * texture``."""
    cartoon = np.asarray(cartoon, dtype=np.float64)
    texture = np.asarray(texture, dtype=np.float64)
    if cartoon.shape != texture.shape:
        raise ShapeMismatch(f"cartoon {cartoon.shape} and texture {texture.shape} differ")
    if not 0.0 < w_cartoon < 1.0:
        raise ValueError("w_cartoon must lie strictly between 0 and 1")
    wt = 1.0 - w_cartoon
    return GroundTruth(cartoon, texture, w_cartoon * cartoon + wt * texture,
                       (w_cartoon, wt), rank, regions, seed)


def make_ground_truth(size=64, rank=2, regions=4, seed=0, w_cartoon=0.7, channels=1):
    """Cartoon and texture drawn from independent streams of `seed`."""
    cartoon = make_cartoon(size, size, regions, seed, channels)
    texture = make_texture(size, size, rank, seed + 1_000_003, channels)
    return compose(cartoon, texture, w_cartoon, rank=rank, regions=regions, seed=seed)
