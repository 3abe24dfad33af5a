"""Periodic finite differences, degradation operators and the stacked operator.

Every operator uses periodic boundary conditions so that the gradient Gram
matrix and the blur are diagonalized by the 2-D DFT.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ShapeMismatch


def grad(img):
    """Forward differences with periodic wrap.

    Returns an array of shape ``(2,) + img.shape``: ``[dx, dy]`` with
    ``dx[..., i, j] = img[..., i, j+1] - img[..., i, j]`` and
    ``dy[..., i, j] = img[..., i+1, j] - img[..., i, j]`` (indices mod size).
    """
    img = np.asarray(img, dtype=np.float64)
    dx = np.roll(img, -1, axis=-1) - img
    dy = np.roll(img, -1, axis=-2) - img
    return np.stack([dx, dy])


def grad_adjoint(field):
    """Adjoint of :func:`grad` (the negative periodic divergence)."""
    field = np.asarray(field, dtype=np.float64)
    dx, dy = field[0], field[1]
    return (np.roll(dx, 1, axis=-1) - dx) + (np.roll(dy, 1, axis=-2) - dy)


def laplacian_eigenvalues(h, w):
    """Eigenvalues of ``grad_adjoint(grad(.))`` on the ``(h, w)`` DFT grid."""
    p = np.arange(h)[:, None]
    q = np.arange(w)[None, :]
    return 4.0 * np.sin(np.pi * p / h) ** 2 + 4.0 * np.sin(np.pi * q / w) ** 2


def solve_grad_gram_plus_identity(rhs):
    """Solve ``(grad^T grad + I) u = rhs`` exactly via the 2-D FFT."""
    rhs = np.asarray(rhs, dtype=np.float64)
    h, w = rhs.shape[-2:]
    denom = 1.0 + laplacian_eigenvalues(h, w)[:, : w // 2 + 1]
    return np.fft.irfft2(np.fft.rfft2(rhs) / denom, s=(h, w))


# ---------------------------------------------------------------- degradations


class Identity:
    kind = "identity"

    def apply(self, x):
        return np.asarray(x, dtype=np.float64)

    apply_adjoint = apply

    def materialize(self, shape):
        return self

    def __eq__(self, other):
        return isinstance(other, Identity)

    def __repr__(self):
        return "Identity()"


class Mask:
    """Pointwise multiplication by a fixed binary mask (self-adjoint)."""

    kind = "mask"

    def __init__(self, mask):
        mask = np.asarray(mask, dtype=np.float64)
        if not np.all((mask == 0) | (mask == 1)):
            raise ValueError("mask entries must be exactly 0 or 1")
        self.mask = mask
        self.mask.setflags(write=False)

    def _check(self, x):
        if np.shape(x)[-self.mask.ndim:] != self.mask.shape:
            raise ShapeMismatch(f"mask shape {self.mask.shape} incompatible with {np.shape(x)}")

    def apply(self, x):
        x = np.asarray(x, dtype=np.float64)
        self._check(x)
        return x * self.mask

    apply_adjoint = apply

    def materialize(self, shape):
        return self

    @property
    def keep_fraction(self):
        return float(self.mask.mean())

    def __repr__(self):
        return f"Mask(shape={self.mask.shape}, kept={self.keep_fraction:.3f})"


class Downsample:
    """Random down-sampling: keep each pixel with probability `keep_probability`.

    The operator only becomes concrete through :meth:`materialize`, which
    draws a fixed binary mask from `seed`; the same seed and shape always
    give the same mask.
    """

    kind = "downsample"

    def __init__(self, keep_probability, seed=0):
        if not (0.0 < keep_probability <= 1.0):
            raise ValueError(f"keep_probability must be in (0, 1], got {keep_probability}")
        self.keep_probability = float(keep_probability)
        self.seed = int(seed)

    def materialize(self, shape):
        rng = np.random.default_rng(self.seed)
        return Mask((rng.random(shape) < self.keep_probability).astype(np.float64))

    def apply(self, x):
        return self.materialize(np.shape(x)).apply(x)

    apply_adjoint = apply

    def __repr__(self):
        return f"Downsample(keep_probability={self.keep_probability}, seed={self.seed})"


class Blur:
    """Circular convolution with a small kernel normalized to unit sum.

    The kernel is anchored at ``(kh // 2, kw // 2)``; the adjoint is the
    circular convolution with the 180-degree rotated kernel.
    """

    kind = "blur"

    def __init__(self, kernel):
        kernel = np.atleast_2d(np.asarray(kernel, dtype=np.float64))
        total = kernel.sum()
        if total == 0:
            raise ValueError("blur kernel must have nonzero sum")
        self.kernel = kernel / total
        self._otf = {}

    @classmethod
    def average(cls, size=4):
        return cls(np.ones((size, size)))

    def otf(self, h, w):
        key = (h, w)
        if key not in self._otf:
            kh, kw = self.kernel.shape
            if kh > h or kw > w:
                raise ShapeMismatch(f"kernel {self.kernel.shape} larger than image {(h, w)}")
            psf = np.zeros((h, w))
            psf[:kh, :kw] = self.kernel
            psf = np.roll(psf, (-(kh // 2), -(kw // 2)), axis=(0, 1))
            self._otf[key] = np.fft.rfft2(psf)
        return self._otf[key]

    def _convolve(self, x, conj):
        x = np.asarray(x, dtype=np.float64)
        h, w = x.shape[-2:]
        H = self.otf(h, w)
        if conj:
            H = np.conj(H)
        return np.fft.irfft2(np.fft.rfft2(x) * H, s=(h, w))

    def apply(self, x):
        return self._convolve(x, conj=False)

    def apply_adjoint(self, x):
        return self._convolve(x, conj=True)

    def materialize(self, shape):
        return self

    def __repr__(self):
        return f"Blur(kernel_shape={self.kernel.shape})"


def describe(phi):
    """Short label used in CSV output."""
    if isinstance(phi, Downsample):
        return f"downsample:{phi.keep_probability:g}:{phi.seed}"
    if isinstance(phi, Blur):
        return "blur:{}x{}".format(*phi.kernel.shape)
    if isinstance(phi, Mask):
        return f"mask:{phi.keep_fraction:.3f}"
    return "identity"


# ------------------------------------------------------------ stacked operator


@dataclass
class StackedOperator:
    """``K (u, v) = (grad u, phi(u + v))`` and its adjoint."""

    phi: object
    shape: tuple

    def __post_init__(self):
        self.phi = self.phi.materialize(tuple(self.shape))

    def apply(self, u, v):
        return grad(u), self.phi.apply(u + v)

    def apply_adjoint(self, field, img):
        back = self.phi.apply_adjoint(img)
        return grad_adjoint(field) + back, back


def estimate_norm_sq(K, iters=50, seed=0):
    """Power iteration on ``K^T K``; returns the largest Rayleigh quotient seen.

    The value approaches ``||K||**2`` from below and cannot decrease as
    `iters` grows.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(K.shape)
    v = rng.standard_normal(K.shape)
    best = 0.0
    for _ in range(iters):
        n = np.sqrt(np.sum(u * u) + np.sum(v * v))
        if n == 0:
            break
        u, v = u / n, v / n
        f, g = K.apply(u, v)
        best = max(best, float(np.sum(f * f) + np.sum(g * g)))
        u, v = K.apply_adjoint(f, g)
    return best
