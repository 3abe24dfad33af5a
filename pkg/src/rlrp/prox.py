"""Proximal and thresholding maps.

All maps are elementwise except the nuclear-norm ones, which act on the
last two axes and broadcast over leading (channel) axes.
"""
import math
from collections import namedtuple

import numpy as np

from .core import SvdFailure

SvdFactors = namedtuple("SvdFactors", ["u_factor", "singular_values", "v_factor"])


def shrink(a, t):
    """Soft threshold ``sign(a) * max(|a| - t, 0)``."""
    a = np.asarray(a, dtype=np.float64)
    return np.sign(a) * np.maximum(np.abs(a) - t, 0.0)


def clip(a, t):
    """Projection onto the infinity-ball of radius `t`."""
    a = np.asarray(a, dtype=np.float64)
    return np.sign(a) * np.minimum(np.abs(a), t)


def magnitude(field):
    """Per-pixel Euclidean norm of a gradient field (axis 0)."""
    return np.sqrt(np.sum(np.square(field), axis=0))


def shrink_iso(field, t):
    """Isotropic soft threshold of a gradient field.

    Each per-pixel 2-vector has its length reduced by `t` (floored at zero)
    with the direction kept.
    """
    field = np.asarray(field, dtype=np.float64)
    mag = magnitude(field)
    scale = np.maximum(mag - t, 0.0) / np.where(mag > 0, mag, 1.0)
    return field * scale


def clip_iso(field, t):
    """Projection of every per-pixel 2-vector onto the Euclidean ball of radius `t`."""
    field = np.asarray(field, dtype=np.float64)
    mag = magnitude(field)
    return field * (t / np.maximum(t, mag))


def tv_shrink(field, t, isotropic=True):
    return shrink_iso(field, t) if isotropic else shrink(field, t)


def tv_clip(field, t, isotropic=True):
    return clip_iso(field, t) if isotropic else clip(field, t)


def svd_factors(X):
    """Thin SVD of the last two axes of `X`."""
    try:
        U, s, Vt = np.linalg.svd(np.asarray(X, dtype=np.float64), full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
    return SvdFactors(U, s, np.swapaxes(Vt, -1, -2))


def numeric_rank(X, rtol=1e-12):
    """Number of singular values above ``rtol * sigma_max`` (per matrix)."""
    s = svd_factors(X).singular_values
    smax = s[..., :1]
    return np.sum(s > rtol * smax, axis=-1)


def svt(X, t):
    """Singular value thresholding: the prox of ``t * ||.||_*``.

    Parameters
    ----------
    X : ndarray, shape (..., m, n)
    t : float
        Nonnegative threshold.
    """
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    U, s, V = svd_factors(X)
    s = np.maximum(s - t, 0.0)
    return np.matmul(U * s[..., None, :], np.swapaxes(V, -1, -2))


def nuclear_norm(X):
    """Sum of singular values, summed over any leading axes."""
    try:
        s = np.linalg.svd(np.asarray(X, dtype=np.float64), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
    return float(np.sum(s))


def huber_value(x, c):
    """Summed Huber loss; quadratic for ``|x| <= c`` and linear beyond.

    ``c = inf`` gives exactly ``0.5 * sum(x**2)``.
    """
    x = np.asarray(x, dtype=np.float64)
    if math.isinf(c):
        return float(0.5 * np.sum(x * x))
    ax = np.abs(x)
    return float(np.sum(np.where(ax <= c, 0.5 * x * x, c * ax - 0.5 * c * c)))


def huber_grad(x, c):
    x = np.asarray(x, dtype=np.float64)
    if math.isinf(c):
        return x.copy()
    return np.clip(x, -c, c)


def huber_prox(a, beta, c):
    """Elementwise ``argmin_z rho_c(z) + (z - a)**2 / (2 beta)``.

    The quadratic branch ``a / (1 + beta)`` is valid while its result stays
    inside ``[-c, c]``, i.e. for ``|a| <= c (1 + beta)``; past that the
    linear branch shifts `a` towards zero by ``c * beta``.
    """
    a = np.asarray(a, dtype=np.float64)
    if np.ndim(c) == 0 and math.isinf(c):
        return a / (1.0 + beta)
    inner = np.abs(a) <= c * (1.0 + beta)
    with np.errstate(invalid="ignore"):
        return np.where(inner, a / (1.0 + beta), a - c * beta * np.sign(a))


def huber_conj_prox(a, sigma, c):
    """Prox of ``sigma * rho_c^*``; the result always lies in ``[-c, c]``."""
    a = np.asarray(a, dtype=np.float64)
    if np.ndim(c) == 0 and math.isinf(c):
        return a / (1.0 + sigma)
    with np.errstate(invalid="ignore"):
        return np.where(np.abs(a) <= (1.0 + sigma) * c, a / (1.0 + sigma), c * np.sign(a))


def huber_conj_value(x, c):
    """``rho_c^*``: ``0.5 * sum(x**2)`` on ``|x| <= c``, ``inf`` outside."""
    x = np.asarray(x, dtype=np.float64)
    if not math.isinf(c) and np.any(np.abs(x) > c * (1 + 1e-12)):
        return math.inf
    return float(0.5 * np.sum(x * x))
