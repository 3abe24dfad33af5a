"""Image quality metrics, the stopping tolerance and the model objective."""
import math
from dataclasses import astuple, dataclass

import numpy as np
from scipy import ndimage

from .core import ShapeMismatch, TooSmall, ZeroReference, check_same_shape
from .linops import Identity, grad
from .prox import huber_value, magnitude, nuclear_norm

CSV_COLUMNS = ("image", "method", "phi", "noise", "seed", "snr_db", "ssim", "iterations", "time_s")

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def snr(reference, estimate):
    """``20 log10(||b|| / ||estimate - b||)`` in dB over the whole array.

    Returns ``math.inf`` when `estimate` equals `reference` exactly.
    """
    reference = np.asarray(reference, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    check_same_shape(reference, estimate, "reference and estimate")
    ref_norm = np.linalg.norm(reference)
    if ref_norm == 0:
        raise ZeroReference("reference image has zero norm")
    err = np.linalg.norm(estimate - reference)
    if err == 0:
        return math.inf
    return float(20.0 * np.log10(ref_norm / err))


def _gaussian_window():
    ax = np.arange(SSIM_WINDOW) - SSIM_WINDOW // 2
    g = np.exp(-(ax ** 2) / (2 * SSIM_SIGMA ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def _ssim_channel(x, y, data_range):
    win = _gaussian_window()
    pad = SSIM_WINDOW // 2

    def filt(a):
        return ndimage.correlate(a, win, mode="reflect")[pad:-pad, pad:-pad]

    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    mx, my = filt(x), filt(y)
    sxx = filt(x * x) - mx * mx
    syy = filt(y * y) - my * my
    sxy = filt(x * y) - mx * my
    num = (2 * mx * my + c1) * (2 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def ssim(reference, estimate, data_range=1.0):
    """Structural similarity with an 11x11 Gaussian window (sigma 1.5).

    Uses K1 = 0.01, K2 = 0.03, the mean over all fully-contained windows,
    and the mean over channels for multi-channel images.
    """
    reference = np.asarray(reference, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    check_same_shape(reference, estimate, "reference and estimate")
    if min(reference.shape[-2:]) < SSIM_WINDOW:
        raise TooSmall(f"ssim needs both spatial sides >= {SSIM_WINDOW}, got {reference.shape}")
    if np.array_equal(reference, estimate):
        return 1.0
    ref = reference.reshape((-1,) + reference.shape[-2:])
    est = estimate.reshape((-1,) + estimate.shape[-2:])
    return float(np.mean([_ssim_channel(a, b, data_range) for a, b in zip(ref, est)]))


def tol(prev_u, prev_v, cur_u, cur_v):
    """Relative change used as the stopping criterion of both solvers."""
    check_same_shape(prev_u, cur_u, "u iterates")
    check_same_shape(prev_v, cur_v, "v iterates")
    du = np.linalg.norm(np.asarray(cur_u) - prev_u) / (np.linalg.norm(prev_u) + 1.0)
    dv = np.linalg.norm(np.asarray(cur_v) - prev_v) / (np.linalg.norm(prev_v) + 1.0)
    return float(max(du, dv))


def tv_norm(u):
    """Isotropic total variation: sum of per-pixel gradient magnitudes."""
    return float(np.sum(magnitude(grad(u))))


def objective(u, v, b0, phi=None, cfg=None, *, tau=None, mu=None, c=None):
    """``tau * TV(u) + mu * ||v||_* + rho_c(phi(u + v) - b0)``.

    Weights come from `cfg` unless given explicitly. Nuclear norms are taken
    per channel and summed.
    """
    if cfg is not None:
        tau = cfg.tau if tau is None else tau
        mu = cfg.mu if mu is None else mu
        c = cfg.c if c is None else c
    phi = Identity() if phi is None else phi
    check_same_shape(u, v, "u and v")
    check_same_shape(u, b0, "u and b0")
    phi = phi.materialize(np.shape(b0))
    resid = phi.apply(np.asarray(u) + v) - b0
    return float(tau * tv_norm(u) + mu * nuclear_norm(v) + huber_value(resid, c))


@dataclass
class MetricReport:
    """One CSV row of benchmark output."""

    image: str
    method: str
    phi: str
    noise: str
    seed: int
    snr_db: float
    ssim: float
    iterations: int
    time_s: float

    def row(self):
        return [format_value(x) for x in astuple(self)]


def format_value(x):
    """CSV cell text; infinities become ``inf``/``-inf``."""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return repr(round(x, 12))
    return str(x)


def report(reference, estimate, *, image, method, phi, noise, seed, iterations, time_s):
    if np.shape(reference) != np.shape(estimate):
        raise ShapeMismatch("reference and estimate differ in shape")
    try:
        s = ssim(reference, estimate)
    except TooSmall:
        s = math.nan
    return MetricReport(image, method, phi, noise, int(seed), snr(reference, estimate), s,
                        int(iterations), float(time_s))
