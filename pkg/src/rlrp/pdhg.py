"""First-order primal-dual solver for a general degradation operator.

The model is written as the saddle-point problem
``min_{u,v} max_{l1,l2} <grad u, l1> + <phi(u+v), l2> + mu*||v||_*
- (indicator(|l1| <= tau) + rho_c^*(l2) + <l2, b0>)``
and iterated with dual prox steps, primal prox steps and extrapolation.
"""
import logging
import math

import numpy as np

from .core import (PDHG, DecompResult, NumericalError, SolverConfig, TraceRecord, as_image,
                   check_step_condition, validate_config, NORM_SAFETY)
from .linops import Identity, StackedOperator, estimate_norm_sq, grad, grad_adjoint
from .metrics import objective, tol
from .prox import huber_conj_prox, huber_conj_value, magnitude, nuclear_norm, svt, tv_clip

log = logging.getLogger(__name__)

DEFAULT_STEPS = {"identity": 0.35, "mask": 0.35, "downsample": 0.4, "blur": 0.6}


def default_steps(phi, norm_sq):
    """Preset ``sigma = eta`` for `phi`, shrunk until the step condition holds."""
    base = DEFAULT_STEPS.get(getattr(phi, "kind", "identity"), 0.35)
    limit = 0.99 / math.sqrt(NORM_SAFETY * norm_sq) if norm_sq > 0 else base
    step = min(base, limit)
    return step, step


def dual_objective_terms(lam1, lam2, b0, cfg, isotropic=True):
    """``F^*(l1, l2)``; ``inf`` when ``l1`` leaves the tau-ball."""
    bound = magnitude(lam1) if isotropic else np.abs(lam1)
    if np.any(bound > cfg.tau * (1 + 1e-12)):
        return math.inf
    return huber_conj_value(lam2, cfg.c) + float(np.vdot(lam2, b0))


def pdhg_gap(u, v, lam1, lam2, b0, phi, cfg, isotropic=True):
    """Nonnegative primal-dual gap surrogate.

    The dual point is scored on the ball ``{||u'|| <= ||u||, ||v'||_* <= ||v||_*}``,
    which contains the primal point, so the value is a true restricted gap:

        P(u, v) + F^*(l) + ||u|| * ||g|| + ||v||_* * max(0, ||h||_2 - mu)

    with ``h = phi^T l2`` and ``g = grad^T l1 + h``. It vanishes at a saddle
    point; in floating point expect values around 1e-12 times the objective
    scale rather than exact zero.
    """
    phi = phi.materialize(np.shape(b0))
    h = phi.apply_adjoint(lam2)
    g = grad_adjoint(lam1) + h
    fstar = dual_objective_terms(lam1, lam2, b0, cfg, isotropic)
    spec = np.linalg.svd(h, compute_uv=False)[..., 0].max() if np.any(h) else 0.0
    value = (objective(u, v, b0, phi, cfg) + fstar
             + np.linalg.norm(u) * np.linalg.norm(g)
             + nuclear_norm(v) * max(0.0, spec - cfg.mu))
    return max(float(value), 0.0)


def pdhg_solve(b0, phi=None, cfg=None, *, record_gap=False, norm_iters=50, seed=0,
               isotropic=True, callback=None):
    """Decompose `b0` observed through `phi` into cartoon `u` and texture `v`.

    Parameters
    ----------
    b0 : ndarray, shape (H, W) or (C, H, W)
    phi : degradation operator, default Identity
    cfg : SolverConfig
        ``sigma``/``eta`` left unset are taken from the per-operator preset
        and shrunk jointly if needed; explicit values must satisfy
        ``sigma * eta * 1.05 * ||K||^2 < 1`` or a ConfigError is raised.
    record_gap : bool
        Record the gap surrogate at the iterate and at the ergodic average.
    norm_iters, seed : int
        Power iterations and seed for the ``||K||^2`` estimate.

    Returns
    -------
    DecompResult
        ``info`` carries the duals, the steps used and the norm estimate.
    """
    cfg = validate_config(cfg or SolverConfig(), PDHG)
    b0 = as_image(b0, "b0")
    K = StackedOperator(Identity() if phi is None else phi, b0.shape)
    phi = K.phi
    norm_sq = estimate_norm_sq(K, norm_iters, seed)
    if cfg.sigma is None:
        sigma, eta = default_steps(phi, norm_sq)
    else:
        sigma, eta = cfg.sigma, cfg.eta
        check_step_condition(sigma, eta, norm_sq)

    tau, mu, c = cfg.tau, cfg.mu, cfg.c
    u = b0.copy()
    v = np.zeros_like(b0)
    u_bar, v_bar = u.copy(), v.copy()
    lam1 = np.zeros((2,) + b0.shape)
    lam2 = np.zeros_like(b0)
    if record_gap:
        sums = [np.zeros_like(u), np.zeros_like(v), np.zeros_like(lam1), np.zeros_like(lam2)]

    trace = []
    converged = False
    k = 0
    for k in range(1, cfg.max_iter + 1):
        lam1 = tv_clip(lam1 + sigma * grad(u_bar), tau, isotropic)
        lam2 = huber_conj_prox(lam2 + sigma * (phi.apply(u_bar + v_bar) - b0), sigma, c)

        back = phi.apply_adjoint(lam2)
        gl = grad_adjoint(lam1)
        u_new = u - eta * (gl + back)
        v_new = svt(v - eta * back, eta * mu)

        u_bar = 2.0 * u_new - u
        v_bar = 2.0 * v_new - v
        if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(v_new))):
            raise NumericalError(f"non-finite iterate at iteration {k}")

        t = tol(u, v, u_new, v_new)
        u, v = u_new, v_new
        gap = erg = None
        if record_gap:
            for acc, x in zip(sums, (u, v, lam1, lam2)):
                acc += x
            gap = pdhg_gap(u, v, lam1, lam2, b0, phi, cfg, isotropic)
            erg = pdhg_gap(*(acc / k for acc in sums), b0, phi, cfg, isotropic)
        trace.append(TraceRecord(objective(u, v, b0, phi, cfg), t,
                                 float(np.linalg.norm(gl + back)), gap=gap, ergodic_gap=erg))
        if callback is not None:
            callback(k, dict(u=u, v=v, lambda1=lam1, lambda2=lam2, u_bar=u_bar, v_bar=v_bar))
        if t < cfg.epsilon:
            converged = True
            break

    log.debug("pdhg finished after %d iterations (converged=%s)", k, converged)
    return DecompResult(u, v, k, trace, converged=converged,
                        info=dict(lambda1=lam1, lambda2=lam2, sigma=sigma, eta=eta, norm_sq=norm_sq))


def pdhg_gap_diagnostic(result, ergodic=False):
    """Gap sequence recorded by ``pdhg_solve(..., record_gap=True)``."""
    g = result.column("ergodic_gap" if ergodic else "gap")
    if np.isnan(g).any():
        raise ValueError("trace has no gap values; rerun with record_gap=True")
    return g
