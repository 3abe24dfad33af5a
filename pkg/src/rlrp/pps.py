"""Partially parallel splitting with a relaxed correction step (denoising case).

Solves ``min tau*TV(u) + mu*||v||_* + rho_c(u + v - b0)`` through the
splitting ``grad u = y``, ``u + v = z``. Each sweep computes ``u`` exactly,
predicts the multipliers, predicts ``v``, ``y`` and ``z`` independently
from those predictions and finally relaxes ``(v, y, z, lambda)`` towards
the predicted point.
"""
import logging

import numpy as np

from .core import PPS, DecompResult, NumericalError, SolverConfig, TraceRecord, as_image, validate_config
from .linops import grad, grad_adjoint, solve_grad_gram_plus_identity
from .metrics import objective, tol
from .prox import huber_prox, svt, tv_shrink

log = logging.getLogger(__name__)


def q_norm_sq(dv, dy, dz, dl1, dl2, cfg):
    """Squared Q-norm of a difference ``(dv, (dy, dz), (dl1, dl2))``.

    Q is the block matrix ``[[r b B'B, 0, -B'], [0, r b C'C, -C'], [-B, -C, (s/b) I]]``
    with ``B = (0; I)`` and ``C = -I``; it is positive definite when
    ``r * s > 2``.
    """
    rb = cfg.r * cfg.beta
    sb = cfg.s / cfg.beta
    quad = rb * (np.vdot(dv, dv) + np.vdot(dy, dy) + np.vdot(dz, dz))
    quad += sb * (np.vdot(dl1, dl1) + np.vdot(dl2, dl2))
    cross = -np.vdot(dl2, dv) + np.vdot(dl1, dy) + np.vdot(dl2, dz)
    return float(quad + 2.0 * cross)


def pps_solve(b0, cfg=None, *, record_q=False, isotropic=True, callback=None):
    """Decompose `b0` into cartoon `u` and texture `v` (identity degradation).

    Parameters
    ----------
    b0 : ndarray, shape (H, W) or (C, H, W)
        Observation, scaled to [0, 1].
    cfg : SolverConfig
        Needs ``r * s > 2`` and ``0 < gamma < 2``.
    record_q : bool
        Also record ``||zeta^k - zeta_tilde^k||_Q^2`` in the trace.
    callback : callable, optional
        Called as ``callback(k, state_dict)`` after each iteration.

    Returns
    -------
    DecompResult
    """
    cfg = validate_config(cfg or SolverConfig(), PPS)
    b0 = as_image(b0, "b0")
    if not np.any(b0):
        z = np.zeros_like(b0)
        return DecompResult(z, z.copy(), 0, [], converged=True)

    beta, gamma, r, s = cfg.beta, cfg.gamma, cfg.r, cfg.s
    rb = r * beta
    # u^0 = b0 only seeds the first Tol; every other variable starts at zero.
    u = b0.copy()
    v = np.zeros_like(b0)
    y = np.zeros((2,) + b0.shape)
    z = np.zeros_like(b0)
    lam1 = np.zeros_like(y)
    lam2 = np.zeros_like(b0)

    trace = []
    converged = False
    k = 0
    for k in range(1, cfg.max_iter + 1):
        u_prev, v_prev = u, v

        u = solve_grad_gram_plus_identity(grad_adjoint(y + (s / beta) * lam1) + (z - v + (s / beta) * lam2))

        gu = grad(u)
        lam1_t = lam1 - (beta / s) * (gu - y)
        lam2_t = lam2 - (beta / s) * (u + v - z)

        w1 = 2.0 * lam1_t - lam1
        w2 = 2.0 * lam2_t - lam2
        v_t = svt(v + w2 / rb, cfg.mu / rb)
        y_t = tv_shrink(y - w1 / rb, cfg.tau / rb, isotropic)
        z_t = huber_prox(z - w2 / rb - b0, 1.0 / rb, cfg.c) + b0

        q = q_norm_sq(v - v_t, y - y_t, z - z_t, lam1 - lam1_t, lam2 - lam2_t, cfg) if record_q else None

        v = v - gamma * (v - v_t)
        y = y - gamma * (y - y_t)
        z = z - gamma * (z - z_t)
        lam1 = lam1 - gamma * (lam1 - lam1_t)
        lam2 = lam2 - gamma * (lam2 - lam2_t)

        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise NumericalError(f"non-finite iterate at iteration {k}")

        t = tol(u_prev, v_prev, u, v)
        res = float(np.sqrt(np.sum((gu - y) ** 2) + np.sum((u + v - z) ** 2)))
        trace.append(TraceRecord(objective(u, v, b0, cfg=cfg), t, res, q_residual=q))
        if callback is not None:
            callback(k, dict(u=u, v=v, y=y, z=z, lambda1=lam1, lambda2=lam2))
        if t < cfg.epsilon:
            converged = True
            break

    log.debug("pps finished after %d iterations (converged=%s)", k, converged)
    return DecompResult(u, v, k, trace, converged=converged,
                        info=dict(y=y, z=z, lambda1=lam1, lambda2=lam2))


def pps_diagnostics(result):
    """Per-iteration Q-norm residuals recorded by ``pps_solve(..., record_q=True)``."""
    q = result.column("q_residual")
    if np.isnan(q).any():
        raise ValueError("trace has no Q residuals; rerun with record_q=True")
    return q
