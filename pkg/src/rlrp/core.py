"""Shared data model: images, solver configuration, results and errors.

Images are plain ``numpy`` float arrays. A grayscale image has shape
``(H, W)``; a multi-channel image is stored planar with shape ``(C, H, W)``.
Every operator in the package acts on the last two axes and broadcasts over
any leading channel axis, so channels are always processed independently.

A gradient field is an array of shape ``(2,) + image.shape`` where index 0
holds the horizontal (x, along the width) differences and index 1 the
vertical (y, along the height) differences.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class RLRPError(Exception):
    """Base class for all package errors."""


class ConfigError(RLRPError, ValueError):
    """A solver configuration violates one of its constraints."""


class NumericalError(RLRPError, ArithmeticError):
    """An iterate became non-finite."""


class ShapeMismatch(RLRPError, ValueError):
    """Operands have incompatible shapes."""


class SvdFailure(RLRPError, np.linalg.LinAlgError):
    """The singular value decomposition did not converge."""


class ZeroReference(RLRPError, ValueError):
    """A reference image with zero norm was passed to a relative metric."""


class TooSmall(RLRPError, ValueError):
    """The image is smaller than the metric window."""


PPS = "pps"
PDHG = "pdhg"


def as_image(data, name="image"):
    """Validate and convert `data` to a float64 image array.

    Accepts ``(H, W)`` or ``(C, H, W)`` arrays with finite entries.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim not in (2, 3):
        raise ShapeMismatch(f"{name} must have shape (H, W) or (C, H, W), got {arr.shape}")
    if min(arr.shape) < 1:
        raise ShapeMismatch(f"{name} has an empty dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def check_same_shape(a, b, what="operands"):
    if np.shape(a) != np.shape(b):
        raise ShapeMismatch(f"{what} differ in shape: {np.shape(a)} vs {np.shape(b)}")


@dataclass(frozen=True)
class SolverConfig:
    """Model weights and algorithm parameters.

    ``c = math.inf`` turns the Huber loss into ``0.5 * ||.||**2`` (the
    quadratic-loss baseline). ``sigma`` and ``eta`` left as ``None`` are
    chosen by the primal-dual solver from the estimated operator norm.
    """

    tau: float = 0.015
    mu: float = 0.2
    c: float = 0.01
    beta: float = 0.2
    gamma: float = 1.6
    r: float = 1.0
    s: float = 2.01
    sigma: Optional[float] = None
    eta: Optional[float] = None
    epsilon: float = 1e-2
    max_iter: int = 200

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def is_quadratic(self):
        return math.isinf(self.c)


def _positive(cfg, name):
    value = getattr(cfg, name)
    if value is None or not (value > 0) or math.isnan(value):
        raise ConfigError(f"{name} must be positive, got {value!r}")


def validate_config(cfg, algo):
    """Check `cfg` against the constraints of the selected algorithm.

    Parameters
    ----------
    cfg : SolverConfig
    algo : {"pps", "pdhg"}

    Returns
    -------
    SolverConfig
        `cfg` itself, unchanged.

    Raises
    ------
    ConfigError
        Naming the first violated constraint. The primal-dual step
        condition depends on the operator norm and is checked by
        :func:`check_step_condition` at solve time.
    """
    if algo not in (PPS, PDHG):
        raise ConfigError(f"unknown algorithm {algo!r}")
    for name in ("tau", "mu", "c", "epsilon"):
        _positive(cfg, name)
    if int(cfg.max_iter) != cfg.max_iter or cfg.max_iter < 1:
        raise ConfigError(f"max_iter must be a positive integer, got {cfg.max_iter!r}")
    if algo == PPS:
        for name in ("beta", "r", "s"):
            _positive(cfg, name)
        if not (0.0 < cfg.gamma < 2.0):
            raise ConfigError(f"gamma must be in (0,2), got {cfg.gamma!r}")
        if not (cfg.r * cfg.s > 2.0):
            raise ConfigError(f"rs>2 violated: r*s = {cfg.r * cfg.s!r}")
    else:
        if (cfg.sigma is None) != (cfg.eta is None):
            raise ConfigError("sigma and eta must be given together or both left unset")
        if cfg.sigma is not None:
            _positive(cfg, "sigma")
            _positive(cfg, "eta")
    return cfg


NORM_SAFETY = 1.05


def check_step_condition(sigma, eta, norm_sq):
    """Raise ConfigError unless ``sigma * eta * 1.05 * norm_sq < 1``."""
    product = sigma * eta * NORM_SAFETY * norm_sq
    if not product < 1.0:
        raise ConfigError(
            f"step condition sigma*eta*||K||^2<1 violated: "
            f"{sigma!r}*{eta!r}*{NORM_SAFETY}*{norm_sq:.6g} = {product:.6g}"
        )


@dataclass(frozen=True)
class TraceRecord:
    """Diagnostics of one iteration.

    ``q_residual`` is filled by the splitting solver when requested,
    ``gap`` and ``ergodic_gap`` by the primal-dual solver.
    """

    objective: float
    tol: float
    constraint_residual: float
    q_residual: Optional[float] = None
    gap: Optional[float] = None
    ergodic_gap: Optional[float] = None


@dataclass
class DecompResult:
    u: np.ndarray
    v: np.ndarray
    iterations: int
    trace: list = field(default_factory=list)
    converged: bool = False
    info: dict = field(default_factory=dict)

    @property
    def restored(self):
        return self.u + self.v

    def column(self, name):
        """Return one trace field as an array (``nan`` where unrecorded)."""
        return np.array(
            [np.nan if getattr(t, name) is None else getattr(t, name) for t in self.trace]
        )
