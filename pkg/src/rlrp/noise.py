"""Seeded heavy-tailed noise and the additive observation model.

``intensity`` is a plain multiplicative scale on standard draws: Student-t
with df <= 2 and Cauchy have no finite variance, so no variance calibration
is attempted.
"""
import math
from dataclasses import dataclass

import numpy as np

from .core import ShapeMismatch


@dataclass(frozen=True)
class NoiseSpec:
    """Noise family, scale and seed.

    family : {"student-t", "cauchy", "ged"}
    param : degrees of freedom (student-t) or shape (ged); unused for cauchy
    """

    family: str = "student-t"
    intensity: float = 0.1
    seed: int = 0
    param: float = 2.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown noise family {self.family!r}; choose from {sorted(FAMILIES)}")
        if self.intensity < 0:
            raise ValueError("intensity must be nonnegative")
        if self.family != "cauchy" and not self.param > 0:
            raise ValueError("distribution parameter must be positive")

    @classmethod
    def student_t(cls, df=2.0, intensity=0.1, seed=0):
        return cls("student-t", intensity, seed, df)

    @classmethod
    def cauchy(cls, intensity=0.05, seed=0):
        return cls("cauchy", intensity, seed, 1.0)

    @classmethod
    def ged(cls, shape=1.0, intensity=0.1, seed=0):
        return cls("ged", intensity, seed, shape)

    @property
    def label(self):
        if self.family == "cauchy":
            return f"cauchy:{self.intensity:g}"
        name = "df" if self.family == "student-t" else "shape"
        return f"{self.family}:{name}={self.param:g}:{self.intensity:g}"


def _student_t(rng, shape, df):
    z = rng.standard_normal(shape)
    return z / np.sqrt(rng.chisquare(df, shape) / df)


def _cauchy(rng, shape, _):
    return np.tan(np.pi * (rng.random(shape) - 0.5))


def _ged(rng, shape, p):
    # |X| = G**(1/p) with G ~ Gamma(1/p); rescaled to unit variance
    mag = rng.gamma(1.0 / p, 1.0, shape) ** (1.0 / p)
    scale = math.sqrt(math.exp(math.lgamma(3.0 / p) - math.lgamma(1.0 / p)))
    sign = np.where(rng.random(shape) < 0.5, -1.0, 1.0)
    return sign * mag / scale


FAMILIES = {"student-t": _student_t, "cauchy": _cauchy, "ged": _ged}


def sample_noise(spec, shape):
    """I.i.d. draws from `spec` times its intensity; deterministic in the seed."""
    shape = tuple(shape)
    if spec.intensity == 0:
        return np.zeros(shape)
    rng = np.random.default_rng(spec.seed)
    return spec.intensity * FAMILIES[spec.family](rng, shape, spec.param)


def corrupt(b, phi, spec):
    """Observation ``phi(b) + noise``; not clamped to [0, 1]."""
    b = np.asarray(b, dtype=np.float64)
    phi = phi.materialize(b.shape)
    try:
        clean = phi.apply(b)
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from exc
    return clean + sample_noise(spec, b.shape)
