"""Robust cartoon-texture decomposition with a Huber data term.

Cartoon ``u`` is regularized by isotropic total variation, texture ``v`` by
the nuclear norm, and the fit to the observation by the Huber loss, which
tolerates heavy-tailed noise. Two solvers are provided: a partially
parallel splitting method for denoising and a primal-dual method for any
linear degradation (masks, random sampling, blur).
"""
from .core import (ConfigError, DecompResult, NumericalError, RLRPError, ShapeMismatch,
                   SolverConfig, SvdFailure, TooSmall, TraceRecord, ZeroReference, validate_config)
from .linops import (Blur, Downsample, Identity, Mask, StackedOperator, estimate_norm_sq, grad,
                     grad_adjoint, solve_grad_gram_plus_identity)
from .metrics import objective, snr, ssim, tol
from .noise import NoiseSpec, corrupt, sample_noise
from .pdhg import pdhg_gap, pdhg_gap_diagnostic, pdhg_solve
from .pps import pps_diagnostics, pps_solve
from .prox import clip, huber_conj_prox, huber_prox, huber_value, nuclear_norm, shrink, svt
from .synth import GroundTruth, compose, make_cartoon, make_ground_truth, make_texture

__version__ = "0.1.0"
