import math

import numpy as np
import pytest

from rlrp.core import (PDHG, PPS, ConfigError, DecompResult, SolverConfig, TraceRecord, as_image,
                       check_step_condition, validate_config)

# parameter sets quoted for the experiments
QUOTED = [
    SolverConfig(tau=0.015, mu=0.2, c=0.01, beta=0.2, gamma=1.6, r=1, s=2.01, epsilon=1e-2),
    SolverConfig(tau=0.1, mu=2.0, c=0.1, beta=2.0, gamma=1.3, r=1, s=2.01, epsilon=1e-2),
    SolverConfig(tau=0.015, mu=0.2, c=math.inf, beta=0.2, gamma=1.6, r=1, s=2.01),
]


def test_quoted_pps_parameters_accepted():
    for cfg in QUOTED:
        assert validate_config(cfg, PPS) is cfg


def test_pdhg_accepts_quoted_steps():
    for step in (0.35, 0.4, 0.6):
        validate_config(SolverConfig(sigma=step, eta=step), PDHG)


def test_rs_boundary_rejected():
    with pytest.raises(ConfigError, match="rs>2 violated"):
        validate_config(SolverConfig(r=1, s=2.0), PPS)


@pytest.mark.parametrize("gamma", [2.0, 0.0, -0.5, 2.5])
def test_gamma_boundary_rejected(gamma):
    with pytest.raises(ConfigError, match=r"gamma must be in \(0,2\)"):
        validate_config(SolverConfig(gamma=gamma), PPS)


@pytest.mark.parametrize("field,value", [("tau", 0.0), ("mu", -1.0), ("c", 0.0), ("beta", 0.0),
                                         ("epsilon", 0.0), ("r", -1.0), ("tau", math.nan)])
def test_single_constraint_violations(field, value):
    for base in QUOTED:
        with pytest.raises(ConfigError, match=field):
            validate_config(base.replace(**{field: value}), PPS)


def test_max_iter_must_be_positive_integer():
    with pytest.raises(ConfigError, match="max_iter"):
        validate_config(SolverConfig(max_iter=0), PPS)
    with pytest.raises(ConfigError, match="max_iter"):
        validate_config(SolverConfig(max_iter=2.5), PDHG)


def test_pdhg_ignores_pps_only_fields():
    validate_config(SolverConfig(r=1, s=1, gamma=3.0), PDHG)


def test_pdhg_half_specified_steps_rejected():
    with pytest.raises(ConfigError, match="sigma and eta"):
        validate_config(SolverConfig(sigma=0.3), PDHG)
    with pytest.raises(ConfigError, match="eta"):
        validate_config(SolverConfig(sigma=0.3, eta=-0.1), PDHG)


def test_unknown_algorithm():
    with pytest.raises(ConfigError):
        validate_config(SolverConfig(), "admm")


def test_step_condition():
    check_step_condition(0.3, 0.3, 9.0)
    with pytest.raises(ConfigError, match="sigma\\*eta\\*\\|\\|K\\|\\|\\^2<1"):
        check_step_condition(0.35, 0.35, 9.0)


def test_config_is_immutable_and_quadratic_flag():
    cfg = SolverConfig()
    with pytest.raises(Exception):
        cfg.tau = 1.0
    assert not cfg.is_quadratic
    assert cfg.replace(c=math.inf).is_quadratic


def test_as_image_rejects_nonfinite_and_bad_rank():
    with pytest.raises(ValueError):
        as_image(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        as_image(np.zeros(4))
    assert as_image([[1, 2]]).dtype == np.float64


def test_result_column_and_restored():
    u, v = np.ones((2, 2)), np.full((2, 2), 2.0)
    res = DecompResult(u, v, 2, [TraceRecord(1.0, 0.5, 0.1), TraceRecord(0.5, 0.1, 0.0, q_residual=3.0)])
    np.testing.assert_array_equal(res.restored, 3.0)
    np.testing.assert_array_equal(res.column("objective"), [1.0, 0.5])
    q = res.column("q_residual")
    assert math.isnan(q[0]) and q[1] == 3.0
