import numpy as np
import pytest

from rlrp.core import ShapeMismatch
from rlrp.linops import grad
from rlrp.prox import nuclear_norm, numeric_rank, svt
from rlrp.synth import (compose, make_cartoon, make_ground_truth, make_texture, outer_profiles, rescale_unit,
                        sinusoid_profiles)


def test_single_region_is_constant():
    img = make_cartoon(16, 16, regions=1, seed=3)
    assert np.unique(img).size == 1
    assert not np.any(grad(img))


@pytest.mark.parametrize("regions", [1, 2, 3, 6])
def test_distinct_values_bounded_by_regions(regions):
    for seed in range(5):
        img = make_cartoon(64, 64, regions, seed)
        assert np.unique(img).size <= regions
        assert 0 <= img.min() and img.max() <= 1


def test_cartoon_deterministic_and_multichannel():
    assert np.array_equal(make_cartoon(32, 32, 4, 9), make_cartoon(32, 32, 4, 9))
    rgb = make_cartoon(20, 24, 3, 1, channels=3)
    assert rgb.shape == (3, 20, 24)


def test_cartoon_rejects_no_regions():
    with pytest.raises(ValueError):
        make_cartoon(8, 8, 0)


def test_rank_one_profile_before_rescale():
    rows, cols = sinusoid_profiles(32, 32, 1, np.random.default_rng(0))
    s = np.linalg.svd(outer_profiles(rows, cols), compute_uv=False)
    assert np.all(s[1:] < 1e-10 * s[0])


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_texture_rank_and_range(rank):
    for seed in range(4):
        t = make_texture(64, 64, rank, seed)
        assert t.min() == 0.0 and t.max() == 1.0
        assert numeric_rank(t) <= rank + 1


def test_texture_oscillates_along_both_axes():
    t = make_texture(64, 64, 2, 0)
    t0 = t - t.mean()
    assert np.sum(np.abs(np.diff(np.sign(t0), axis=0)) > 0) > 64
    assert np.sum(np.abs(np.diff(np.sign(t0), axis=1)) > 0) > 64


def test_constant_profiles_give_constant_image():
    img = outer_profiles(np.ones((1, 5)), np.ones((1, 4)))
    assert np.unique(img).size == 1
    assert not np.any(rescale_unit(img))


def test_svt_annihilates_texture_at_large_threshold():
    t = make_texture(32, 32, 2, 1)
    assert nuclear_norm(t) > 1
    assert nuclear_norm(svt(t, 1e6)) == 0.0


def test_texture_rank_bounds():
    with pytest.raises(ValueError):
        make_texture(8, 8, 0)
    with pytest.raises(ValueError):
        make_texture(8, 8, 9)


def test_compose_seven_to_three(rng):
    c, t = rng.random((2, 5, 5))
    gt = compose(c, t, 0.7)
    assert np.array_equal(gt.composite, gt.weights[0] * c + gt.weights[1] * t)
    np.testing.assert_allclose(gt.composite, 0.7 * c + 0.3 * t, rtol=0, atol=2 * np.finfo(float).eps)
    assert gt.weights == (0.7, pytest.approx(0.3))
    assert sum(gt.weights) == pytest.approx(1.0, abs=1e-15)


def test_compose_boundaries_and_shapes():
    z = np.zeros((3, 3))
    for w in (0.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            compose(z, z, w)
    with pytest.raises(ShapeMismatch):
        compose(z, np.zeros((3, 4)))


def test_constant_cartoon_zero_texture():
    gt = compose(np.full((4, 4), 0.5), np.zeros((4, 4)), 0.7)
    np.testing.assert_array_equal(gt.composite, 0.35)


def test_ground_truth_invariants():
    gt = make_ground_truth(64, rank=2, regions=4, seed=3)
    assert np.array_equal(gt.composite, gt.weights[0] * gt.cartoon + gt.weights[1] * gt.texture)
    assert np.unique(gt.cartoon).size <= 4
    assert numeric_rank(gt.texture) <= 3
    assert np.array_equal(gt.composite, make_ground_truth(64, 2, 4, 3).composite)
    rgb = make_ground_truth(32, channels=3)
    assert rgb.composite.shape == (3, 32, 32)
