import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from numpy.testing import assert_allclose
from scipy import optimize

from cvsteer.gaussian import epr_covariance, gaussian_steering_gap, is_bona_fide
from cvsteer.pseudospin import moment_value, type_ii_correlators
from cvsteer.werner import (
    WernerParams, gaussian_quadratic_coefficients, p_steer_gaussian, p_steer_type_i,
    p_steer_type_ii, type_i_quadratic, werner_covariance, werner_thresholds,
    werner_type_i_correlators, werner_type_ii_correlators,
)

positive = st.floats(0.01, 4.0)


def test_params_validation():
    with pytest.raises(ValueError):
        WernerParams(1.2, 1, 1)
    with pytest.raises(ValueError):
        WernerParams(0.5, -1, 1)
    assert WernerParams.symmetric(0.3, 0.7) == WernerParams(0.3, 0.7, 0.7)


def test_type_i_correlator_examples():
    s = 0.8
    assert_allclose(werner_type_i_correlators(WernerParams(1, s, 0.3)).astuple(),
                    (math.tanh(2 * s), -math.tanh(2 * s), 1.0))
    assert werner_type_i_correlators(WernerParams(0, 0.5, 0)).astuple() == (0.0, 0.0, 1.0)
    t = math.tanh(1.0)
    assert_allclose(werner_type_i_correlators(WernerParams(0.5, 0.5, 0.5)).astuple(),
                    (0.5 * t, -0.5 * t, 0.5 * t * t + 1 - t * t))


def test_type_ii_correlator_examples():
    s = 0.6
    assert_allclose(werner_type_ii_correlators(WernerParams(1, s, 2.0)).astuple(),
                    type_ii_correlators(epr_covariance(s)).astuple(), atol=1e-15)
    assert_allclose(werner_type_ii_correlators(WernerParams(0, s, 0.4)).astuple(),
                    (0, 0, 1 / math.cosh(0.8) ** 2))
    # linear in p between the EPR and thermal components
    mid = werner_type_ii_correlators(WernerParams(0.5, 0.5, 0.5)).astuple()
    ends = [werner_type_ii_correlators(WernerParams(p, 0.5, 0.5)).astuple() for p in (0, 1)]
    assert_allclose(mid, 0.5 * (np.array(ends[0]) + np.array(ends[1])))


def test_covariance_examples():
    assert_allclose(werner_covariance(WernerParams(1, 0.4, 1)).astuple(), epr_covariance(0.4).astuple())
    th = werner_covariance(WernerParams(0, 0.4, 0.9))
    assert th.c == 0.0 and th.a == th.b == math.cosh(1.8)
    assert is_bona_fide(werner_covariance(WernerParams(0.5, 0.5, 0.5)).matrix())


@pytest.mark.parametrize("u", [0.1, 1.0, 3.0])
def test_no_squeezing_never_steerable(u):
    assert p_steer_type_i(0.0, u) == 1.0
    assert p_steer_type_ii(0.0, u) == 1.0
    assert p_steer_type_i(0.0, 0.0) == 1.0


def test_strong_squeezing_limit():
    for fn in (p_steer_type_i, p_steer_type_ii):
        assert abs(fn(8.0, 8.0) - 1 / math.sqrt(3)) < 1e-6
    assert p_steer_gaussian(8.0, 8.0) > 0.999


def test_type_i_closed_form_vs_bisection():
    root = optimize.bisect(lambda q: type_i_quadratic(q, 0.8, 0.8), 0.0, 1.0, xtol=1e-15)
    assert_allclose(p_steer_type_i(0.8, 0.8), root, atol=1e-12)


@given(positive, positive)
def test_type_i_threshold_is_moment_boundary(s, u):
    p = p_steer_type_i(s, u)
    assume(0.001 < p < 0.999)
    below = moment_value(werner_type_i_correlators(WernerParams(p - 1e-6, s, u))).value
    above = moment_value(werner_type_i_correlators(WernerParams(p + 1e-6, s, u))).value
    assert below <= 1.0 < above


@given(positive, positive)
def test_type_ii_threshold_is_moment_boundary(s, u):
    p = p_steer_type_ii(s, u)
    assume(0.001 < p < 0.999)
    below = moment_value(werner_type_ii_correlators(WernerParams(p - 1e-6, s, u))).value
    above = moment_value(werner_type_ii_correlators(WernerParams(p + 1e-6, s, u))).value
    assert below <= 1.0 < above


def test_gaussian_closed_form_vs_bisection():
    gap = lambda q: gaussian_steering_gap(werner_covariance(WernerParams(q, 0.7, 0.7)))
    root = optimize.bisect(gap, 0.01, 1.0, xtol=1e-15)
    assert_allclose(p_steer_gaussian(0.7, 0.7), root, atol=1e-10)


@given(positive, positive)
def test_gaussian_threshold_is_gap_boundary(s, u):
    p = p_steer_gaussian(s, u)
    assume(0.001 < p < 0.999)
    wp = lambda q: werner_covariance(WernerParams(q, s, u))
    assert gaussian_steering_gap(wp(p + 1e-6)) > 0.0
    assert gaussian_steering_gap(wp(p - 1e-6)) <= 0.0


@given(positive, positive, st.floats(0, 1))
def test_gaussian_quadratic_matches_gap(s, u, p):
    A, B, C = gaussian_quadratic_coefficients(s, u)
    sf = werner_covariance(WernerParams(p, s, u))
    # a > a^2 - c^2  is the Werner form of det alpha > det V
    assert_allclose(A * p * p + B * p + C, sf.a - sf.a**2 + sf.c**2,
                    atol=1e-9 * math.cosh(2 * max(s, u)) ** 2)


def test_gaussian_fallback_near_vanishing_denominator():
    # 4 c_s c_u = 2 (c_u^2 + 1) on this curve
    u = 0.6
    cu = math.cosh(2 * u)
    s = 0.5 * math.acosh((cu * cu + 1) / (2 * cu))
    A, B, C = gaussian_quadratic_coefficients(s, u)
    assert abs(A) < 1e-12
    assert_allclose(p_steer_gaussian(s, u), -C / B, rtol=1e-9)
    assert_allclose(p_steer_gaussian(s, u + 1e-4), p_steer_gaussian(s, u), atol=1e-3)


@pytest.mark.parametrize("s", np.linspace(0.05, 5.0, 20))
def test_gaussian_symmetric_closed_form(s):
    assert_allclose(p_steer_gaussian(s, s), 1 / math.sqrt(1 + 1 / math.cosh(2 * s)), atol=1e-12)


def test_hierarchy_on_grid():
    grid = np.linspace(0.01, 3.0, 40)
    for s in grid:
        for u in grid:
            assert p_steer_gaussian(s, u) > p_steer_type_i(s, u)
            assert p_steer_type_ii(s, u) >= p_steer_type_i(s, u) - 1e-15


def test_type_ii_slightly_above_type_i_at_one():
    pi, pii = p_steer_type_i(1, 1), p_steer_type_ii(1, 1)
    assert pi < pii < pi + 0.1


def test_thresholds_summary():
    out = werner_thresholds(1.0, 1.0)
    assert set(out) == {"type_i", "type_ii", "gaussian"}
    assert not any(v["never_steerable"] for v in out.values())
    assert werner_thresholds(0.0, 1.0)["type_i"]["never_steerable"]


def test_symmetric_ordering_beyond_small_squeezing():
    # p_G >= p_ii only from s ~ 0.317 upward; below that the type-ii curve is higher
    for s in np.linspace(0.35, 5.0, 40):
        assert p_steer_gaussian(s, s) >= p_steer_type_ii(s, s) >= p_steer_type_i(s, s)
    assert p_steer_type_ii(0.05, 0.05) > p_steer_gaussian(0.05, 0.05)
