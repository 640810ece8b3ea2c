import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from cvsteer.fock import (
    FockElementIndex, TruncationError, amplifier_map_on_dyad, default_cutoff, loss_map_on_dyad,
    purified_state_vector, tail_bound, tmst_element_by_composition, tmst_fock_element,
    trace_out_ancillas, truncated_tmst_density,
)
from cvsteer.gaussian import TmstParams, tmst_covariance

# trace-out of the purified vector at cutoff 40, computed once and frozen
FOCK_1111_AT_03_07_02 = 0.05108205912168094


def test_index_parsing():
    assert FockElementIndex.parse("1, 2,3,4") == (1, 2, 3, 4)
    for bad in ("1,2,3", "1,2,3,-1", "a,b,c,d"):
        with pytest.raises(ValueError):
            FockElementIndex.parse(bad)


@pytest.mark.parametrize("s", [0.2, 0.5, 1.3])
@pytest.mark.parametrize("m, n", [(0, 0), (1, 0), (2, 3), (5, 5)])
def test_pure_epr_elements(s, m, n):
    t = math.tanh(s)
    expected = (1 - t * t) * t ** (m + n)
    assert_allclose(tmst_fock_element(TmstParams(s, 1.0, 0.0), (m, m, n, n)), expected, rtol=1e-13)


@given(st.floats(0, 1.5), st.floats(0, 1), st.floats(0, 1),
       st.tuples(*[st.integers(0, 6)] * 4))
def test_selection_rule_zeros_are_exact(s, eta, r, idx):
    m1, m2, n1, n2 = idx
    if m1 + n2 != n1 + m2:
        assert tmst_fock_element(TmstParams(s, eta, r), idx) == 0.0


def test_frozen_oracle_value():
    p = TmstParams(0.3, 0.7, 0.2)
    assert_allclose(tmst_fock_element(p, (1, 1, 1, 1)), FOCK_1111_AT_03_07_02, atol=1e-15)


def test_closed_form_vs_trace_out_box():
    p = TmstParams(0.3, 0.7, 0.2)
    oracle = trace_out_ancillas(purified_state_vector(p, 40), keep=6)
    assert_allclose(truncated_tmst_density(p, 6).elements, oracle, atol=1e-12)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.8),
       st.tuples(*[st.integers(0, 4)] * 4))
def test_closed_form_vs_dyad_composition(s, eta, r, idx):
    p = TmstParams(s, eta, r)
    assert_allclose(tmst_fock_element(p, idx), tmst_element_by_composition(p, idx), atol=1e-13)


@pytest.mark.parametrize("eta", [0.0, 1.0])
@pytest.mark.parametrize("r", [0.0, 0.6])
def test_degenerate_limits_are_finite(eta, r):
    rho = truncated_tmst_density(TmstParams(0.4, eta, r), 8).elements
    assert np.all(np.isfinite(rho))


def test_vacuum_density():
    rho = truncated_tmst_density(TmstParams(0.0, 1.0, 0.0), 4).elements
    expected = np.zeros_like(rho)
    expected[0, 0, 0, 0] = 1.0
    assert_allclose(rho, expected)


def test_trace_within_tail_bound():
    p = TmstParams(0.5, 0.8, 0.1)
    dm = truncated_tmst_density(p, 30)
    assert dm.tail_bound < 1e-8
    assert abs(dm.trace() - 1.0) <= dm.tail_bound + 1e-13


@given(st.floats(0, 1.2), st.floats(0, 1), st.floats(0, 0.8))
def test_parity_sum_matches_determinant(s, eta, r):
    p = TmstParams(s, eta, r)
    n = default_cutoff(p, 1e-12)
    dm = truncated_tmst_density(p, n)
    assert abs(dm.parity_sum() - 1 / math.sqrt(tmst_covariance(p).det)) <= dm.tail_bound + 1e-13


@given(st.floats(0, 1.2), st.floats(0.05, 1), st.floats(0, 0.8))
def test_fixed_difference_blocks_are_psd(s, eta, r):
    # rho only couples |m1 m2> to |n1 n2> with m1 - m2 = n1 - n2
    n = 8
    rho = truncated_tmst_density(TmstParams(s, eta, r), n).elements
    for delta in range(-n + 1, n):
        pairs = [(i, i - delta) for i in range(n) if 0 <= i - delta < n]
        block = np.array([[rho[a, b, c, d] for c, d in pairs] for a, b in pairs])
        assert_allclose(block, block.T, atol=1e-15)
        assert np.linalg.eigvalsh(block).min() >= -1e-13


def test_loss_map_examples():
    assert_allclose(loss_map_on_dyad(2, 1, 1.0), np.eye(3)[2][:, None] * np.eye(3)[1][None, :])
    full = loss_map_on_dyad(3, 3, 0.0)
    assert full[0, 0] == 1.0 and full.sum() == 1.0
    assert_allclose(loss_map_on_dyad(1, 1, 0.5), np.diag([0.5, 0.5]))


def test_loss_map_vs_beam_splitter_amplitudes():
    # |m> on a beam splitter: amplitude on |m-k>_A |k>_E is sqrt(C(m,k) eta^(m-k) (1-eta)^k)
    m, eta = 4, 0.3
    amps = np.array([math.sqrt(math.comb(m, k) * eta ** (m - k) * (1 - eta) ** k) for k in range(m + 1)])
    expected = np.zeros((m + 1, m + 1))
    for k in range(m + 1):
        expected[m - k, m - k] = amps[k] ** 2
    assert_allclose(loss_map_on_dyad(m, m, eta), expected, atol=1e-15)


def test_amplifier_map_examples():
    assert_allclose(amplifier_map_on_dyad(1, 2, 0.0), np.eye(3)[1][:, None] * np.eye(3)[2][None, :])
    r = 0.5
    th = amplifier_map_on_dyad(0, 0, r, cutoff=30)
    t2 = math.tanh(r) ** 2
    assert_allclose(np.diag(th), [t2**l / math.cosh(r) ** 2 for l in range(30)], rtol=1e-13)


def test_amplifier_map_vs_squeezer_state_vector():
    # two-mode squeezer acting on |m>|0>: amplitude of |m+l>|l> is
    # sqrt(C(m+l, m)) tanh^l / cosh^(m+1)
    m, n, r, N = 0, 2, 0.4, 60
    def vec(k):
        out = np.zeros((N, N))
        for l in range(N - k):
            out[k + l, l] = math.sqrt(math.comb(k + l, k)) * math.tanh(r) ** l / math.cosh(r) ** (k + 1)
        return out
    oracle = vec(m) @ vec(n).T
    assert_allclose(amplifier_map_on_dyad(m, n, r, cutoff=N), oracle, atol=1e-14)


def test_purified_vector_epr_and_r0():
    s = 0.4
    psi = purified_state_vector(TmstParams(s, 1.0, 0.0), 30)
    t = math.tanh(s)
    for m in range(5):
        assert_allclose(psi[m, m, 0, 0], math.sqrt(1 - t * t) * t**m, rtol=1e-13)
    psi = purified_state_vector(TmstParams(0.2, 0.5, 0.0), 30)
    assert np.all(psi[..., 1:] == 0.0)


def test_purified_vector_too_small_cutoff():
    with pytest.raises(TruncationError, match="discards"):
        purified_state_vector(TmstParams(1.0, 0.5, 0.5), 5)


def test_purified_norm():
    p = TmstParams(0.6, 0.4, 0.3)
    n = default_cutoff(p, 1e-13)
    assert abs(np.sum(purified_state_vector(p, n) ** 2) - 1.0) < 1e-12


def test_tail_bound_shrinks():
    p = TmstParams(0.8, 0.5, 0.4)
    bounds = [tail_bound(p, n) for n in (10, 20, 40)]
    assert bounds[0] > bounds[1] > bounds[2]
    assert tail_bound(p, default_cutoff(p, 1e-10)) < 1e-10


def test_dump_round_trip(tmp_path):
    dm = truncated_tmst_density(TmstParams(0.3, 0.7, 0.2), 4)
    dm.dump_csv(tmp_path / "rho.csv")
    lines = (tmp_path / "rho.csv").read_text().splitlines()
    assert lines[0] == "m1,m2,n1,n2,value"
    m1, m2, n1, n2, v = lines[1].split(",")
    assert float(v) == dm.element(int(m1), int(m2), int(n1), int(n2))
    dm.dump_json(tmp_path / "rho.json")
    data = json.loads((tmp_path / "rho.json").read_text())
    assert data["cutoff"] == 4 and len(data["elements"]) == len(lines) - 1
