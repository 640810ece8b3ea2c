import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from cvsteer import _kernels
from cvsteer._accel import backend_name
from cvsteer.fock import _log_factorials
from cvsteer.gaussian import TmstParams
from cvsteer.pseudospin import type_i_truncation

LF = _log_factorials(512)
params = st.tuples(st.floats(0, 1.2), st.floats(0, 1), st.floats(0, 1.0))


def test_backend_name():
    assert backend_name() in ("numba", "numpy")


@given(params, st.tuples(*[st.integers(0, 6)] * 4))
def test_element_backends_agree(p, idx):
    sig = np.tanh(p[0])
    a = _kernels.fock_element_jit(sig, p[1], p[2], *idx, LF)
    b = _kernels.fock_element_numpy(sig, p[1], p[2], *idx, LF)
    c = _kernels.fock_element_loops(sig, p[1], p[2], *idx, LF)
    assert_allclose([a, b], c, rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("p", [(0.3, 0.7, 0.2), (1.0, 0.0, 0.5), (0.6, 1.0, 0.0)])
def test_fill_backends_agree(p):
    sig = np.tanh(p[0])
    a = _kernels.fill_density_jit(sig, p[1], p[2], 10, LF)
    b = _kernels.fill_density_numpy(sig, p[1], p[2], 10, LF)
    assert_allclose(a, b, rtol=1e-12, atol=1e-300)
    for idx in itertools.product(range(10), repeat=4):
        if a[idx] != 0.0:
            assert_allclose(a[idx], _kernels.fock_element_loops(sig, p[1], p[2], *idx, LF), rtol=1e-13)


@given(params)
def test_type_i_backends_agree(p):
    tp = TmstParams(*p)
    n, l, _ = type_i_truncation(tp, 1e-10)
    args = (tp.varsigma, tp.eta, tp.r, n, l, LF)
    ref = _kernels.type_i_xx_loops(*args)
    assert_allclose(_kernels.type_i_xx_jit(*args), ref, rtol=1e-12, atol=1e-15)
    assert_allclose(_kernels.type_i_xx_numpy(*args), ref, rtol=1e-12, atol=1e-15)


def test_epr_series_value():
    s = 0.7
    tp = TmstParams(s, 1.0, 0.0)
    n, l, _ = type_i_truncation(tp, 1e-14)
    assert_allclose(_kernels.type_i_xx(tp.varsigma, 1.0, 0.0, n, l, LF), np.tanh(2 * s), atol=1e-13)
