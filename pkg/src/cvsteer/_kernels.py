"""Hot numerical kernels, each in a loop form (numba) and a numpy form.

All products of binomials and powers are assembled in log space and
exponentiated once per term; ``_xlogy`` gives ``0 * log 0 = 0`` so the
degenerate limits eta in {0, 1} and r = 0 evaluate exactly instead of
producing NaN.

Naming: ``<kernel>_loops`` is plain Python that numba compiles into
``<kernel>_jit``; ``<kernel>_numpy`` is the vectorised fallback.  The public
name ``<kernel>`` is bound to one of the two by :data:`USE_NUMBA`.
"""

import math

import numpy as np
from scipy.special import gammaln, xlogy

from ._accel import USE_NUMBA, njit


def log_factorial_table(n):
    """``log(k!)`` for ``k = 0..n`` as a float64 array."""
    return gammaln(np.arange(n + 1, dtype=np.float64) + 1.0)


# --------------------------------------------------------------------------
# scalar helpers shared by the loop kernels


def _xlogy_scalar(a, x):
    if a == 0.0:
        return 0.0
    if x <= 0.0:
        return -math.inf
    return a * math.log(x)


def _lbinom_scalar(n, k, lf):
    return lf[n] - lf[k] - lf[n - k]


_xlogy_jit = njit(_xlogy_scalar)
_lbinom_jit = njit(_lbinom_scalar)


def _lbinom(n, k, lf):
    return lf[n] - lf[k] - lf[n - k]


# --------------------------------------------------------------------------
# Fock elements of a two-mode squeezed thermal state


def _make_fock_element_loops(xlogy_s, lbinom_s):
    def fock_element_loops(sig, eta, r, m1, m2, n1, n2, lf):
        if m1 + n2 != n1 + m2:
            return 0.0
        log_pref = (
            math.log1p(-sig * sig)
            + xlogy_s(float(m2 + n2), sig)
            - (m1 + n1 + 2) * math.log(math.cosh(r))
        )
        sh = math.sinh(r)
        kmin = max(0, m2 - m1)
        kmax = min(m2, n2)
        total = 0.0
        for k in range(kmin, kmax + 1):
            lb = 0.5 * (
                lbinom_s(m2, k, lf)
                + lbinom_s(n2, k, lf)
                + lbinom_s(m1, m2 - k, lf)
                + lbinom_s(n1, n2 - k, lf)
            )
            lp = (
                xlogy_s(0.5 * (m2 + n2) - k, eta)
                + xlogy_s(float(k), 1.0 - eta)
                + xlogy_s(2.0 * (m1 - m2 + k), sh)
            )
            total += math.exp(lb + lp)
        return math.exp(log_pref) * total

    return fock_element_loops


fock_element_loops = _make_fock_element_loops(_xlogy_scalar, _lbinom_scalar)
fock_element_jit = njit(_make_fock_element_loops(_xlogy_jit, _lbinom_jit))


def fock_element_numpy(sig, eta, r, m1, m2, n1, n2, lf):
    if m1 + n2 != n1 + m2:
        return 0.0
    k = np.arange(max(0, m2 - m1), min(m2, n2) + 1)
    if k.size == 0:
        return 0.0
    lb = 0.5 * (
        _lbinom(m2, k, lf) + _lbinom(n2, k, lf)
        + _lbinom(m1, m2 - k, lf) + _lbinom(n1, n2 - k, lf)
    )
    with np.errstate(divide="ignore"):
        lp = (
            xlogy(0.5 * (m2 + n2) - k, eta)
            + xlogy(k, 1.0 - eta)
            + xlogy(2.0 * (m1 - m2 + k), math.sinh(r))
        )
        log_pref = (
            math.log1p(-sig * sig)
            + xlogy(m2 + n2, sig)
            - (m1 + n1 + 2) * math.log(math.cosh(r))
        )
    return float(math.exp(log_pref) * np.exp(lb + lp).sum())


def _fill_density_loops_factory(element):
    def fill_density_loops(sig, eta, r, cutoff, lf):
        out = np.zeros((cutoff, cutoff, cutoff, cutoff))
        for m1 in range(cutoff):
            for m2 in range(cutoff):
                for n1 in range(cutoff):
                    n2 = n1 + m2 - m1
                    if n2 < 0 or n2 >= cutoff:
                        continue
                    out[m1, m2, n1, n2] = element(sig, eta, r, m1, m2, n1, n2, lf)
        return out

    return fill_density_loops


fill_density_jit = njit(_fill_density_loops_factory(fock_element_jit))


def fill_density_numpy(sig, eta, r, cutoff, lf):
    """Vectorised fill, one block of fixed ``m1 - m2`` at a time."""
    out = np.zeros((cutoff, cutoff, cutoff, cutoff))
    sh = math.sinh(r)
    with np.errstate(divide="ignore"):
        log_sig = np.log(sig) if sig > 0 else -np.inf
        base = math.log1p(-sig * sig)
        log_ch = math.log(math.cosh(r))
    for delta in range(-(cutoff - 1), cutoff):
        lo = max(0, -delta)
        hi = cutoff - max(0, delta)
        m2 = np.arange(lo, hi)[:, None, None]
        n2 = np.arange(lo, hi)[None, :, None]
        k = np.arange(0, hi)[None, None, :]
        m1 = m2 + delta
        n1 = n2 + delta
        valid = (k >= np.maximum(0, m2 - m1)) & (k <= np.minimum(m2, n2))
        kk = np.where(valid, k, 0)
        lb = 0.5 * (
            _lbinom(m2, np.minimum(kk, m2), lf)
            + _lbinom(n2, np.minimum(kk, n2), lf)
            + _lbinom(m1, np.clip(m2 - kk, 0, m1), lf)
            + _lbinom(n1, np.clip(n2 - kk, 0, n1), lf)
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            lp = (
                xlogy(0.5 * (m2 + n2) - kk, eta)
                + xlogy(kk, 1.0 - eta)
                + xlogy(2.0 * (m1 - m2 + kk), sh)
            )
            # mask before exp: dropped k can carry negative sinh powers
            terms = np.exp(np.where(valid, lb + lp, -np.inf)).sum(axis=2)
            pref = np.exp(
                base + np.where(m2 + n2 == 0, 0.0, (m2 + n2) * log_sig)
                - (m1 + n1 + 2) * log_ch
            )[:, :, 0]
        vals = pref * terms
        idx_m2 = np.arange(lo, hi)
        mm2, nn2 = np.meshgrid(idx_m2, idx_m2, indexing="ij")
        out[mm2 + delta, mm2, nn2 + delta, nn2] = vals
    return out


# --------------------------------------------------------------------------
# type-i pseudospin correlator <S^x (x) S^x> as a double sum over (n, l)


def _make_type_i_loops(xlogy_s, lbinom_s):
    def type_i_xx_loops(sig, eta, r, n_terms, l_terms, lf):
        lc = math.log(math.cosh(r))
        th = math.tanh(r)
        total = 0.0
        for n in range(n_terms):
            ls = xlogy_s(4.0 * n + 1.0, sig)
            if ls == -math.inf:
                continue
            for l in range(l_terms):
                acc = 0.0
                for k in range(n + 1):
                    lg = (
                        xlogy_s(2.0 * k + 0.5, eta)
                        + xlogy_s(2.0 * (n - k), 1.0 - eta)
                        - (4 * k + 3) * lc
                        + xlogy_s(4.0 * l, th)
                        + 0.5 * (
                            lbinom_s(2 * k + 2 * l, 2 * k, lf)
                            + lbinom_s(2 * k + 2 * l + 1, 2 * k + 1, lf)
                            + lbinom_s(2 * n, 2 * k, lf)
                            + lbinom_s(2 * n + 1, 2 * k + 1, lf)
                        )
                    )
                    acc += math.exp(ls + lg)
                for k in range(n):
                    lu = (
                        xlogy_s(2.0 * k + 1.5, eta)
                        + xlogy_s(2.0 * (n - k) - 1.0, 1.0 - eta)
                        - (4 * k + 5) * lc
                        + xlogy_s(4.0 * l + 2.0, th)
                        + 0.5 * (
                            lbinom_s(2 * k + 2 * l + 2, 2 * k + 1, lf)
                            + lbinom_s(2 * k + 2 * l + 3, 2 * k + 2, lf)
                            + lbinom_s(2 * n, 2 * k + 1, lf)
                            + lbinom_s(2 * n + 1, 2 * k + 2, lf)
                        )
                    )
                    acc += math.exp(ls + lu)
                total += acc
        return 2.0 * (1.0 - sig * sig) * total

    return type_i_xx_loops


type_i_xx_loops = _make_type_i_loops(_xlogy_scalar, _lbinom_scalar)
type_i_xx_jit = njit(_make_type_i_loops(_xlogy_jit, _lbinom_jit))


def type_i_xx_numpy(sig, eta, r, n_terms, l_terms, lf):
    lc = math.log(math.cosh(r))
    th = math.tanh(r)
    l = np.arange(l_terms)[None, :]
    total = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for n in range(n_terms):
            ls = xlogy(4.0 * n + 1.0, sig)
            if ls == -np.inf:
                continue
            k = np.arange(n + 1)[:, None]
            lg = (
                xlogy(2.0 * k + 0.5, eta)
                + xlogy(2.0 * (n - k), 1.0 - eta)
                - (4 * k + 3) * lc
                + xlogy(4.0 * l, th)
                + 0.5 * (
                    _lbinom(2 * k + 2 * l, 2 * k, lf)
                    + _lbinom(2 * k + 2 * l + 1, 2 * k + 1, lf)
                    + _lbinom(2 * n, 2 * k, lf)
                    + _lbinom(2 * n + 1, 2 * k + 1, lf)
                )
            )
            total += np.exp(ls + lg).sum()
            if n == 0:
                continue
            k = np.arange(n)[:, None]
            lu = (
                xlogy(2.0 * k + 1.5, eta)
                + xlogy(2.0 * (n - k) - 1.0, 1.0 - eta)
                - (4 * k + 5) * lc
                + xlogy(4.0 * l + 2.0, th)
                + 0.5 * (
                    _lbinom(2 * k + 2 * l + 2, 2 * k + 1, lf)
                    + _lbinom(2 * k + 2 * l + 3, 2 * k + 2, lf)
                    + _lbinom(2 * n, 2 * k + 1, lf)
                    + _lbinom(2 * n + 1, 2 * k + 2, lf)
                )
            )
            total += np.exp(ls + lu).sum()
    return float(2.0 * (1.0 - sig * sig) * total)


if USE_NUMBA:
    fock_element = fock_element_jit
    fill_density = fill_density_jit
    type_i_xx = type_i_xx_jit
else:
    fock_element = fock_element_numpy
    fill_density = fill_density_numpy
    type_i_xx = type_i_xx_numpy
