"""Four-dimensional Hermite polynomials at the origin for TMST-shaped Theta.

The matrix is ``Theta = -[[0, e, f, 0], [e, 0, 0, g], [f, 0, 0, e], [0, g, e, 0]]``
so that ``exp(-x^T Theta x / 2) = exp(e x1 x2 + f x1 x3 + g x2 x4 + e x3 x4)``.
The closed form is a single finite sum; a truncated power-series expansion of
the generating function serves as an independent oracle.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

from .fock import FockElementIndex
from .gaussian import tmst_covariance, tmst_params_from_standard_form

ORACLE_MAX_DEGREE = 12


@dataclass(frozen=True)
class ThetaParams:
    e: float
    f: float
    g: float

    def matrix(self):
        e, f, g = self.e, self.f, self.g
        return -np.array([[0, e, f, 0], [e, 0, 0, g], [f, 0, 0, e], [0, g, e, 0]], dtype=float)


def theta_from_standard_form(a, b, c):
    den = (a + 1.0) * (b + 1.0) - c * c
    if den == 0.0:
        raise ValueError(f"(a+1)(b+1) = c^2 for (a,b,c)=({a},{b},{c})")
    return ThetaParams(
        2.0 * c / den,
        ((a - 1.0) * (b + 1.0) - c * c) / den,
        ((a + 1.0) * (b - 1.0) - c * c) / den,
    )


def _lbinom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _ipow(x, n):
    # exact zero-power convention, independent of the sign of x
    return 1.0 if n == 0 else x**n


def hermite_at_origin(idx, th):
    """``H^(Theta)_{m1,m2,n1,n2}(0)`` from the single-sum closed form.

    The factor ``e^(m2+n2) f^(m1-m2) (f g / e^2)^k`` is evaluated as
    ``e^(m2+n2-2k) f^(m1-m2+k) g^k``; all three exponents are nonnegative on
    the summation range, so ``e = 0`` or ``f = 0`` need no special casing.
    """
    m1, m2, n1, n2 = FockElementIndex.validated(*idx)
    if m1 + n2 != n1 + m2:
        return 0.0
    total = 0.0
    for k in range(max(0, m2 - m1), min(m2, n2) + 1):
        w = math.exp(0.5 * (_lbinom(m2, k) + _lbinom(n2, k) + _lbinom(m1, m2 - k) + _lbinom(n1, n2 - k)))
        total += w * _ipow(th.e, m2 + n2 - 2 * k) * _ipow(th.f, m1 - m2 + k) * _ipow(th.g, k)
    lfac = 0.5 * sum(math.lgamma(n + 1.0) for n in (m1, m2, n1, n2))
    return math.exp(lfac) * total


def _poly_mul(p, q, max_degree):
    out = {}
    for ep, cp in p.items():
        dp = sum(ep)
        for eq, cq in q.items():
            if dp + sum(eq) > max_degree:
                continue
            key = tuple(x + y for x, y in zip(ep, eq))
            out[key] = out.get(key, 0.0) + cp * cq
    return out


def _generating_coefficients(th, max_degree):
    # exp(Q) with Q = e x1 x2 + f x1 x3 + g x2 x4 + e x3 x4, summed as Q^j / j!
    Q = {(1, 1, 0, 0): th.e, (1, 0, 1, 0): th.f, (0, 1, 0, 1): th.g, (0, 0, 1, 1): th.e}
    Q = {k: v for k, v in Q.items() if v != 0.0}
    series = {(0, 0, 0, 0): 1.0}
    term = {(0, 0, 0, 0): 1.0}
    for j in range(1, max_degree // 2 + 1):
        term = _poly_mul(term, Q, max_degree)
        term = {k: v / j for k, v in term.items()}
        for k, v in term.items():
            series[k] = series.get(k, 0.0) + v
    return series


def hermite_taylor_oracle(idx, th, max_degree=None):
    """Hermite value read off the Taylor expansion of the generating function.

    ``H = (-1)^N m1! m2! n1! n2! [x^idx] exp(-x^T Theta x / 2)`` with ``N`` the
    total degree.  Limited to total degree :data:`ORACLE_MAX_DEGREE`.
    """
    m1, m2, n1, n2 = FockElementIndex.validated(*idx)
    degree = m1 + m2 + n1 + n2
    if degree > ORACLE_MAX_DEGREE:
        raise ValueError(f"total degree {degree} exceeds oracle limit {ORACLE_MAX_DEGREE}")
    coeffs = _generating_coefficients(th, degree if max_degree is None else max_degree)
    c = coeffs.get((m1, m2, n1, n2), 0.0)
    fact = math.factorial(m1) * math.factorial(m2) * math.factorial(n1) * math.factorial(n2)
    return (-1.0) ** degree * fact * c


def hermite_table_oracle(th, max_degree):
    """All oracle values up to ``max_degree`` from one expansion, keyed by index."""
    coeffs = _generating_coefficients(th, max_degree)
    out = {}
    for key, c in coeffs.items():
        fact = math.prod(math.factorial(x) for x in key)
        out[key] = (-1.0) ** sum(key) * fact * c
    return out


def fock_from_hermite(sf, idx):
    """Fock element ``4 H(0) / (sqrt(det(V + 1)) sqrt(m1! m2! n1! n2!))``.

    ``sf`` must be a TMST standard form (``d = -c``) that some loss plus
    amplifier channel reaches; otherwise ``ValueError`` is raised.
    """
    if not sf.is_tmst:
        raise ValueError("Fock correspondence requires d = -c")
    tmst_params_from_standard_form(sf.a, sf.b, sf.c)
    m1, m2, n1, n2 = FockElementIndex.validated(*idx)
    th = theta_from_standard_form(sf.a, sf.b, sf.c)
    h = hermite_at_origin((m1, m2, n1, n2), th)
    det = np.linalg.det(sf.matrix() + np.eye(4))
    lfac = 0.5 * sum(math.lgamma(n + 1.0) for n in (m1, m2, n1, n2))
    return 4.0 * h / math.sqrt(det) * math.exp(-lfac)


def det_relation_check(p):
    """``|(1 - tanh^2 s) / cosh^2 r - 4 / sqrt(det(V + 1))|`` for a TMST triple."""
    V = tmst_covariance(p).matrix()
    lhs = (1.0 - math.tanh(p.s) ** 2) / math.cosh(p.r) ** 2
    rhs = 4.0 / math.sqrt(np.linalg.det(V + np.eye(4)))
    return abs(lhs - rhs)

