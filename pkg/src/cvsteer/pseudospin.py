"""Pseudospin correlators and the second-moment steering test.

Type-i operators are built from Fock-parity ladder pairs, type-ii from even
and odd position superpositions.  The steering witness is
``M = <x x>^2 + <y y>^2 + <z z>^2 > 1``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate, optimize

from . import _kernels
from .fock import _log_factorials, thermal_ratio_A
from .gaussian import standard_form_bona_fide, tmst_covariance

# usable ceilings for the type-i double sum (beyond these the sums get long)
S_CEILING = 2.0
R_CEILING = 1.5
MAX_TERMS = 20000


@dataclass(frozen=True)
class CorrelatorTriple:
    xx: float
    yy: float
    zz: float
    error_bound: float = 0.0

    def __post_init__(self):
        for name in ("xx", "yy", "zz"):
            v = float(getattr(self, name))
            if not abs(v) <= 1.0 + 1e-12 + self.error_bound:
                raise ValueError(f"correlator {name}={v} outside [-1, 1]")
            object.__setattr__(self, name, v)

    def astuple(self):
        return (self.xx, self.yy, self.zz)


@dataclass(frozen=True)
class MomentValue:
    value: float
    steerable: bool


def moment_value(c):
    """``xx^2 + yy^2 + zz^2``; steering is certified only when strictly above 1."""
    value = c.xx**2 + c.yy**2 + c.zz**2
    return MomentValue(value, value > 1.0)


def gudermannian(z):
    return 2.0 * np.arctan(np.exp(z)) - 0.5 * np.pi


def epr_moment_type_i(s):
    return 1.0 + 2.0 * np.tanh(2.0 * np.asarray(s, dtype=float)) ** 2


def epr_moment_type_ii(s):
    return 1.0 + (8.0 / np.pi**2) * gudermannian(2.0 * np.asarray(s, dtype=float)) ** 2


# --------------------------------------------------------------------------
# type i


def type_i_truncation(p, tol):
    """Term counts ``(n_terms, l_terms)`` and the bound on what they leave out.

    Every term of the double sum is nonnegative and, by Cauchy-Schwarz,
    the dropped part is dominated by the photon-number probability of
    ``n_B >= 2 n_terms`` (ratio ``tanh^4 s`` per ``n``) plus that of
    ``n_A >= 2 l_terms`` (ratio ``x^2`` per ``l``, ``x = (a-1)/(a+1)``).
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    q_n = p.varsigma**4
    q_l = thermal_ratio_A(p) ** 2

    def count(q):
        if q == 0.0:
            return 1
        return max(1, math.ceil(math.log(tol / 2.0) / math.log(q)))

    n_terms, l_terms = count(q_n), count(q_l)
    if n_terms > MAX_TERMS or l_terms > MAX_TERMS:
        raise ValueError(
            f"type-i sums need {n_terms} x {l_terms} terms at tol={tol:g}; "
            f"parameters s={p.s}, r={p.r} are beyond the usable range"
        )
    bound = q_n**n_terms + q_l**l_terms
    return n_terms, l_terms, bound


def type_i_correlators(p, tol=1e-10):
    """Type-i correlators of ``rho_TMST(s, eta, r)``.

    ``xx`` is the double series over ``(n, l)`` truncated so that the neglected
    part is provably below ``tol`` (reported as ``error_bound``); ``yy = -xx``
    and ``zz`` is the parity ``1 / sqrt(det V)``.
    """
    if p.s > S_CEILING or p.r > R_CEILING:
        raise ValueError(
            f"s={p.s}, r={p.r} beyond usable ceilings s<={S_CEILING}, r<={R_CEILING}"
        )
    n_terms, l_terms, bound = type_i_truncation(p, tol)
    lf = _log_factorials(2 * (n_terms + l_terms) + 4)
    xx = _kernels.type_i_xx(p.varsigma, p.eta, p.r, n_terms, l_terms, lf)
    zz = 1.0 / math.sqrt(tmst_covariance(p).det)
    return CorrelatorTriple(xx, -xx, zz, bound)


def pseudospin_matrices(cutoff):
    """Truncated single-mode ``(S^x, S^y, S^z)`` in the Fock basis."""
    if cutoff % 2:
        raise ValueError("cutoff must be even so ladder pairs are complete")
    sx = np.zeros((cutoff, cutoff))
    sy = np.zeros((cutoff, cutoff), dtype=complex)
    for n in range(0, cutoff, 2):
        sx[n, n + 1] = sx[n + 1, n] = 1.0
        sy[n, n + 1] = 1j
        sy[n + 1, n] = -1j
    sz = np.diag([(-1.0) ** (n + 1) for n in range(cutoff)])
    return sx, sy, sz


def fock_expectation(rho, op_a, op_b):
    """``tr[rho (op_a (x) op_b)]`` with ``rho`` indexed ``[m1, m2, n1, n2]``."""
    return complex(np.einsum("ijkl,ki,lj->", rho, op_a, op_b))


# --------------------------------------------------------------------------
# type ii


def type_ii_correlators(sf):
    """Type-ii correlators of an arbitrary two-mode Gaussian standard form."""
    a, b, c, d = sf.astuple()
    det = sf.det
    xx = (2.0 / math.pi) * math.atan(math.sqrt(c * c / (a * b - c * c)))
    yy = (2.0 / math.pi) / math.sqrt(det) * math.atan(math.sqrt(d * d / (a * b - d * d)))
    zz = 1.0 / math.sqrt(det)
    return CorrelatorTriple(xx, yy, zz)


def type_ii_xx_quadrature(sf, epsabs=1e-10):
    """``<sgn q_A sgn q_B>`` by adaptive quadrature of the position marginal.

    The marginal of ``(q_A, q_B)`` is Gaussian with covariance ``[[a, c], [c, b]] / 2``.
    By symmetry the expectation equals ``4 P(q_A > 0, q_B > 0) - 1``.
    """
    a, b, c = sf.a, sf.b, sf.c
    cov = 0.5 * np.array([[a, c], [c, b]])
    inv = np.linalg.inv(cov)
    norm = 1.0 / (2.0 * math.pi * math.sqrt(np.linalg.det(cov)))

    def density(y, x):
        return norm * math.exp(-0.5 * (inv[0, 0] * x * x + 2 * inv[0, 1] * x * y + inv[1, 1] * y * y))

    pp, _ = integrate.dblquad(density, 0.0, np.inf, 0.0, np.inf, epsabs=epsabs, epsrel=1e-12)
    return 4.0 * pp - 1.0


def _moment_type_ii_arrays(a, b, c, d):
    with np.errstate(divide="ignore", invalid="ignore"):
        det = (a * b - c**2) * (a * b - d**2)
        xx = (2.0 / np.pi) * np.arctan(np.sqrt(c**2 / (a * b - c**2)))
        yy = (2.0 / np.pi) / np.sqrt(det) * np.arctan(np.sqrt(d**2 / (a * b - d**2)))
        return xx**2 + yy**2 + 1.0 / det


def _gaussian_unsteerable(a, b, c, d):
    return a**2 <= (a * b - c**2) * (a * b - d**2)


def _feasible(a, b, c, d):
    # exact physicality (zero slack): an optimiser would otherwise climb into
    # the tolerance band just below the vacuum
    return (
        (np.asarray(a) >= 1.0) & (np.asarray(b) >= 1.0)
        & standard_form_bona_fide(a, b, c, d, tol=0.0)
        & _gaussian_unsteerable(a, b, c, d)
    )


@dataclass(frozen=True)
class NogoResult:
    grid_max: float
    grid_argmax: tuple
    refined_max: float
    refined_argmax: tuple
    feasible_points: int


def type_ii_nogo_scan(points=15, a_max=3.0, c_max=2.0, refine_starts=8, seed=0):
    """Largest type-ii moment over Gaussian-unsteerable physical standard forms.

    A ``points^4`` grid over ``a, b in [1, a_max]`` and ``c, d in [-c_max, c_max]``
    is scanned first; the best feasible grid points then seed Nelder-Mead
    searches in which infeasible points score ``-inf``.  Feasibility is
    checked with zero tolerance.
    """
    if points < 2:
        raise ValueError("grid needs at least 2 points per axis")
    ab = np.linspace(1.0, a_max, points)
    cd = np.linspace(-c_max, c_max, points)
    if points % 2 == 0:
        cd = np.sort(np.append(cd, 0.0))
    A, B, C, D = np.meshgrid(ab, ab, cd, cd, indexing="ij")
    feasible = _feasible(A, B, C, D)
    n_feasible = int(feasible.sum())
    if n_feasible == 0:
        raise ValueError("grid contains no Gaussian-unsteerable physical point")
    M = np.where(feasible, _moment_type_ii_arrays(A, B, C, D), -np.inf)
    flat = np.argsort(M, axis=None)[::-1]
    best = np.unravel_index(flat[0], M.shape)
    grid_max = float(M[best])
    grid_argmax = (float(A[best]), float(B[best]), float(C[best]), float(D[best]))

    def negM(x):
        a, b, c, d = x
        if not _feasible(a, b, c, d):
            return np.inf
        return -float(_moment_type_ii_arrays(a, b, c, d))

    rng = np.random.default_rng(seed)
    refined_max, refined_argmax = grid_max, grid_argmax
    starts = [np.array([A[i], B[i], C[i], D[i]]) for i in
              (np.unravel_index(f, M.shape) for f in flat[:refine_starts])]
    starts += [x + rng.normal(scale=0.05, size=4) for x in starts[:2]]
    for x0 in starts:
        x0 = np.asarray(x0, dtype=float)
        x0[:2] = np.maximum(x0[:2], 1.0)
        if not np.isfinite(negM(x0)):
            continue
        res = optimize.minimize(negM, x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if np.isfinite(res.fun) and -res.fun > refined_max:
            refined_max = float(-res.fun)
            refined_argmax = tuple(float(v) for v in res.x)
    return NogoResult(grid_max, grid_argmax, refined_max, refined_argmax, n_feasible)


def moment_type_i(p, tol=1e-10):
    return moment_value(type_i_correlators(p, tol))


def moment_type_ii(sf):
    return moment_value(type_ii_correlators(sf))

