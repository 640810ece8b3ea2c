"""Fock-basis density matrices of two-mode squeezed thermal states.

The closed form evaluates ``<m1 m2| rho |n1 n2>`` as a single finite sum.
Before exponentiating, the eta powers are grouped as
``eta^((m2+n2)/2 - k) (1-eta)^k`` and the r powers as
``sinh(r)^(2(m1-m2+k)) / cosh(r)^(m1+n1+2)``.  Every exponent is then
nonnegative on the summation range, so eta in {0, 1} and r = 0 are ordinary
points.

Two independent routes back it up: composing the loss and amplifier maps on
dyads, and tracing the ancillas out of the purified four-mode state vector.
"""

from dataclasses import dataclass, field
import csv
import json
import math
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .gaussian import TmstParams, tmst_covariance


class TruncationError(RuntimeError):
    """Requested truncation discards more probability than allowed."""


class FockElementIndex(NamedTuple):
    m1: int
    m2: int
    n1: int
    n2: int

    @classmethod
    def parse(cls, text):
        parts = [int(x) for x in str(text).split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated indices, got {text!r}")
        return cls.validated(*parts)

    @classmethod
    def validated(cls, m1, m2, n1, n2):
        idx = cls(int(m1), int(m2), int(n1), int(n2))
        if min(idx) < 0:
            raise ValueError(f"Fock indices must be >= 0, got {tuple(idx)}")
        return idx


_LF_CACHE = {"table": _kernels.log_factorial_table(256)}


def _log_factorials(n):
    table = _LF_CACHE["table"]
    if table.size <= n:
        table = _kernels.log_factorial_table(max(n, 2 * table.size))
        _LF_CACHE["table"] = table
    return table


def _lbinom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def thermal_ratio_A(p):
    """Geometric ratio ``x = (a-1)/(a+1)`` of mode A's thermal photon statistics."""
    a = tmst_covariance(p).a
    return (a - 1.0) / (a + 1.0)


def tail_bound(p, cutoff):
    """Upper bound on the probability carried by photon numbers ``>= cutoff``.

    Both reduced states are thermal: mode B with ratio ``tanh^2 s`` and mode A
    with ratio ``(a-1)/(a+1)``, so ``P(n_B >= N) + P(n_A >= N)`` bounds the
    mass outside the ``N x N`` photon-number box.
    """
    return p.varsigma ** (2 * cutoff) + thermal_ratio_A(p) ** cutoff


def default_cutoff(p, tol=1e-14, max_cutoff=2000):
    """Smallest cutoff whose :func:`tail_bound` is below ``tol``."""
    x = max(p.varsigma**2, thermal_ratio_A(p))
    if x == 0.0:
        return 1
    n = max(1, math.ceil(math.log(tol / 2.0) / math.log(x)))
    while tail_bound(p, n) >= tol:
        n += 1
    if n > max_cutoff:
        raise TruncationError(f"cutoff {n} needed for tail {tol:g} exceeds {max_cutoff}")
    return n


def tmst_fock_element(p, idx):
    """``<m1 m2| rho_TMST(s, eta, r) |n1 n2>`` from the closed-form finite sum."""
    m1, m2, n1, n2 = FockElementIndex.validated(*idx)
    lf = _log_factorials(max(m1, m2, n1, n2) + 1)
    return float(_kernels.fock_element(p.varsigma, p.eta, p.r, m1, m2, n1, n2, lf))


def loss_map_on_dyad(m, n, eta, cutoff=None):
    """Image of ``|m><n|`` under the pure-loss channel, as a dense matrix.

    Coefficient of ``|m-k><n-k|`` is
    ``sqrt(C(m,k) C(n,k)) eta^((m+n)/2 - k) (1-eta)^k``.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    cutoff = max(m, n) + 1 if cutoff is None else cutoff
    out = np.zeros((cutoff, cutoff))
    for k in range(min(m, n) + 1):
        if m - k >= cutoff or n - k >= cutoff:
            continue
        e_eta = 0.5 * (m + n) - k
        coeff = math.exp(0.5 * (_lbinom(m, k) + _lbinom(n, k)))
        coeff *= (eta**e_eta if e_eta else 1.0) * ((1.0 - eta) ** k if k else 1.0)
        out[m - k, n - k] = coeff
    return out


def _amplifier_cutoff(m, n, r, tol):
    t2 = math.tanh(r) ** 2
    if t2 == 0.0:
        return max(m, n) + 1
    mm = max(m, n)
    l = 0
    while True:
        # diagonal weight C(mm+l, mm) t^(2l) / cosh^(2mm+2); once the term ratio
        # q < 1 the remainder is a geometric tail bounded by term * q / (1 - q)
        term = math.exp(_lbinom(mm + l, mm) + l * math.log(t2) - (2 * mm + 2) * math.log(math.cosh(r)))
        q = (mm + l + 1) / (l + 1) * t2
        if q < 1.0 and term * q / (1.0 - q) < tol:
            return mm + l + 1
        l += 1


def amplifier_map_on_dyad(m, n, r, cutoff=None, tol=1e-14):
    """Image of ``|m><n|`` under the quantum-limited amplifier of squeezing ``r``.

    Coefficient of ``|m+l><n+l|`` is
    ``cosh(r)^-(m+n+2) sqrt(C(m+l,m) C(n+l,n)) tanh(r)^(2l)``.  Without an
    explicit cutoff the series stops once the discarded tail is below ``tol``.
    """
    if r < 0.0:
        raise ValueError(f"r must be >= 0, got {r}")
    cutoff = _amplifier_cutoff(m, n, r, tol) if cutoff is None else cutoff
    out = np.zeros((cutoff, cutoff))
    lc = math.log(math.cosh(r))
    th = math.tanh(r)
    # r = 0 is the identity channel: only l = 0 survives
    for l in range(cutoff - max(m, n) if th > 0.0 else min(1, cutoff - max(m, n))):
        lt = 2 * l * math.log(th) if l else 0.0
        out[m + l, n + l] = math.exp(
            0.5 * (_lbinom(m + l, m) + _lbinom(n + l, n)) + lt - (m + n + 2) * lc
        )
    return out


def channel_on_dyad(m, n, eta, r, cutoff):
    """Amplifier after loss applied to ``|m><n|``, by composing the two dyad maps."""
    lossy = loss_map_on_dyad(m, n, eta, cutoff=max(m, n) + 1)
    out = np.zeros((cutoff, cutoff))
    for i, j in zip(*np.nonzero(lossy)):
        out += lossy[i, j] * amplifier_map_on_dyad(int(i), int(j), r, cutoff=cutoff)
    return out


def tmst_element_by_composition(p, idx):
    """Same matrix element as :func:`tmst_fock_element`, via the dyad maps."""
    m1, m2, n1, n2 = FockElementIndex.validated(*idx)
    cutoff = max(m1, n1) + 1
    sig = p.varsigma
    block = channel_on_dyad(m2, n2, p.eta, p.r, cutoff)
    return float((1.0 - sig * sig) * sig ** (m2 + n2) * block[m1, n1])


def purified_state_vector(p, cutoff, tol=1e-12):
    """Amplitudes of the four-mode pure state on ``A, B, A', A''``.

    Entry ``[k + l, m, m - k, l]`` holds
    ``sqrt(1-sig^2) sig^m sqrt(C(m,k) eta^k (1-eta)^(m-k)) cosh(r)^-(k+1)
    sqrt(C(k+l, k)) tanh(r)^l``; everything beyond ``cutoff`` in any mode is
    dropped.

    Raises
    ------
    TruncationError
        When the a-priori bound on the discarded squared norm exceeds ``tol``.
    """
    bound = tail_bound(p, cutoff)
    if bound > tol:
        raise TruncationError(
            f"cutoff {cutoff} discards up to {bound:.3e} of the norm (allowed {tol:g})"
        )
    sig, eta, r = p.varsigma, p.eta, p.r
    m = np.arange(cutoff)[:, None, None]
    k = np.arange(cutoff)[None, :, None]
    l = np.arange(cutoff)[None, None, :]
    valid = (k <= m) & (k + l < cutoff)
    kk = np.where(valid, k, 0)
    mm = np.broadcast_to(m, valid.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_amp = (
            0.5 * math.log1p(-sig * sig)
            + np.where(mm == 0, 0.0, mm * np.log(sig) if sig > 0 else -np.inf)
            + 0.5 * _lbinom(mm, np.minimum(kk, mm))
            + 0.5 * np.where(kk == 0, 0.0, kk * math.log(eta) if eta > 0 else -np.inf)
            + 0.5 * np.where(mm - kk == 0, 0.0, (mm - kk) * math.log1p(-eta) if eta < 1 else -np.inf)
            - (kk + 1) * math.log(math.cosh(r))
            + 0.5 * _lbinom(kk + l, kk)
            + np.where(l == 0, 0.0, l * math.log(math.tanh(r)) if r > 0 else -np.inf)
        )
        amp = np.where(valid, np.exp(log_amp), 0.0)
    psi = np.zeros((cutoff,) * 4)
    mi, ki, li = np.nonzero(valid)
    psi[ki + li, mi, mi - ki, li] = amp[mi, ki, li]
    return psi


def trace_out_ancillas(psi, keep=None):
    """Reduced state on ``A, B``; optionally only the ``keep x keep`` photon box."""
    keep = psi.shape[0] if keep is None else keep
    sub = psi[:keep, :keep].reshape(keep * keep, -1)
    rho = sub @ sub.T
    return rho.reshape(keep, keep, keep, keep)


@dataclass(frozen=True)
class TruncatedDensityMatrix:
    """Dense ``rho[m1, m2, n1, n2]`` for photon numbers below ``cutoff``."""

    cutoff: int
    elements: np.ndarray = field(repr=False)
    tail_bound: float = 0.0
    params: TmstParams = None

    def element(self, m1, m2, n1, n2):
        return float(self.elements[m1, m2, n1, n2])

    def matrix(self):
        n = self.cutoff
        return self.elements.reshape(n * n, n * n)

    def trace(self):
        return float(np.einsum("abab->", self.elements))

    def parity_sum(self):
        """``sum (-1)^(m1+m2) rho(m1, m2, m1, m2)``, the photon-number parity."""
        diag = np.einsum("abab->ab", self.elements)
        sign = (-1.0) ** np.add.outer(np.arange(self.cutoff), np.arange(self.cutoff))
        return float((sign * diag).sum())

    def records(self, threshold=0.0):
        idx = np.argwhere(np.abs(self.elements) > threshold)
        return [(int(a), int(b), int(c), int(d), float(self.elements[a, b, c, d])) for a, b, c, d in idx]

    def dump_csv(self, path, threshold=0.0):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["m1", "m2", "n1", "n2", "value"])
            for *ix, v in self.records(threshold):
                w.writerow([*ix, repr(v)])

    def dump_json(self, path, threshold=0.0):
        rows = [dict(zip(("m1", "m2", "n1", "n2", "value"), rec)) for rec in self.records(threshold)]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"cutoff": self.cutoff, "tail_bound": self.tail_bound, "elements": rows}, fh)
            fh.write("\n")


def truncated_tmst_density(p, cutoff):
    """All closed-form elements with every photon number below ``cutoff``."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    lf = _log_factorials(2 * cutoff + 2)
    elements = _kernels.fill_density(p.varsigma, p.eta, p.r, int(cutoff), lf)
    return TruncatedDensityMatrix(int(cutoff), elements, tail_bound(p, cutoff), p)
