"""Continuous-variable Werner states: EPR pair mixed with a thermal product.

``rho_W = p EPR(s) + (1 - p) thermal(u) (x) thermal(u)``, with the shorthands
``v = tanh 2s`` and ``w = tanh^2 2u``.  Thresholds are returned clamped to
``[0, 1]``; a value of 1 means no ``p`` satisfies the strict inequality.
"""

from dataclasses import dataclass
import math

from .gaussian import StandardForm
from .pseudospin import CorrelatorTriple, gudermannian


@dataclass(frozen=True)
class WernerParams:
    p: float
    s: float
    u: float

    def __post_init__(self):
        for name in ("p", "s", "u"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.s < 0.0 or self.u < 0.0:
            raise ValueError(f"s and u must be >= 0, got s={self.s}, u={self.u}")

    @classmethod
    def symmetric(cls, p, s):
        """Werner state whose thermal noise matches the squeezing, ``u = s``."""
        return cls(p, s, s)

    @property
    def v(self):
        return math.tanh(2.0 * self.s)

    @property
    def w(self):
        return math.tanh(2.0 * self.u) ** 2


def _vw(s, u):
    if s < 0.0 or u < 0.0:
        raise ValueError(f"s and u must be >= 0, got s={s}, u={u}")
    return math.tanh(2.0 * s), math.tanh(2.0 * u) ** 2


def _clamp(value, clamp):
    if not clamp:
        return value
    return min(max(value, 0.0), 1.0)


def werner_type_i_correlators(wp):
    v, w = wp.v, wp.w
    return CorrelatorTriple(wp.p * v, -wp.p * v, wp.p * w + 1.0 - w)


def werner_type_ii_correlators(wp):
    g = (2.0 * wp.p / math.pi) * float(gudermannian(2.0 * wp.s))
    zz = wp.p + (1.0 - wp.p) / math.cosh(2.0 * wp.u) ** 2
    return CorrelatorTriple(g, g, zz)


def type_i_quadratic(p, s, u):
    """Left side of ``M^(i) - 1 > 0`` after dividing by ``2 v^2 + w^2``."""
    v, w = _vw(s, u)
    den = 2.0 * v * v + w * w
    return p * p + 2.0 * w * (1.0 - w) / den * p - w * (2.0 - w) / den


def p_steer_type_i(s, u, clamp=True):
    """Smallest mixing weight above which type-i pseudospins certify steering.

    ``s = u = 0`` leaves a separable family; 1 is returned (never steerable).
    """
    v, w = _vw(s, u)
    den = 2.0 * v * v + w * w
    if den == 0.0:
        return 1.0
    value = (math.sqrt(w * (w - 2.0 * v * v * w + 4.0 * v * v)) - w * (1.0 - w)) / den
    return _clamp(value, clamp)


def p_steer_type_ii(s, u, clamp=True):
    _, w = _vw(s, u)
    g2 = float(gudermannian(2.0 * s)) ** 2
    den = (8.0 / math.pi) * g2 + math.pi * w * w
    if den == 0.0:
        return 1.0
    num = math.sqrt(w * (math.pi**2 * w + 8.0 * (2.0 - w) * g2)) - math.pi * w * (1.0 - w)
    return _clamp(num / den, clamp)


def werner_covariance(wp):
    ch_s, ch_u = math.cosh(2.0 * wp.s), math.cosh(2.0 * wp.u)
    a = wp.p * ch_s + (1.0 - wp.p) * ch_u
    c = wp.p * math.sinh(2.0 * wp.s)
    return StandardForm(a, a, c, -c)


def gaussian_quadratic_coefficients(s, u):
    """``(A, B, C)`` with ``a - a^2 + c^2 = A p^2 + B p + C`` along the Werner family."""
    cs, cu = math.cosh(2.0 * s), math.cosh(2.0 * u)
    return 2.0 * cs * cu - cu * cu - 1.0, (cs - cu) * (1.0 - 2.0 * cu), cu * (1.0 - cu)


def p_steer_gaussian(s, u, clamp=True):
    """Threshold for steering by quadrature measurements, ``a > a^2 - c^2``.

    The printed closed form divides by ``4 c_s c_u - 2 (c_u^2 + 1)``, which
    vanishes along a curve in the ``(s, u)`` plane; the algebraically equal
    rationalised root ``-2C / (B + sqrt(B^2 - 4AC))`` is used there.
    """
    cs, cu = math.cosh(2.0 * s), math.cosh(2.0 * u)
    A, B, C = gaussian_quadratic_coefficients(s, u)
    disc = B * B - 4.0 * A * C
    den = 4.0 * cs * cu - 2.0 * (cu * cu + 1.0)
    if disc < 0.0:
        return 1.0
    root = math.sqrt(disc)
    if abs(den) > 1e-6 * max(1.0, cs * cu):
        num = (
            math.sqrt(cs * cs * (1.0 - 2.0 * cu) ** 2 - 2.0 * cs * cu + cu * (4.0 - 3.0 * cu))
            + cs * (2.0 * cu - 1.0) - 2.0 * cu * cu + cu
        )
        value = num / den
    elif B + root != 0.0:
        value = -2.0 * C / (B + root)
    else:
        return 1.0
    return _clamp(value, clamp)


def werner_thresholds(s, u):
    """All three thresholds together with never-steerable flags."""
    out = {}
    for name, fn in (("type_i", p_steer_type_i), ("type_ii", p_steer_type_ii),
                     ("gaussian", p_steer_gaussian)):
        raw = fn(s, u, clamp=False)
        val = fn(s, u)
        out[name] = {"p": val, "never_steerable": raw >= 1.0}
    return out
