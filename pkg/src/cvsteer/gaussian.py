"""Covariance-matrix algebra for two-mode Gaussian states.

Quadrature ordering is ``(q_A, p_A, q_B, p_B)`` and the vacuum has covariance
matrix equal to the identity.  Everything here is a pure function of its
arguments.
"""

from dataclasses import dataclass
import math

import numpy as np

# Tolerance on symplectic eigenvalues (nu >= 1 - BONA_FIDE_TOL) for physicality.
BONA_FIDE_TOL = 1e-9
SYMPLECTIC_TOL = 1e-10


class PhysicalityError(ValueError):
    """Covariance matrix violates V + i Omega >= 0."""


class SymplecticError(ValueError):
    """Matrix does not preserve the symplectic form."""


def omega(n_modes):
    """Symplectic form ``(i sigma_y)^{+n}`` for ``n_modes`` modes."""
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), w)


def symplectic_eigenvalues(V):
    """Symplectic spectrum of ``V``, sorted ascending, one value per mode."""
    V = np.asarray(V, dtype=float)
    n = V.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * omega(n) @ V))
    return np.sort(ev)[::2]


def _effective_tol(tol, scale):
    # entries of size `scale` carry absolute rounding ~ eps * scale**2 into
    # products like ab - c^2, so a fixed 1e-9 is unattainable for huge squeezing
    return max(tol, 16.0 * np.finfo(float).eps * scale * scale)


def is_bona_fide(V, tol=None):
    """True when ``V`` is symmetric, positive definite and ``nu_min >= 1``."""
    tol = BONA_FIDE_TOL if tol is None else tol
    V = np.asarray(V, dtype=float)
    if not np.allclose(V, V.T, atol=1e-12, rtol=0.0):
        return False
    if np.linalg.eigvalsh(V)[0] <= 0.0:
        return False
    tol = _effective_tol(tol, np.abs(V).max())
    return bool(symplectic_eigenvalues(V)[0] >= 1.0 - tol)


@dataclass(frozen=True)
class StandardForm:
    """Standard-form parameters ``(a, b, c, d)`` of a two-mode covariance matrix.

    Construction checks the bona fide condition.  Use :func:`standard_form_unchecked`
    for values that may be unphysical.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.a < 1.0 - BONA_FIDE_TOL or self.b < 1.0 - BONA_FIDE_TOL:
            raise PhysicalityError(f"a={self.a}, b={self.b}: local variances below vacuum")
        if not bool(standard_form_bona_fide(*self.astuple())):
            nu = self.min_symplectic_eigenvalue
            raise PhysicalityError(
                f"(a,b,c,d)={self.astuple()} is not bona fide: min symplectic eigenvalue {nu:.12g}"
            )

    def astuple(self):
        return (self.a, self.b, self.c, self.d)

    def matrix(self):
        return standard_form_matrix(self.a, self.b, self.c, self.d)

    @property
    def det(self):
        return (self.a * self.b - self.c**2) * (self.a * self.b - self.d**2)

    @property
    def min_symplectic_eigenvalue(self):
        return float(np.sqrt(_nu_minus_sq(*self.astuple())))

    @property
    def det_alpha(self):
        return self.a**2

    @property
    def is_tmst(self):
        return math.isclose(self.d, -self.c, rel_tol=0.0, abs_tol=1e-12)

    def normalized(self):
        """Rotate mode A by pi if needed so that ``c >= 0``.

        Returns ``(form, note)`` where ``note`` is ``None`` when nothing changed.
        The rotation flips both ``c`` and ``d`` and leaves every correlator used
        here untouched, since they depend on ``c**2``, ``d**2`` and ``det V`` only.
        """
        if self.c >= 0.0:
            return self, None
        flipped = StandardForm(self.a, self.b, -self.c, -self.d)
        return flipped, "local phase flip on A applied: (c, d) -> (-c, -d)"


def standard_form_matrix(a, b, c, d):
    return np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, d],
            [c, 0.0, b, 0.0],
            [0.0, d, 0.0, b],
        ]
    )


def standard_form_unchecked(a, b, c, d):
    """Build a :class:`StandardForm` without the physicality check."""
    sf = object.__new__(StandardForm)
    for name, val in zip("abcd", (a, b, c, d)):
        object.__setattr__(sf, name, float(val))
    return sf


def _nu_minus_sq(a, b, c, d):
    # 2 det / (Delta + sqrt(Delta^2 - 4 det)) avoids the cancellation in
    # (Delta - sqrt(...)) / 2 when Delta >> det.  The discriminant is used in
    # factored form: Delta^2 - 4 det itself cancels to ~0 near pure states and
    # the square root would magnify that rounding to ~1e-8.
    det = (a * b - c**2) * (a * b - d**2)
    delta = a**2 + b**2 + 2.0 * c * d
    disc2 = (a - b) ** 2 * (a + b) ** 2 + 4.0 * (a * c + b * d) * (b * c + a * d)
    disc = np.sqrt(np.maximum(disc2, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(delta + disc > 0, 2.0 * det / (delta + disc), 0.0)


def standard_form_bona_fide(a, b, c, d, tol=None):
    """Vectorised bona fide test straight from the standard-form invariants.

    The smaller symplectic eigenvalue satisfies
    ``nu_-^2 = (Delta - sqrt(Delta^2 - 4 det V)) / 2`` with
    ``Delta = a^2 + b^2 + 2cd``.  Works elementwise on arrays.
    """
    tol = BONA_FIDE_TOL if tol is None else tol
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    det_q = a * b - c**2
    det_p = a * b - d**2
    if tol > 0.0:
        tol = np.maximum(tol, 16.0 * np.finfo(float).eps * np.maximum(a, b) ** 2)
    return (
        (a > 0) & (b > 0) & (det_q > 0) & (det_p > 0)
        & (_nu_minus_sq(a, b, c, d) >= (1.0 - tol) ** 2)
    )


@dataclass(frozen=True)
class TmstParams:
    """Generative triple of a two-mode squeezed thermal state.

    ``s`` is the EPR squeezing, ``eta`` the attenuator transmissivity applied to
    mode A and ``r`` the squeezing of the quantum-limited amplifier that follows.
    """

    s: float
    eta: float
    r: float

    def __post_init__(self):
        for name in ("s", "eta", "r"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.s >= 0.0 and self.r >= 0.0):
            raise ValueError(f"s and r must be >= 0, got s={self.s}, r={self.r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")

    @property
    def varsigma(self):
        return math.tanh(self.s)

    @property
    def tau(self):
        return self.eta * math.cosh(self.r) ** 2

    @property
    def zeta(self):
        return (1.0 - self.eta) * math.cosh(self.r) ** 2 + math.sinh(self.r) ** 2

    def covariance(self):
        return tmst_covariance(self)


def epr_covariance(s):
    """Two-mode squeezed vacuum: ``a = b = cosh 2s``, ``c = -d = sinh 2s``.

    Negative ``s`` is accepted and simply flips the sign of ``c`` and ``d``.
    """
    ch, sh = math.cosh(2.0 * s), math.sinh(2.0 * s)
    return StandardForm(ch, ch, sh, -sh)


def tmst_covariance(p):
    """Standard form reached by attenuating then amplifying mode A of an EPR pair."""
    ch2 = math.cosh(p.r) ** 2
    b = math.cosh(2.0 * p.s)
    a = p.eta * ch2 * b + (1.0 - p.eta) * ch2 + math.sinh(p.r) ** 2
    c = math.sqrt(p.eta) * math.cosh(p.r) * math.sinh(2.0 * p.s)
    return StandardForm(a, b, c, -c)


def tmst_params_from_standard_form(a, b, c):
    """Invert the TMST parametrisation: find ``(s, eta, r)`` giving ``(a, b, c, -c)``.

    With ``tau = c^2 / (b^2 - 1)`` the relations are linear in ``cosh^2 r``:
    ``cosh^2 r = (a + 1 - tau (b - 1)) / 2`` and ``eta = tau / cosh^2 r``.
    For ``b = 1`` (no squeezing) ``c`` must vanish and ``eta = 1`` is chosen.

    Raises
    ------
    ValueError
        If the triple lies outside the reachable region, i.e. it would need
        ``cosh^2 r < 1`` or ``eta > 1``.
    """
    a, b, c = float(a), float(b), abs(float(c))
    tol = 1e-12
    if b < 1.0 - tol or a < 1.0 - tol:
        raise ValueError(f"a={a}, b={b} below vacuum level")
    s = 0.5 * math.acosh(max(b, 1.0))
    if b - 1.0 <= tol:
        if c > 1e-12:
            raise ValueError(f"c={c} must vanish when b=1")
        ch2 = 0.5 * (a + 1.0)
        eta = 1.0
    else:
        tau = c * c / (b * b - 1.0)
        ch2 = 0.5 * (a + 1.0 - tau * (b - 1.0))
        if ch2 < 1.0 - tol:
            raise ValueError(
                f"(a,b,c)=({a},{b},{c}) unreachable: needs cosh^2 r = {ch2:.12g} < 1"
            )
        ch2 = max(ch2, 1.0)
        eta = tau / ch2
        if eta > 1.0 + tol:
            raise ValueError(f"(a,b,c)=({a},{b},{c}) unreachable: needs eta = {eta:.12g} > 1")
        eta = min(eta, 1.0)
    r = math.acosh(math.sqrt(ch2))
    return TmstParams(s, eta, r)


def _check_symplectic(S):
    S = np.asarray(S, dtype=float)
    n = S.shape[0] // 2
    W = omega(n)
    err = np.abs(S @ W @ S.T - W).max()
    if err >= SYMPLECTIC_TOL:
        raise SymplecticError(f"||S Omega S^T - Omega||_inf = {err:.3e} exceeds {SYMPLECTIC_TOL:g}")
    return S


def apply_symplectic(V, S):
    """Congruence ``S V S^T`` after checking that ``S`` is symplectic."""
    V = np.asarray(V, dtype=float)
    S = _check_symplectic(S)
    if S.shape != V.shape:
        raise ValueError(f"shape mismatch: S {S.shape}, V {V.shape}")
    return S @ V @ S.T


def beam_splitter(eta):
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    t, u = math.sqrt(eta), math.sqrt(1.0 - eta)
    I = np.eye(2)
    return np.block([[t * I, -u * I], [u * I, t * I]])


def two_mode_squeezer(r):
    Z = np.diag([1.0, -1.0])
    I = np.eye(2)
    return np.block([[math.cosh(r) * I, math.sinh(r) * Z], [math.sinh(r) * Z, math.cosh(r) * I]])


def embed_two_mode(S, i, j, n_modes):
    """Lift a two-mode symplectic acting on modes ``(i, j)`` to ``n_modes`` modes."""
    out = np.eye(2 * n_modes)
    blocks = (slice(2 * i, 2 * i + 2), slice(2 * j, 2 * j + 2))
    for bi, rows in enumerate(blocks):
        for bj, cols in enumerate(blocks):
            out[rows, cols] = S[2 * bi:2 * bi + 2, 2 * bj:2 * bj + 2]
    return out


def discard_mode(V, k):
    keep = [x for x in range(V.shape[0]) if x // 2 != k]
    return V[np.ix_(keep, keep)]


def _as_standard_form(V):
    return StandardForm(V[0, 0], V[2, 2], V[0, 2], V[1, 3])


def loss_channel_on_A(sf, eta):
    """Pure-loss channel of transmissivity ``eta`` on mode A.

    For an EPR input this is ``a -> b eta + 1 - eta`` and
    ``c -> sqrt(eta (b^2 - 1))``; for a general standard form the local block
    becomes ``eta a + 1 - eta`` and both correlations scale by ``sqrt(eta)``.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    t = math.sqrt(eta)
    return StandardForm(eta * sf.a + 1.0 - eta, sf.b, t * sf.c, t * sf.d)


def amplifier_channel_on_A(sf, r):
    ch, sh = math.cosh(r), math.sinh(r)
    return StandardForm(ch * ch * sf.a + sh * sh, sf.b, ch * sf.c, ch * sf.d)


def channel_pipeline(p):
    """Covariance of the TMST state built mode by mode through the ancilla scheme.

    EPR(AB) + vacuum(A') -> beam splitter on (A, A') -> drop A'
    -> + vacuum(A'') -> two-mode squeezer on (A, A'') -> drop A''.
    """
    V = epr_covariance(p.s).matrix()
    V = np.block([[V, np.zeros((4, 2))], [np.zeros((2, 4)), np.eye(2)]])
    V = apply_symplectic(V, embed_two_mode(beam_splitter(p.eta), 0, 2, 3))
    V = discard_mode(V, 2)
    V = np.block([[V, np.zeros((4, 2))], [np.zeros((2, 4)), np.eye(2)]])
    V = apply_symplectic(V, embed_two_mode(two_mode_squeezer(p.r), 0, 2, 3))
    return discard_mode(V, 2)


def gaussian_steering_gap(sf):
    """``det alpha - det V``; positive exactly when A can steer B with quadratures."""
    V = sf.matrix()
    return float(np.linalg.det(V[:2, :2]) - np.linalg.det(V))


def is_gaussian_steerable_AtoB(sf):
    """Strict test ``det alpha > det V``; equality counts as not steerable."""
    if not isinstance(sf, StandardForm):
        raise TypeError("expected a StandardForm")
    return gaussian_steering_gap(sf) > 0.0


def wigner_at(sf, xi):
    """Wigner function of the zero-mean Gaussian state at phase-space point ``xi``."""
    V = sf.matrix()
    det = np.linalg.det(V)
    if det <= 0.0:
        raise np.linalg.LinAlgError("singular covariance matrix")
    xi = np.asarray(xi, dtype=float)
    quad = xi @ np.linalg.solve(V, xi)
    return float(np.exp(-quad) / (math.pi**2 * math.sqrt(det)))
