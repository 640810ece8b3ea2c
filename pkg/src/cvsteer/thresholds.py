"""Threshold curves: bisection for eta*(s, r), crossovers and 1-D sweeps.

A criterion is turned into a *margin* that is positive exactly when the
strict steering inequality holds: ``det alpha - det V`` for quadrature
measurements and ``M - 1`` for the pseudospin moment tests.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import csv
import io
import json
import math

import numpy as np

from .gaussian import TmstParams, tmst_covariance
from .pseudospin import moment_value, type_i_correlators, type_ii_correlators
from . import werner

TMST_CRITERIA = ("gaussian", "type_i", "type_ii")
WERNER_CRITERIA = ("werner_type_i", "werner_type_ii", "werner_gaussian")
PROBE_POINTS = 5
SCAN_POINTS = 2001


def criterion_margin(s, eta, r, criterion, trunc_tol=1e-10):
    """Signed distance from the steering boundary, with its own error bound."""
    p = TmstParams(s, eta, r)
    if criterion == "gaussian":
        sf = tmst_covariance(p)
        return sf.a**2 - sf.det, 0.0
    if criterion == "type_i":
        c = type_i_correlators(p, trunc_tol)
        # |d(xx^2 + yy^2)| <= 4 |xx| dxx + 2 dxx^2
        return moment_value(c).value - 1.0, 4.0 * c.error_bound + 2.0 * c.error_bound**2
    if criterion == "type_ii":
        return moment_value(type_ii_correlators(tmst_covariance(p))).value - 1.0, 0.0
    raise ValueError(f"unknown criterion {criterion!r}; expected one of {TMST_CRITERIA}")


@dataclass(frozen=True)
class ThresholdResult:
    """Located threshold; ``value`` is NaN when nothing in (0, 1] is steerable."""

    value: float
    converged: bool
    error_bound: float
    status: str
    evaluations: int = 0


def _scan_threshold(f, points):
    grid = np.linspace(0.0, 1.0, points)
    vals = np.array([f(x)[0] for x in grid])
    ok = vals > 0.0
    if not ok[-1]:
        return ThresholdResult(math.nan, False, math.nan, "nonmonotone-none", points)
    # smallest grid point from which the criterion holds all the way to 1
    first = points - 1
    while first > 0 and ok[first - 1]:
        first -= 1
    return ThresholdResult(float(grid[first]), False, float(grid[1] - grid[0]), "nonmonotone-scan", points)


def eta_threshold(s, r, criterion, tol=1e-6, trunc_tol=None):
    """Transmissivity above which ``criterion`` certifies A -> B steering.

    Plain bisection on ``[0, 1]`` after a five-point monotonicity probe.  The
    returned ``value`` satisfies margin(value + tol) > 0 >= margin(value - tol)
    as long as the margin is monotone in ``eta``.  ``trunc_tol`` defaults to
    ``tol / 100`` so series truncation cannot move the root by more than the
    bisection resolution.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    trunc_tol = tol / 100.0 if trunc_tol is None else trunc_tol
    evals = 0

    def f(eta):
        nonlocal evals
        evals += 1
        return criterion_margin(s, eta, r, criterion, trunc_tol)

    probe_x = np.linspace(0.0, 1.0, PROBE_POINTS)
    probe = [f(x) for x in probe_x]
    probe_v = np.array([v for v, _ in probe])
    slack = max(e for _, e in probe) + 1e-13
    if np.any(np.diff(probe_v) < -slack):
        res = _scan_threshold(f, SCAN_POINTS)
        return ThresholdResult(res.value, res.converged, res.error_bound, res.status, evals)
    if probe_v[-1] <= 0.0:
        return ThresholdResult(math.nan, True, 0.0, "none", evals)
    if probe_v[0] > 0.0:
        return ThresholdResult(0.0, True, 0.0, "ok", evals)
    # tighten the bracket with the probe before bisecting
    i = int(np.argmax(probe_v > 0.0))
    lo, hi = float(probe_x[i - 1]), float(probe_x[i])
    slope = (probe_v[i] - probe_v[i - 1]) / (hi - lo)
    err_margin = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v, e = f(mid)
        err_margin = max(err_margin, e)
        if v > 0.0:
            hi = mid
        else:
            lo = mid
    shift = err_margin / slope if slope > 0 else 0.0
    return ThresholdResult(0.5 * (lo + hi), True, 0.5 * (hi - lo) + shift, "ok", evals)


def small_s_limit(r=0.0, s_values=(0.02, 0.05, 0.1), criterion="type_i", tol=1e-9):
    """Extrapolate ``eta*(s -> 0)`` assuming ``eta* = e0 + e1 s^2 + e2 s^4 + ...``.

    The moment is even in ``s``, so the fit is a polynomial in ``s^2`` through
    all supplied points (degree ``len(s_values) - 1``), evaluated at 0.
    """
    etas = []
    for s in s_values:
        res = eta_threshold(s, r, criterion, tol=tol)
        if res.status != "ok":
            raise RuntimeError(f"no threshold at s={s}: {res.status}")
        etas.append(res.value)
    x = np.asarray(s_values, dtype=float) ** 2
    coeffs = np.polyfit(x, np.asarray(etas), len(x) - 1)
    return float(np.polyval(coeffs, 0.0)), etas


@dataclass(frozen=True)
class CrossoverResult:
    value: float
    converged: bool
    status: str
    diagnostics: dict = field(default_factory=dict)


def crossover_s(r, tol=1e-6, bracket=(0.3, 1.5), criteria=("type_i", "gaussian"), eta_tol=None,
                scan_points=13):
    """Squeezing above which the second criterion's eta threshold is the lower one.

    Missing thresholds count as eta* = +inf (criterion never fires).  The
    bracket is scanned on ``scan_points`` nodes first; with ``r > 0`` the first
    criterion can win only on a window of ``s``, and the upper edge of the
    last such window is bisected.  Status ``"none"`` means the first criterion
    never wins after the second one has, on the scanned nodes.
    """
    eta_tol = tol / 10.0 if eta_tol is None else eta_tol
    first, second = criteria

    def gap(s):
        t1 = eta_threshold(s, r, first, tol=eta_tol)
        t2 = eta_threshold(s, r, second, tol=eta_tol)
        v1 = math.inf if math.isnan(t1.value) else t1.value
        v2 = math.inf if math.isnan(t2.value) else t2.value
        if math.isinf(v1) and math.isinf(v2):
            return math.nan
        return v1 - v2

    nodes = np.linspace(bracket[0], bracket[1], scan_points)
    gaps = [gap(s) for s in nodes]
    diag = {"bracket": list(bracket), "r": r, "scan": [[float(s), g] for s, g in zip(nodes, gaps)]}
    # last node pair going from "first wins" (gap < 0) to "second wins" (gap > 0)
    edges = [i for i in range(scan_points - 1) if gaps[i] < 0.0 and gaps[i + 1] > 0.0]
    if not edges:
        return CrossoverResult(math.nan, False, "none", diag)
    i = edges[-1]
    lo, hi, g_lo = float(nodes[i]), float(nodes[i + 1]), gaps[i]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g = gap(mid)
        if math.isnan(g):
            diag["failed_at"] = mid
            return CrossoverResult(math.nan, False, "failed", diag)
        if (g < 0.0) == (g_lo < 0.0):
            lo, g_lo = mid, g
        else:
            hi = mid
    return CrossoverResult(0.5 * (lo + hi), True, "ok", diag)


# --------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep of a threshold.

    For TMST criteria the threshold is eta* and ``axis`` is ``"s"`` or ``"r"``
    with the other fixed in ``fixed``.  For Werner criteria the threshold is
    p_steer and ``axis`` is ``"s"``, ``"u"`` or ``"s=u"``.
    """

    axis: str
    start: float
    stop: float
    points: int
    criterion: str
    fixed: dict = field(default_factory=dict)
    tol: float = 1e-6
    trunc_tol: float = None

    def __post_init__(self):
        if self.criterion not in TMST_CRITERIA + WERNER_CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        allowed = ("s", "r") if self.criterion in TMST_CRITERIA else ("s", "u", "s=u")
        if self.axis not in allowed:
            raise ValueError(f"axis {self.axis!r} not valid for {self.criterion}; use {allowed}")
        if not self.start < self.stop:
            raise ValueError(f"need start < stop, got {self.start}, {self.stop}")
        if self.points < 2:
            raise ValueError("a sweep needs at least 2 points")
        if not self.tol > 0.0 or (self.trunc_tol is not None and not self.trunc_tol > 0.0):
            raise ValueError("tolerances must be > 0")

    def abscissae(self):
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ThresholdRow:
    abscissa: float
    threshold: float
    converged: bool
    error_bound: float


@dataclass
class ThresholdCurve:
    rows: list
    metadata: dict = field(default_factory=dict)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["abscissa", "threshold", "converged", "error_bound"])
        for row in self.rows:
            w.writerow([format_float(row.abscissa), format_float(row.threshold),
                        "true" if row.converged else "false", format_float(row.error_bound)])
        return buf.getvalue()

    def to_json(self):
        records = [asdict(r) for r in self.rows]
        for rec in records:
            for k in ("threshold", "error_bound"):
                if isinstance(rec[k], float) and not math.isfinite(rec[k]):
                    rec[k] = None
        return json.dumps({"metadata": self.metadata, "rows": records}, indent=1) + "\n"


def format_float(x):
    """Shortest round-trip repr (never more than 17 significant digits)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _sweep_point(args):
    spec, x = args
    x = float(x)
    if spec.criterion in TMST_CRITERIA:
        s = x if spec.axis == "s" else float(spec.fixed.get("s", 0.5))
        r = x if spec.axis == "r" else float(spec.fixed.get("r", 0.0))
        try:
            res = eta_threshold(s, r, spec.criterion, spec.tol, spec.trunc_tol)
        except (ValueError, RuntimeError, ArithmeticError):
            return ThresholdRow(x, math.nan, False, math.nan)
        converged = res.converged and res.status in ("ok", "none")
        return ThresholdRow(x, res.value, converged, res.error_bound)
    if spec.axis == "s=u":
        s = u = x
    else:
        s = x if spec.axis == "s" else float(spec.fixed.get("s", 1.0))
        u = x if spec.axis == "u" else float(spec.fixed.get("u", 1.0))
    fn = {
        "werner_type_i": werner.p_steer_type_i,
        "werner_type_ii": werner.p_steer_type_ii,
        "werner_gaussian": werner.p_steer_gaussian,
    }[spec.criterion]
    return ThresholdRow(x, fn(s, u), True, 0.0)


def run_sweep(spec, jobs=1):
    """Evaluate one threshold per abscissa; rows come back in abscissa order.

    Points are independent; ``jobs > 1`` farms them out to worker processes.
    A point that fails is kept as a flagged row (NaN, not converged).
    """
    tasks = [(spec, x) for x in spec.abscissae()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    meta = {
        "axis": spec.axis,
        "criterion": spec.criterion,
        "fixed": dict(spec.fixed),
        "bisection_tol": spec.tol,
        "truncation_tol": spec.tol / 100.0 if spec.trunc_tol is None else spec.trunc_tol,
        "points": spec.points,
    }
    return ThresholdCurve(rows, meta)
