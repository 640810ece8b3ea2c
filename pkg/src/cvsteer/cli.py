"""Command-line front end.

Exit codes: 0 success, 1 verification or numerical failure, 2 usage error.
``CVSTEER_TOL`` overrides the default tolerance of every subcommand.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from ._accel import backend_name
from .figures import FIGURES, build_figure
from .fock import FockElementIndex, TruncationError, default_cutoff, tail_bound, tmst_fock_element
from .fock import truncated_tmst_density
from .gaussian import (
    PhysicalityError, StandardForm, TmstParams, gaussian_steering_gap,
    tmst_covariance, tmst_params_from_standard_form,
)
from .hermite import fock_from_hermite, hermite_at_origin, theta_from_standard_form
from .pseudospin import moment_value, type_i_correlators, type_ii_correlators
from .thresholds import SweepSpec, crossover_s, eta_threshold, format_float, run_sweep
from .verify import run_verify
from .werner import (
    WernerParams, werner_covariance, werner_thresholds, werner_type_i_correlators,
    werner_type_ii_correlators,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CRITERIA = ("gaussian", "type-i", "type-ii")


class UsageError(Exception):
    pass


def _env_tol(fallback):
    raw = os.environ.get("CVSTEER_TOL")
    if raw is None:
        return fallback
    try:
        val = float(raw)
    except ValueError:
        raise UsageError(f"CVSTEER_TOL={raw!r} is not a number") from None
    if not val > 0.0:
        raise UsageError(f"CVSTEER_TOL must be > 0, got {raw}")
    return val


def _floats(text, n, name):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{name} expects {n} comma-separated numbers") from None
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"{name} expects {n} comma-separated numbers, got {len(vals)}")
    return vals


def _index(text):
    try:
        return FockElementIndex.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text):
    val = float(text)
    if not val > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return val


# --------------------------------------------------------------------------
# output


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or hasattr(v, "dtype"):
        return format_float(v)
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    v = float(v)
    return v if math.isfinite(v) else None


def render(header, rows, fmt):
    if fmt == "json":
        recs = [dict(zip(header, map(_jsonable, r))) for r in rows]
        return json.dumps(recs, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def emit(args, header, rows, meta):
    """Write to ``--out`` (plus a ``.meta.json`` sidecar) or to stdout."""
    text = render(header, rows, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        full = {"command": args.command, "format": args.format, "columns": list(header),
                "backend": backend_name(), "version": __version__, **meta}
        with open(args.out + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_jsonable(full), fh, indent=1, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# state parsing


def _state(args):
    """Resolve the mutually exclusive state flags to (kind, object)."""
    if args.epr_s is not None:
        return "tmst", TmstParams(args.epr_s, 1.0, 0.0)
    if args.tmst is not None:
        return "tmst", TmstParams(*args.tmst)
    if args.sf is not None:
        return "sf", StandardForm(*args.sf)
    if args.werner is not None:
        return "werner", WernerParams(*args.werner)
    if args.s is not None:
        return "tmst", TmstParams(args.s, 1.0 if args.eta is None else args.eta,
                                  0.0 if args.r is None else args.r)
    raise UsageError("give a state: --epr-s, --tmst, --sf, --werner or --s/--eta/--r")


def _correlators(kind, state, criterion, tol):
    if criterion == "gaussian":
        raise UsageError("correlators need --criterion type-i or type-ii")
    if kind == "werner":
        fn = werner_type_i_correlators if criterion == "type-i" else werner_type_ii_correlators
        return fn(state)
    if criterion == "type-ii":
        sf = tmst_covariance(state) if kind == "tmst" else state
        return type_ii_correlators(sf)
    if kind == "sf":
        if not state.is_tmst:
            raise UsageError("type-i correlators need a TMST form (d = -c)")
        state = tmst_params_from_standard_form(state.a, state.b, state.c)
    return type_i_correlators(state, tol)


def _state_label(kind, state):
    if kind == "tmst":
        return f"tmst(s={state.s!r},eta={state.eta!r},r={state.r!r})"
    if kind == "werner":
        return f"werner(p={state.p!r},s={state.s!r},u={state.u!r})"
    return f"sf(a={state.a!r},b={state.b!r},c={state.c!r},d={state.d!r})"


# --------------------------------------------------------------------------
# subcommands


def cmd_fock(args):
    p = TmstParams(args.s, args.eta, args.r)
    if not args.idx and args.cutoff is None:
        raise UsageError("fock needs --idx a,b,c,d (repeatable) or --cutoff N")
    cutoff = args.cutoff if args.cutoff is not None else default_cutoff(p, _env_tol(1e-14))
    bound = tail_bound(p, cutoff)
    meta = {"s": p.s, "eta": p.eta, "r": p.r, "cutoff": cutoff, "tail_bound": bound}
    if args.idx:
        rows = [[*idx, tmst_fock_element(p, idx)] for idx in args.idx]
    else:
        rows = [list(rec) for rec in truncated_tmst_density(p, cutoff).records()]
    print(f"# cutoff={cutoff} tail_bound={format_float(bound)}", file=sys.stderr)
    emit(args, ["m1", "m2", "n1", "n2", "value"], rows, meta)


def cmd_steer(args):
    kind, state = _state(args)
    tol = args.tol if args.tol is not None else _env_tol(1e-10)
    crit = args.criterion
    if crit == "gaussian":
        if kind == "tmst":
            sf = tmst_covariance(state)
        elif kind == "werner":
            sf = werner_covariance(state)
        else:
            sf = state
        value, bound = gaussian_steering_gap(sf), 0.0
        quantity, steerable = "det_alpha_minus_det_V", value > 0.0
    else:
        c = _correlators(kind, state, crit, tol)
        m = moment_value(c)
        # M = xx^2 + yy^2 + zz^2 with only xx, yy truncated
        bound = 4.0 * c.error_bound + 2.0 * c.error_bound**2
        value, quantity, steerable = m.value, "M", m.steerable
    header = ["state", "criterion", "quantity", "value", "error_bound", "steerable"]
    emit(args, header, [[_state_label(kind, state), crit, quantity, value, bound, steerable]],
         {"tol": tol})


def cmd_correlators(args):
    kind, state = _state(args)
    tol = args.tol if args.tol is not None else _env_tol(1e-10)
    c = _correlators(kind, state, args.criterion, tol)
    emit(args, ["state", "criterion", "xx", "yy", "zz", "error_bound"],
         [[_state_label(kind, state), args.criterion, c.xx, c.yy, c.zz, c.error_bound]],
         {"tol": tol})


def cmd_threshold(args):
    tol = args.tol if args.tol is not None else _env_tol(1e-6)
    crit = args.criterion.replace("-", "_")
    if args.crossover:
        r = 0.0 if args.r is None else args.r
        res = crossover_s(r, tol=tol, bracket=tuple(args.bracket))
        emit(args, ["r", "s_crossover", "converged", "status"],
             [[r, res.value, res.converged, res.status]],
             {"tol": tol, "diagnostics": res.diagnostics})
        return EXIT_OK if res.converged else EXIT_FAIL
    if args.sweep:
        fixed = {}
        if args.sweep == "s":
            fixed["r"] = 0.0 if args.r is None else args.r
        else:
            fixed["s"] = 0.5 if args.s is None else args.s
        spec = SweepSpec(args.sweep, args.start, args.stop, args.points, crit, fixed, tol)
        curve = run_sweep(spec, jobs=args.jobs)
        rows = [[r.abscissa, r.threshold, r.converged, r.error_bound] for r in curve.rows]
        emit(args, ["abscissa", "threshold", "converged", "error_bound"], rows, curve.metadata)
        return EXIT_OK
    if args.s is None:
        raise UsageError("threshold needs --s (single point), --sweep or --crossover")
    r = 0.0 if args.r is None else args.r
    res = eta_threshold(args.s, r, crit, tol=tol)
    emit(args, ["s", "r", "criterion", "eta_threshold", "converged", "error_bound", "status"],
         [[args.s, r, args.criterion, res.value, res.converged, res.error_bound, res.status]],
         {"tol": tol, "truncation_tol": tol / 100.0})
    return EXIT_OK


def cmd_figure(args):
    tol = args.tol if args.tol is not None else _env_tol(1e-6)
    if not args.out:
        raise UsageError("figure needs --out PATH (data files always carry a metadata sidecar)")
    data = build_figure(args.figure, tol=tol, jobs=args.jobs)
    emit(args, data.header, data.rows, data.metadata)


def cmd_werner(args):
    if args.s is None or args.u is None:
        raise UsageError("werner needs --s and --u (and optionally --p)")
    th = werner_thresholds(args.s, args.u)
    header = ["s", "u", "p_type_i", "p_type_ii", "p_gaussian"]
    row = [args.s, args.u, th["type_i"]["p"], th["type_ii"]["p"], th["gaussian"]["p"]]
    if args.p is not None:
        wp = WernerParams(args.p, args.s, args.u)
        m_i = moment_value(werner_type_i_correlators(wp))
        m_ii = moment_value(werner_type_ii_correlators(wp))
        gap = gaussian_steering_gap(werner_covariance(wp))
        header += ["p", "M_type_i", "M_type_ii", "gaussian_gap"]
        row += [args.p, m_i.value, m_ii.value, gap]
    emit(args, header, [row], {"never_steerable": {k: v["never_steerable"] for k, v in th.items()}})


def cmd_hermite(args):
    if args.sf is not None:
        sf = StandardForm(*args.sf)
    elif args.s is not None:
        sf = tmst_covariance(TmstParams(args.s, 1.0 if args.eta is None else args.eta,
                                        0.0 if args.r is None else args.r))
    else:
        raise UsageError("hermite needs --sf a,b,c,d or --s/--eta/--r")
    if not args.idx:
        raise UsageError("hermite needs at least one --idx")
    th = theta_from_standard_form(sf.a, sf.b, sf.c)
    rows = []
    for idx in args.idx:
        fock = fock_from_hermite(sf, idx) if sf.is_tmst else math.nan
        rows.append([*idx, hermite_at_origin(idx, th), fock])
    emit(args, ["m1", "m2", "n1", "n2", "hermite", "fock_element"], rows,
         {"theta": {"e": th.e, "f": th.f, "g": th.g}})


def cmd_verify(args):
    reports = run_verify(args.scope, cases=args.cases, max_degree=args.max_degree, seed=args.seed)
    for rep in reports:
        for line in rep.lines():
            print(line)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# --------------------------------------------------------------------------
# parser


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", help="write here (plus PATH.meta.json) instead of stdout")


def _add_state(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--epr-s", type=float, help="EPR state with squeezing s")
    g.add_argument("--tmst", type=lambda t: _floats(t, 3, "--tmst"), metavar="S,ETA,R")
    g.add_argument("--sf", type=lambda t: _floats(t, 4, "--sf"), metavar="A,B,C,D")
    g.add_argument("--werner", type=lambda t: _floats(t, 3, "--werner"), metavar="P,S,U")
    p.add_argument("--s", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--r", type=float)


def build_parser():
    ap = argparse.ArgumentParser(prog="cvsteer", description="EPR steering of CV states.")
    ap.add_argument("--version", action="version", version=f"cvsteer {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fock", help="Fock elements of a TMST state")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--idx", type=_index, action="append", metavar="M1,M2,N1,N2")
    p.add_argument("--cutoff", type=int)
    _add_output(p)
    p.set_defaults(func=cmd_fock)

    for name, func, default in (("steer", cmd_steer, None), ("correlators", cmd_correlators, "type-i")):
        p = sub.add_parser(name, help=f"{name} for one state")
        _add_state(p)
        p.add_argument("--criterion", choices=CRITERIA, default=default, required=default is None)
        p.add_argument("--tol", type=_positive_float)
        _add_output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("threshold", help="eta thresholds, sweeps and crossovers")
    p.add_argument("--criterion", choices=CRITERIA, default="type-i")
    p.add_argument("--s", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--sweep", choices=("s", "r"))
    p.add_argument("--start", type=float, default=0.02)
    p.add_argument("--stop", type=float, default=1.5)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--crossover", action="store_true", help="s where type-i meets the Gaussian threshold")
    p.add_argument("--bracket", type=lambda t: _floats(t, 2, "--bracket"), default=[0.3, 1.5])
    p.add_argument("--tol", type=_positive_float)
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("figure", help="data behind a figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--tol", type=_positive_float)
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("werner", help="CV Werner state thresholds")
    p.add_argument("--p", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--u", type=float)
    _add_output(p)
    p.set_defaults(func=cmd_werner)

    p = sub.add_parser("hermite", help="Hermite polynomials at the origin")
    p.add_argument("--sf", type=lambda t: _floats(t, 4, "--sf"), metavar="A,B,C,D")
    p.add_argument("--s", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--idx", type=_index, action="append", metavar="M1,M2,N1,N2")
    _add_output(p)
    p.set_defaults(func=cmd_hermite)

    p = sub.add_parser("verify", help="randomised oracle checks")
    p.add_argument("scope", nargs="?", default="all", choices=("all", "fock", "hermite", "correlators"))
    p.add_argument("--cases", type=int)
    p.add_argument("--max-degree", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "jobs", 1) < 1:
        parser.print_usage(sys.stderr)
        print("cvsteer: error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        code = args.func(args)
    except (UsageError, PhysicalityError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"cvsteer {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncationError, ArithmeticError, RuntimeError) as exc:
        print(f"cvsteer {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if code is None else code
