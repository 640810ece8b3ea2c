"""Tabulated data behind each figure: a header, rows, and metadata.

Every builder returns ``FigureData``; the CLI only formats and writes it.
"""

from dataclasses import dataclass, field
import subprocess

import numpy as np

from . import __version__
from .pseudospin import epr_moment_type_i, epr_moment_type_ii
from .thresholds import SweepSpec, run_sweep
from .werner import p_steer_gaussian, p_steer_type_i, p_steer_type_ii

FIGURES = ("fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6")
FIG4A_S = (0.5, 1.0, 1.5)
FIG4B_R = (0.0, 0.25, 0.5)


@dataclass
class FigureData:
    name: str
    header: list
    rows: list
    metadata: dict = field(default_factory=dict)


def _commit():
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True, text=True,
                             timeout=5, check=False)
    except (OSError, subprocess.SubprocessError):
        return None
    return out.stdout.strip() or None


def _base_meta(name, **extra):
    return {"figure": name, "package_version": __version__, "commit": _commit(), **extra}


def fig2(points=61, s_max=3.0):
    s = np.linspace(0.0, s_max, points)
    rows = [list(t) for t in zip(s, epr_moment_type_i(s), epr_moment_type_ii(s))]
    return FigureData("fig2", ["s", "M_type_i", "M_type_ii"], rows,
                      _base_meta("fig2", evaluation="closed form", s_grid=[0.0, s_max, points]))


def _threshold_columns(specs, jobs):
    curves = [run_sweep(sp, jobs=jobs) for sp in specs]
    cols = [[row.threshold for row in c.rows] for c in curves]
    flags = [all(row.converged for row in c.rows) for c in curves]
    return cols, flags


def fig3(points=40, s_min=0.02, s_max=1.5, tol=1e-6, jobs=1):
    crit = ("gaussian", "type_i", "type_ii")
    specs = [SweepSpec("s", s_min, s_max, points, c, {"r": 0.0}, tol) for c in crit]
    cols, flags = _threshold_columns(specs, jobs)
    s = specs[0].abscissae()
    rows = [[x, *vals] for x, vals in zip(s, zip(*cols))]
    meta = _base_meta("fig3", r=0.0, bisection_tol=tol, truncation_tol=tol / 100.0,
                      all_converged=dict(zip(crit, flags)))
    return FigureData("fig3", ["s", "eta_gaussian", "eta_type_i", "eta_type_ii"], rows, meta)


def fig4a(points=25, r_max=1.2, s_values=FIG4A_S, tol=1e-6, jobs=1):
    specs = [SweepSpec("r", 0.0, r_max, points, "gaussian", {"s": s_values[0]}, tol)]
    specs += [SweepSpec("r", 0.0, r_max, points, "type_i", {"s": s}, tol) for s in s_values]
    cols, flags = _threshold_columns(specs, jobs)
    header = ["r", "eta_gaussian"] + [f"eta_type_i_s{s:g}" for s in s_values]
    r = specs[0].abscissae()
    rows = [[x, *vals] for x, vals in zip(r, zip(*cols))]
    meta = _base_meta("fig4a", s_values=list(s_values), bisection_tol=tol,
                      truncation_tol=tol / 100.0, all_converged=dict(zip(header[1:], flags)))
    return FigureData("fig4a", header, rows, meta)


def fig4b(points=30, s_min=0.02, s_max=1.5, r_values=FIG4B_R, tol=1e-6, jobs=1):
    specs, header = [], ["s"]
    for r in r_values:
        specs.append(SweepSpec("s", s_min, s_max, points, "gaussian", {"r": r}, tol))
        specs.append(SweepSpec("s", s_min, s_max, points, "type_i", {"r": r}, tol))
        header += [f"eta_gaussian_r{r:g}", f"eta_type_i_r{r:g}"]
    cols, flags = _threshold_columns(specs, jobs)
    s = specs[0].abscissae()
    rows = [[x, *vals] for x, vals in zip(s, zip(*cols))]
    meta = _base_meta("fig4b", r_values=list(r_values), bisection_tol=tol,
                      truncation_tol=tol / 100.0, all_converged=dict(zip(header[1:], flags)))
    return FigureData("fig4b", header, rows, meta)


def fig5(points=31, s_max=3.0, u_max=3.0):
    s_grid = np.linspace(0.0, s_max, points)
    u_grid = np.linspace(0.0, u_max, points)
    rows = [[s, u, p_steer_type_i(s, u)] for s in s_grid for u in u_grid]
    meta = _base_meta("fig5", evaluation="closed form", s_grid=[0.0, s_max, points],
                      u_grid=[0.0, u_max, points], clamp="[0, 1]; 1 means never steerable")
    return FigureData("fig5", ["s", "u", "p_steer_type_i"], rows, meta)


def fig6(points=50, s_min=0.05, s_max=5.0):
    s = np.linspace(s_min, s_max, points)
    rows = [[x, p_steer_type_i(x, x), p_steer_type_ii(x, x), p_steer_gaussian(x, x)] for x in s]
    meta = _base_meta("fig6", evaluation="closed form", u="equal to s",
                      s_grid=[s_min, s_max, points])
    return FigureData("fig6", ["s", "p_type_i", "p_type_ii", "p_gaussian"], rows, meta)


BUILDERS = {"fig2": fig2, "fig3": fig3, "fig4a": fig4a, "fig4b": fig4b, "fig5": fig5, "fig6": fig6}


def build_figure(name, tol=1e-6, jobs=1):
    if name not in BUILDERS:
        raise ValueError(f"unknown figure {name!r}; expected one of {FIGURES}")
    if name in ("fig3", "fig4a", "fig4b"):
        return BUILDERS[name](tol=tol, jobs=jobs)
    return BUILDERS[name]()
