"""Randomised oracle comparisons used by ``cvsteer verify`` and the test suite.

Each suite draws parameters from a seeded generator, runs the fast closed form
against an independent route, and reports the largest deviation.
"""

from dataclasses import dataclass, field
import itertools

import numpy as np

from .fock import (
    default_cutoff, purified_state_vector, tmst_fock_element, trace_out_ancillas,
    truncated_tmst_density,
)
from .gaussian import TmstParams, tmst_covariance
from .hermite import (
    det_relation_check, fock_from_hermite, hermite_at_origin, hermite_table_oracle,
    theta_from_standard_form,
)
from .pseudospin import fock_expectation, pseudospin_matrices, type_i_correlators

FOCK_TOL = 1e-10
HERMITE_REL_TOL = 1e-10
DET_TOL = 1e-12
CORRELATOR_TOL = 1e-8


@dataclass
class VerifyReport:
    scope: str
    passed: bool
    cases: int
    max_deviation: dict
    details: list = field(default_factory=list)

    def lines(self):
        status = "PASS" if self.passed else "FAIL"
        devs = ", ".join(f"{k}={v:.3e}" for k, v in self.max_deviation.items())
        out = [f"{status} {self.scope}: {self.cases} cases; max {devs}"]
        out += [f"  {d}" for d in self.details]
        return out


def random_tmst(rng, s_max=1.0, eta_min=0.05, r_max=0.8):
    return TmstParams(rng.uniform(0.0, s_max), rng.uniform(eta_min, 1.0), rng.uniform(0.0, r_max))


def verify_fock(cases=50, max_index=5, seed=0):
    """Closed form against the ancilla trace-out; selection-rule zeros must be exact."""
    rng = np.random.default_rng(seed)
    box = max_index + 1
    ix = np.indices((box,) * 4)
    forbidden = ix[0] + ix[3] != ix[2] + ix[1]
    worst, zero_fail, details = 0.0, 0, []
    for _ in range(cases):
        p = random_tmst(rng)
        closed = truncated_tmst_density(p, box).elements
        oracle = trace_out_ancillas(purified_state_vector(p, max(box, default_cutoff(p, 1e-13))), keep=box)
        dev = float(np.max(np.abs(closed - oracle)))
        if np.any(closed[forbidden] != 0.0):
            zero_fail += 1
            details.append(f"nonzero forbidden element at {p}")
        if dev >= FOCK_TOL:
            details.append(f"deviation {dev:.3e} at {p}")
        worst = max(worst, dev)
    passed = worst < FOCK_TOL and zero_fail == 0
    return VerifyReport("fock", passed, cases, {"abs_closed_vs_trace_out": worst,
                                                "forbidden_nonzero": float(zero_fail)}, details)


def _rel(x, y):
    scale = max(abs(x), abs(y))
    return 0.0 if scale == 0.0 else abs(x - y) / scale


def verify_hermite(cases=20, max_degree=8, det_cases=100, fock_max_index=3, seed=0):
    """Closed form vs Taylor coefficients, Fock correspondence and the det identity."""
    rng = np.random.default_rng(seed)
    worst_h, worst_f, details = 0.0, 0.0, []
    indices = [i for i in itertools.product(range(max_degree + 1), repeat=4) if sum(i) <= max_degree]
    fock_idx = list(itertools.product(range(fock_max_index + 1), repeat=4))
    for _ in range(cases):
        p = random_tmst(rng, s_max=1.5, eta_min=0.0, r_max=1.0)
        sf = tmst_covariance(p)
        th = theta_from_standard_form(sf.a, sf.b, sf.c)
        table = hermite_table_oracle(th, max_degree)
        for idx in indices:
            worst_h = max(worst_h, _rel(hermite_at_origin(idx, th), table.get(idx, 0.0)))
        for idx in fock_idx:
            worst_f = max(worst_f, abs(fock_from_hermite(sf, idx) - tmst_fock_element(p, idx)))
    worst_d = max(det_relation_check(random_tmst(rng, 1.5, 0.0, 1.0)) for _ in range(det_cases))
    passed = worst_h <= HERMITE_REL_TOL and worst_f <= FOCK_TOL and worst_d < DET_TOL
    if not passed:
        details.append(f"hermite={worst_h:.3e} fock={worst_f:.3e} det={worst_d:.3e}")
    return VerifyReport("hermite", passed, cases,
                        {"rel_closed_vs_taylor": worst_h, "abs_fock_correspondence": worst_f,
                         "det_identity": worst_d}, details)


def verify_correlators(cases=20, seed=0, trunc_tol=1e-12):
    """Type-i series against operator expectations in a truncated Fock box.

    Also checks ``yy == -xx`` bit for bit and ``zz`` against the parity sum
    within the box's tail bound.
    """
    rng = np.random.default_rng(seed)
    worst_x, worst_y, worst_z_excess, details = 0.0, 0.0, 0.0, []
    antisym_fail = 0
    for _ in range(cases):
        p = random_tmst(rng)
        c = type_i_correlators(p, trunc_tol)
        n = default_cutoff(p, 1e-12)
        n += n % 2
        rho = truncated_tmst_density(p, n)
        sx, sy, _ = pseudospin_matrices(n)
        ex = fock_expectation(rho.elements, sx, sx).real
        ey = fock_expectation(rho.elements, sy, sy).real
        allowed = c.error_bound + rho.tail_bound
        dx = abs(c.xx - ex)
        worst_x = max(worst_x, dx)
        worst_y = max(worst_y, abs(c.yy - ey))
        worst_z_excess = max(worst_z_excess, abs(c.zz - rho.parity_sum()) - rho.tail_bound)
        if c.yy != -c.xx:
            antisym_fail += 1
        if dx >= CORRELATOR_TOL or dx > allowed + CORRELATOR_TOL:
            details.append(f"xx deviation {dx:.3e} at {p}")
    passed = (worst_x < CORRELATOR_TOL and worst_y < CORRELATOR_TOL
              and worst_z_excess <= 0.0 and antisym_fail == 0)
    return VerifyReport("correlators", passed, cases,
                        {"xx_series_vs_fock": worst_x, "yy_series_vs_fock": worst_y,
                         "zz_excess_over_tail": max(worst_z_excess, 0.0),
                         "yy_ne_minus_xx": float(antisym_fail)}, details)


SUITES = {"fock": verify_fock, "hermite": verify_hermite, "correlators": verify_correlators}


def run_verify(scope="all", cases=None, max_degree=8, seed=0):
    names = list(SUITES) if scope == "all" else [scope]
    reports = []
    for name in names:
        kw = {"seed": seed}
        if cases is not None:
            kw["cases"] = cases
        if name == "hermite":
            kw["max_degree"] = max_degree
        reports.append(SUITES[name](**kw))
    return reports

