"""Compare the numba kernels with their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends are imported in one process, so the environment flag is not
needed here; it only selects which one the library binds by default.
"""

import argparse
import timeit

import numpy as np

from cvsteer import _kernels
from cvsteer.fock import _log_factorials
from cvsteer.gaussian import TmstParams
from cvsteer.pseudospin import type_i_truncation

CASES = [
    ("fill_density N=24", "fill_density", lambda p, lf: (p.varsigma, p.eta, p.r, 24, lf)),
    ("fill_density N=48", "fill_density", lambda p, lf: (p.varsigma, p.eta, p.r, 48, lf)),
]


def _type_i_args(p, tol):
    n, l, _ = type_i_truncation(p, tol)
    return (p.varsigma, p.eta, p.r, n, l, _log_factorials(2 * (n + l) + 4))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    lf = _log_factorials(256)
    p = TmstParams(1.0, 0.6, 0.4)
    jobs = [(label, name, make(p, lf)) for label, name, make in CASES]
    jobs += [(f"type_i_xx s={s} tol=1e-12", "type_i_xx", _type_i_args(TmstParams(s, 0.6, 0.4), 1e-12))
             for s in (0.5, 1.5)]
    print(f"{'kernel':32s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>8s} {'max |diff|':>11s}")
    for label, name, a in jobs:
        fj = getattr(_kernels, f"{name}_jit")
        fn = getattr(_kernels, f"{name}_numpy")
        rj, rn = fj(*a), fn(*a)  # warm-up (compilation) and results
        tj = min(timeit.repeat(lambda: fj(*a), number=1, repeat=args.repeat))
        tn = min(timeit.repeat(lambda: fn(*a), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(np.asarray(rj) - np.asarray(rn))))
        print(f"{label:32s} {1e3 * tj:12.3f} {1e3 * tn:12.3f} {tn / tj:8.1f} {diff:11.2e}")


if __name__ == "__main__":
    main()
