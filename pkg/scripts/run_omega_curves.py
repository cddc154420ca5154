"""Lower-bound curves for the operator modulus and its commutator variants.

Sweeps delta with warm starts, varies the spectral cap L and the dimension,
and reports the rational registry maxima next to the ascent estimates.

    python scripts/run_omega_curves.py --function abs --out results/omega
"""
import argparse
from pathlib import Path

import numpy as np

from opholder import functions as fn
from opholder.extremal_search import Registry, omega_sweep, registry_extend
from opholder.report import emit_csv, emit_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--function", default="abs")
    ap.add_argument("--dims", type=int, nargs="*", default=[2, 4, 8])
    ap.add_argument("--caps", type=float, nargs="*", default=[1.0, 4.0])
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--iters", type=int, default=80)
    ap.add_argument("--registry-rounds", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/omega"))
    args = ap.parse_args()
    f = fn.by_name(args.function)
    deltas = np.geomspace(1e-3, 1.0, 10)
    reg = Registry(f, deltas)
    for _ in range(args.registry_rounds):
        registry_extend(reg, 32)
    rows = []
    for tag in ("f", "1", "2", "3"):
        for L in args.caps:
            for d in args.dims:
                ests = omega_sweep(f, deltas, d, args.restarts, args.iters, tag, L, args.seed)
                for e, rmax in zip(ests, reg.maxima):
                    rows.append({"delta": e.delta, "tag": tag, "estimate": e.lower_bound,
                                 "restarts": args.restarts, "dim": d, "L": L, "registry": rmax})
                print(f"tag {tag} L {L:g} dim {d:2d}  estimate at delta=1: {ests[-1].lower_bound:.5f}")
    emit_csv(rows, args.out / f"{f.name}_omega.csv")
    plot = [{"delta": r["delta"], "numerator": r["estimate"]} for r in rows
            if r["tag"] == "f" and r["L"] == args.caps[0] and r["dim"] == args.dims[-1]]
    emit_svg(plot, "loglog-slope", args.out / f"{f.name}_omega.svg")


if __name__ == "__main__":
    main()
