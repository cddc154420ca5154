"""Fitted Holder exponents from scaled-direction sweeps, with log-log plots.

    python scripts/run_exponents.py --out results/exponents
"""
import argparse
from pathlib import Path

from opholder import functions as fn
from opholder.bounds_verifier import exponent_experiment
from opholder.report import emit_csv, emit_json, emit_svg

CASES = {
    "abs_0.3": lambda: fn.abs_power(0.3),
    "abs_0.5": lambda: fn.abs_power(0.5),
    "abs_0.7": lambda: fn.abs_power(0.7),
    "identity": fn.identity,
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="*", default=[2, 4, 8])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/exponents"))
    args = ap.parse_args()
    summary = {}
    for name, make in CASES.items():
        for d in args.dims:
            res = exponent_experiment(make(), dim=d, seed=args.seed)
            rec = res["record"]
            rec.tag, rec.config = name, {"dim": d}
            emit_csv(rec, args.out / f"{name}_dim{d}.csv")
            emit_svg(rec, "loglog-slope", args.out / f"{name}_dim{d}.svg")
            summary[f"{name}_dim{d}"] = {"slope": res["slope"], "r2": res["r2"]}
            print(f"{name:9s} dim {d:2d}  slope {res['slope']:.4f}  r2 {res['r2']:.6f}")
    emit_json(summary, args.out / "summary.json")


if __name__ == "__main__":
    main()
