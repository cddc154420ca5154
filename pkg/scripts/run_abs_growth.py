"""Best-found ||(|A| - |B|)|| / ||A - B|| by dimension.

    python scripts/run_abs_growth.py --dims 1 2 4 8 16 32
"""
import argparse
from pathlib import Path

from opholder.bounds_verifier import ROW_FIELDS, abs_explorer
from opholder.report import emit_csv, emit_json


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="*", default=[1, 2, 4, 8, 16])
    ap.add_argument("--budget", type=int, default=400)
    ap.add_argument("--ascent", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/abs"))
    args = ap.parse_args()
    rec = abs_explorer(tuple(args.dims), args.budget, args.ascent, 60, args.seed)
    emit_csv(rec, args.out / "abs_growth.csv", ROW_FIELDS)
    emit_json({"rows": rec.rows, "witness": rec.witness}, args.out / "abs_growth.json")
    for r in rec.rows:
        print(f"dim {r['dim']:3d}  best {r['numerator']:.5f}  envelope {r['ratio']:.5f}")


if __name__ == "__main__":
    main()
