"""Ratio envelopes for every inequality tag, written as CSV plus a summary JSON.

    python scripts/run_envelopes.py --trials 2000 --ascent 20 --out results/envelopes
"""
import argparse
from pathlib import Path

from opholder.bounds_verifier import TAGS, ROW_FIELDS, envelope_stability
from opholder.report import emit_csv, emit_json, emit_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--ascent", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tags", nargs="*", default=list(TAGS))
    ap.add_argument("--out", type=Path, default=Path("results/envelopes"))
    args = ap.parse_args()
    summary = {}
    for tag in args.tags:
        st = envelope_stability(tag, args.trials, args.ascent, args.seed)
        rec = st["record"]
        emit_csv(rec, args.out / f"{tag}.csv", ROW_FIELDS)
        emit_svg(rec, "ratio-vs-delta", args.out / f"{tag}.svg")
        summary[tag] = {"half": st["half"], "full": st["full"], "change": st["change"],
                        "config": rec.config}
        print(f"{tag:5s} envelope {st['full']:.6f}  change on doubling {100 * st['change']:.2f}%")
    emit_json(summary, args.out / "summary.json")


if __name__ == "__main__":
    main()
