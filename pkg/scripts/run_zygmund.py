"""Growth constant of the operator modulus against delta log(2/delta), with a budget-doubling check.

    python scripts/run_zygmund.py
"""
import argparse

from opholder import functions as fn
from opholder.extremal_search import zygmund_fit


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--restarts", type=int, default=6)
    ap.add_argument("--iters", type=int, default=60)
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    f = fn.lacunary_cos()
    a = zygmund_fit(f, None, args.dim, args.restarts, args.iters, args.seed)
    b = zygmund_fit(f, None, args.dim, 2 * args.restarts, 2 * args.iters, args.seed)
    change = abs(b["C_hat"] - a["C_hat"]) / b["C_hat"]
    print(f"C_hat {a['C_hat']:.5f} -> {b['C_hat']:.5f} on budget doubling ({100 * change:.2f}% change)")
    for d, r in zip(b["deltas"], b["ratios"]):
        print(f"  delta {d:.6f}  ratio {r:.5f}")


if __name__ == "__main__":
    main()
