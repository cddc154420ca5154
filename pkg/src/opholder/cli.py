"""Config-driven experiment runner.

    opholder <command> --config run.cfg --seed 7 --out results/

Config files are ``key = value`` lines; ``#`` starts a comment.  Each command
writes ``<command>.csv`` and ``<command>.json`` (plus an SVG where a plot
makes sense) into the output directory.  Exit codes: 0 success, 2 config
error, 3 invariant violation.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from . import functions as fn
from .bounds_verifier import (ROW_FIELDS, InvariantViolation, bks_check, default_context,
                              ratio_experiment)
from .contraction_dilation import dilate, lemma_mc_residual, semi_spectral_doi
from .extremal_search import mcc_transfer, omega_search, omega_sweep, zygmund_fit
from .matrix_calc import bsf_residual, eig, lemma_m_moi, op_finite_diff, spectral_norm, to_json_matrix
from .moduli import holder_seminorm, lambda_omega_norm, power_modulus
from .report import emit_csv, emit_json, emit_svg, read_csv
from .sampling import contraction, hermitian, hermitian_direction, trial_rng, unitary
from .set_combinatorics import family, kappa_closed, _kappa_rec, verify_gen

COMMANDS = ("decompose", "seminorm", "verify-doi", "verify-moi", "verify-gen", "kappa",
            "dilate-check", "holder-scan", "bks", "omega-scan", "omega-search",
            "commutator-scan", "zygmund-fit", "report")

# documented key set with defaults
KEYS = {
    "tag": None,
    "seed": None,
    "out": "results",
    "function": "identity",
    "params": "",
    "alpha": 0.5,
    "omega": "power",
    "m": 2,
    "dim": 4,
    "dims": (2, 8),
    "trials": 100,
    "deltas": (0.5, 0.25, 0.125, 0.0625),
    "delta": 0.1,
    "N": 3,
    "degree": 4,
    "n_max": 8,
    "ratio_tag": "saH",
    "ascent_runs": 0,
    "restarts": 10,
    "iters": 100,
    "L": 1.0,
    "alphas": (0.25, 0.5, 0.75),
    "search_tag": "f",
}


class ConfigError(ValueError):
    pass


def parse_value(s: str):
    s = s.strip()
    if "," in s:
        return tuple(parse_value(p) for p in s.split(",") if p.strip())
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        out[key] = parse_value(val)
    return out


@dataclass
class RunConfig:
    tag: str
    seed: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in COMMANDS:
            raise ConfigError(f"unknown experiment tag {self.tag!r}")
        for k in self.values:
            if k not in KEYS:
                raise ConfigError(f"unknown config key {k!r}")
        if self.seed is None:
            raise ConfigError("a seed is required (config key 'seed' or --seed)")
        self.seed = int(self.seed)

    def get(self, key):
        return self.values.get(key, KEYS[key])

    def tuple(self, key):
        v = self.get(key)
        return tuple(v) if isinstance(v, (tuple, list)) else (v,)

    @property
    def out(self) -> Path:
        return Path(str(self.get("out")))

    def function(self) -> fn.FunctionModel:
        params = {}
        raw = self.get("params")
        for item in (raw if isinstance(raw, tuple) else (raw,)):
            if isinstance(item, str) and ":" in item:
                k, v = item.split(":", 1)
                params[k.strip()] = parse_value(v)
        try:
            return fn.by_name(str(self.get("function")), **params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def echo(self) -> dict:
        return {"tag": self.tag, "seed": self.seed, **{k: self.values[k] for k in sorted(self.values)}}


@dataclass
class ReportBundle:
    csv: list
    json: Path
    svg: list
    config: dict
    version: str = __version__


def _random_poly(rng, max_degree=6):
    d = int(rng.integers(1, max_degree + 1))
    return fn.polynomial(list(rng.standard_normal(d + 1)))


def _random_trig(rng, max_degree=4):
    d = int(rng.integers(1, max_degree + 1))
    c = {p: complex(*rng.standard_normal(2)) for p in range(-d, d + 1)}
    return fn.trig_polynomial(c)


def _dim(rng, cfg):
    lo, hi = cfg.tuple("dims")[0], cfg.tuple("dims")[-1]
    return int(rng.integers(lo, hi + 1))


# ---------------------------------------------------------------------------
# command handlers: each returns (rows, fields, summary, plots)


def cmd_decompose(cfg):
    rows = []
    for i in range(cfg.get("trials")):
        rng = trial_rng(cfg.seed, i)
        n = _dim(rng, cfg)
        A = hermitian(rng, n, cfg.get("L"))
        s = eig(A)
        res = spectral_norm(A @ s.vectors - s.vectors * s.values) / max(spectral_norm(A), 1e-300)
        rows.append({"trial": i, "dim": n, "lambda_min": s.values[0], "lambda_max": s.values[-1],
                     "residual": res})
    return rows, ["trial", "dim", "lambda_min", "lambda_max", "residual"], \
        {"max_residual": max(r["residual"] for r in rows)}, []


def cmd_seminorm(cfg):
    f = cfg.function()
    alpha = float(cfg.get("alpha"))
    rep = holder_seminorm(f, alpha)
    rows = [{"function": f.name, "kind": "holder", "alpha": alpha, "m": rep.order,
             "value": rep.value, "t_star": rep.t_star, "x_star": rep.x_star}]
    if cfg.get("omega") == "power":
        m = int(cfg.get("m"))
        rep2 = lambda_omega_norm(f, power_modulus(alpha, m), m)
        rows.append({"function": f.name, "kind": "lambda_omega", "alpha": alpha, "m": m,
                     "value": rep2.value, "t_star": rep2.t_star, "x_star": rep2.x_star})
    return rows, list(rows[0]), {"holder": rows[0]["value"]}, []


def cmd_verify_doi(cfg):
    rows = []
    for i in range(cfg.get("trials")):
        rng = trial_rng(cfg.seed, i)
        n = _dim(rng, cfg)
        f = _random_poly(rng)
        A = hermitian(rng, n)
        K = hermitian_direction(rng, n, 10 ** rng.uniform(-3, 0))
        rows.append({"trial": i, "dim": n, "degree": f.degree, "residual": bsf_residual(f, A, K)})
    return rows, ["trial", "dim", "degree", "residual"], \
        {"max_residual": max(r["residual"] for r in rows)}, []


def cmd_verify_moi(cfg):
    m = int(cfg.get("m"))
    rows = []
    for i in range(cfg.get("trials")):
        rng = trial_rng(cfg.seed, i)
        n = _dim(rng, cfg)
        f = _random_poly(rng)
        A = hermitian(rng, n)
        K = hermitian_direction(rng, n, 10 ** rng.uniform(-2, 0))
        lhs, rhs = op_finite_diff(f, A, K, m), lemma_m_moi(f, A, K, m)
        res = spectral_norm(lhs - rhs) / max(spectral_norm(lhs), spectral_norm(K) ** m)
        rows.append({"trial": i, "dim": n, "m": m, "degree": f.degree, "residual": res})
    return rows, ["trial", "dim", "m", "degree", "residual"], \
        {"max_residual": max(r["residual"] for r in rows)}, []


def cmd_verify_gen(cfg):
    N = int(cfg.get("N"))
    rows = []
    for i in range(cfg.get("trials")):
        rng = trial_rng(cfg.seed, i)
        n = _dim(rng, cfg)
        f = _random_trig(rng)
        Us = [unitary(rng, n) for _ in range(N)]
        rows.append({"trial": i, "dim": n, "N": N, "residual": verify_gen(N, Us, f)})
    return rows, ["trial", "dim", "N", "residual"], \
        {"max_residual": max(r["residual"] for r in rows)}, []


def cmd_kappa(cfg):
    rows = []
    for N in range(1, int(cfg.get("n_max")) + 1):
        for J in family(N):
            closed = kappa_closed(J) if 1 in J else ""
            rows.append({"set": "{" + " ".join(map(str, J)) + "}", "max": N,
                         "kappa_recursive": _kappa_rec(J), "kappa_closed": closed})
    agree = all(r["kappa_closed"] == "" or r["kappa_closed"] == r["kappa_recursive"] for r in rows)
    return rows, ["set", "max", "kappa_recursive", "kappa_closed"], {"agree": agree}, \
        [("kappa-table", [r for r in rows if r["max"] <= 4])]


def cmd_dilate_check(cfg):
    rows = []
    for i in range(cfg.get("trials")):
        rng = trial_rng(cfg.seed, i)
        n = _dim(rng, cfg)
        d = int(rng.integers(1, int(cfg.get("degree")) + 1))
        T = contraction(rng, n, rng.uniform(0.1, 1.0))
        R = contraction(rng, n, rng.uniform(0.1, 0.9))
        D = dilate(T, d)
        f = fn.analytic_polynomial(list(rng.standard_normal(d)))
        row = {"trial": i, "dim": n, "degree": d, "unitarity": D.unitarity_residual(),
               "power": D.power_residual(T),
               "semi_spectral": semi_spectral_doi(f, T, R)["residual_vs_direct"]}
        # the extrapolated chain must stay inside the unit ball
        T2, R2 = 0.3 * T, 0.3 * R
        row["lemma_mc"] = lemma_mc_residual(f, T2, R2, 2)
        rows.append(row)
    fields = ["trial", "dim", "degree", "unitarity", "power", "semi_spectral", "lemma_mc"]
    return rows, fields, {k: max(r[k] for r in rows) for k in fields[3:]}, []


def cmd_holder_scan(cfg):
    tag = str(cfg.get("ratio_tag"))
    ctx = default_context(tag)
    ctx.dims = tuple(cfg.tuple("dims"))
    rec = ratio_experiment(tag, ctx, int(cfg.get("trials")), cfg.seed, int(cfg.get("ascent_runs")))
    return rec.rows, list(ROW_FIELDS), rec.summary(), [("ratio-vs-delta", rec)]


def cmd_bks(cfg):
    rec = bks_check(tuple(float(a) for a in cfg.tuple("alphas")), int(cfg.get("trials")), cfg.seed,
                    tuple(cfg.tuple("dims")))
    return rec.rows, list(ROW_FIELDS), rec.summary(), []


def _omega_rows(ests, restarts):
    return [{"delta": e.delta, "tag": e.tag, "estimate": e.lower_bound, "constraint": e.constraint,
             "restarts": restarts} for e in ests]


def cmd_omega_scan(cfg):
    f = cfg.function()
    restarts = int(cfg.get("restarts"))
    ests = omega_sweep(f, [float(d) for d in cfg.tuple("deltas")], int(cfg.get("dim")), restarts,
                       int(cfg.get("iters")), str(cfg.get("search_tag")), float(cfg.get("L")), cfg.seed)
    rows = _omega_rows(ests, restarts)
    plot = [{"delta": r["delta"], "numerator": r["estimate"]} for r in rows]
    return rows, ["delta", "tag", "estimate", "constraint", "restarts"], \
        {"max_estimate": max(r["estimate"] for r in rows)}, [("loglog-slope", plot)]


def cmd_omega_search(cfg):
    f = cfg.function()
    restarts = int(cfg.get("restarts"))
    e = omega_search(f, float(cfg.get("delta")), int(cfg.get("dim")), restarts, int(cfg.get("iters")),
                     str(cfg.get("search_tag")), float(cfg.get("L")), cfg.seed)
    summary = {"estimate": e.lower_bound, "witness": {k: to_json_matrix(v) for k, v in e.witness.items()},
               "trace": e.trace}
    return _omega_rows([e], restarts), ["delta", "tag", "estimate", "constraint", "restarts"], summary, []


def cmd_commutator_scan(cfg):
    f = cfg.function()
    restarts, iters, dim = int(cfg.get("restarts")), int(cfg.get("iters")), int(cfg.get("dim"))
    rows = []
    for d in (float(x) for x in cfg.tuple("deltas")):
        est = {t: omega_search(f, d, dim, restarts, iters, t, float(cfg.get("L")), cfg.seed)
               for t in ("f", "1", "2", "3")}
        up = mcc_transfer(est["f"].witness, "f->3", f)
        down = mcc_transfer(est["1"].witness, "1->f", f)
        rows.append({"delta": d, "omega_f": est["f"].lower_bound, "omega_1": est["1"].lower_bound,
                     "omega_2": est["2"].lower_bound, "omega_3": est["3"].lower_bound,
                     "transfer_up_ok": up["ok"], "transfer_down_ok": down["ok"],
                     "transfer_down_value": down["value"]})
    return rows, list(rows[0]), {"transfers_ok": all(r["transfer_up_ok"] and r["transfer_down_ok"]
                                                     for r in rows)}, []


def cmd_zygmund_fit(cfg):
    f = cfg.function() if "function" in cfg.values else fn.lacunary_cos()
    deltas = cfg.values.get("deltas")
    res = zygmund_fit(f, [float(d) for d in deltas] if deltas else None, int(cfg.get("dim")),
                      int(cfg.get("restarts")), int(cfg.get("iters")), cfg.seed)
    rows = [{"delta": d, "estimate": e, "ratio": r}
            for d, e, r in zip(res["deltas"], res["estimates"], res["ratios"])]
    return rows, ["delta", "estimate", "ratio"], {"C_hat": res["C_hat"]}, []


def cmd_report(cfg):
    """Index of every CSV already in the output directory."""
    rows = []
    for p in sorted(cfg.out.glob("*.csv")):
        if p.name == "report.csv":
            continue
        data = read_csv(p)
        rows.append({"file": p.name, "rows": len(data),
                     "sha256": hashlib.sha256(p.read_bytes()).hexdigest()})
    return rows, ["file", "rows", "sha256"], {"files": len(rows)}, []


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


def run(cfg: RunConfig) -> ReportBundle:
    rows, fields, summary, plots = HANDLERS[cfg.tag](cfg)
    stem = cfg.tag
    csv_path = emit_csv(rows, cfg.out / f"{stem}.csv", fields)
    svgs = []
    for i, (kind, rec) in enumerate(plots):
        if isinstance(rec, list):
            rec = {"tag": cfg.tag, "seed": cfg.seed, "config": cfg.values, "rows": rec}
            rec = _Plain(**rec)
        if rec.rows:
            svgs.append(emit_svg(rec, kind, cfg.out / f"{stem}-{kind}.svg"))
    summary = {"rows": len(rows), **summary}
    json_path = emit_json({"summary": summary, "config": cfg.echo(), "version": __version__,
                           "csv": [csv_path.name], "svg": [p.name for p in svgs]},
                          cfg.out / f"{stem}.json")
    return ReportBundle([csv_path], json_path, svgs, cfg.echo())


@dataclass
class _Plain:
    tag: str
    seed: int
    config: dict
    rows: list


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opholder", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", type=Path)
        s.add_argument("--seed", type=int)
        s.add_argument("--out", type=Path)
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key")
    return p


def config_from_args(args) -> RunConfig:
    values = {}
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        values.update(parse_config_text(text))
    if args.set:
        values.update(parse_config_text("\n".join(args.set)))
    if args.out is not None:
        values["out"] = str(args.out)
    seed = args.seed if args.seed is not None else values.pop("seed", None)
    values.pop("seed", None)
    tag = values.pop("tag", args.command)
    if tag != args.command:
        raise ConfigError(f"config tag {tag!r} does not match command {args.command!r}")
    return RunConfig(args.command, seed, values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        bundle = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # precondition failures of the requested operation
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for p in bundle.csv + [bundle.json] + bundle.svg:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
