"""Randomized ratio experiments for operator perturbation inequalities.

Every experiment compares a left side (numerator) with the right side of an
inequality stripped of its unknown absolute constant (denominator), over
random trials and local ascent runs.  The largest ratio is the empirical
constant.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import functions as fn
from .contraction_dilation import sparse_poly_of
from .functions import CIRCLE, FunctionModel
from .matrix_calc import commutator, func_of, lemma_pl_slack, lemma_vl_slack, \
    op_finite_diff, psd_sqrt, spectral_norm
from .moduli import ModulusOfContinuity, holder_seminorm, lambda_omega_norm, omega_star, \
    power_modulus
from .sampling import GaussianStream, contraction, ginibre, hermitian, hermitian_direction, \
    trial_rng, unitary, unitary_near

STREAM_LEN = 4096
ROW_FIELDS = ("tag", "trial", "phase", "dim", "seed", "delta", "numerator", "denominator", "ratio")


class InvariantViolation(AssertionError):
    """A hard inequality failed; carries the offending witness."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


@dataclass
class ExperimentRecord:
    experiment_id: str
    tag: str
    config: dict
    seed: int
    rows: list = field(default_factory=list)
    witness: dict | None = None

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r["ratio"] for r in self.rows], dtype=float)

    def summary(self) -> dict:
        if not self.rows:
            return {"rows": 0, "max_ratio": 0.0, "argmax": None}
        ratios = self.ratios
        i = int(np.argmax(ratios))
        return {
            "rows": len(self.rows),
            "max_ratio": float(ratios[i]),
            "argmax": {"trial": self.rows[i]["trial"], "phase": self.rows[i]["phase"]},
            "mean_ratio": float(np.mean(ratios)),
        }

    def merge(self, other: "ExperimentRecord") -> "ExperimentRecord":
        rows = sorted(self.rows + other.rows, key=lambda r: (r["phase"], r["trial"]))
        best = self if self.summary()["max_ratio"] >= other.summary()["max_ratio"] else other
        return ExperimentRecord(self.experiment_id, self.tag, self.config, self.seed, rows, best.witness)


def safe_ratio(num: float, den: float) -> float:
    """num/den with 0/0 read as 0 and an infinite denominator giving 0."""
    if den > 0 and np.isfinite(den):
        return float(num / den)
    if np.isinf(den) or num <= 1e-300:
        return 0.0
    raise ZeroDivisionError("nonzero numerator over zero denominator (seminorm grid failure?)")


# ---------------------------------------------------------------------------
# experiment contexts


@dataclass
class RatioContext:
    """Function, smoothness parameters and sampling ranges for one tag."""

    f: FunctionModel
    alpha: float | None = None
    omega: ModulusOfContinuity | None = None
    m: int = 1
    dims: tuple = (2, 12)
    L: float = 1.0
    delta_range: tuple = (1e-4, 1.0)
    seminorm: float | None = None
    grid_note: dict = field(default_factory=dict)

    def ensure_seminorm(self):
        if self.seminorm is None:
            if self.omega is not None:
                rep = lambda_omega_norm(self.f, self.omega, self.m)
            else:
                rep = holder_seminorm(self.f, self.alpha)
            self.seminorm, self.grid_note = rep.value, rep.grid
        return self.seminorm

    def omega_star(self, x: float) -> float:
        a = self.omega.params.get("alpha")
        if a is not None and a < self.m:
            return x ** a / (self.m - a)
        return omega_star(self.omega, self.m, x)

    def describe(self) -> dict:
        return {"f": self.f.name, "alpha": self.alpha,
                "omega": None if self.omega is None else self.omega.name, "m": self.m,
                "dims": list(self.dims), "L": self.L, "delta_range": list(self.delta_range),
                "seminorm": self.seminorm, "grid": self.grid_note}


def default_context(tag: str) -> RatioContext:
    half = power_modulus(0.5)
    table = {
        "saH": lambda: RatioContext(fn.abs_power(0.5), alpha=0.5),
        "sam": lambda: RatioContext(fn.abs_power(1.5), alpha=1.5, m=2),
        "uH": lambda: RatioContext(fn.circle_abs_power(0.5), alpha=0.5, delta_range=(1e-4, 2.0)),
        "hou": lambda: RatioContext(fn.circle_abs_power(0.5), alpha=0.5, m=2),
        "oLu": lambda: RatioContext(fn.lacunary_circle(10, 1.0), alpha=1.0, delta_range=(1e-4, 2.0)),
        "cH": lambda: RatioContext(fn.lacunary_analytic(10, 0.5), alpha=0.5),
        "conh": lambda: RatioContext(fn.lacunary_analytic(10, 1.5), alpha=1.5, m=2, delta_range=(1e-4, 0.3)),
        "oLc": lambda: RatioContext(fn.lacunary_analytic(10, 1.0), alpha=1.0),
        "omsa": lambda: RatioContext(fn.abs_power(0.5), omega=half),
        "omu": lambda: RatioContext(fn.circle_abs_power(0.5), omega=half, delta_range=(1e-4, 2.0)),
        "omc": lambda: RatioContext(fn.lacunary_analytic(10, 0.5), omega=half),
        "oon": lambda: RatioContext(fn.abs_power(1.5), omega=power_modulus(1.5, order=2), m=2),
        "fcc": lambda: RatioContext(fn.abs_power(0.5), alpha=0.5),
        "oqc": lambda: RatioContext(fn.abs_power(0.5), omega=half),
    }
    if tag not in table:
        raise ValueError(f"unknown tag {tag!r}")
    return table[tag]()


TAGS = ("saH", "sam", "uH", "hou", "oLu", "cH", "conh", "oLc", "omsa", "omu", "omc", "oon", "fcc", "oqc")


def _log_uniform(src, lo, hi):
    return float(math.exp(src.uniform(math.log(lo), math.log(hi))))


def _dim(src, ctx):
    return int(src.integers(ctx.dims[0], ctx.dims[1] + 1))


def _circle_eval(M, f):
    if f.domain == CIRCLE and f.coeffs is not None and f.is_analytic_polynomial:
        return sparse_poly_of(M, f)
    return func_of(M, f)


def _hermitian_pair(src, ctx):
    n = _dim(src, ctx)
    A = hermitian(src, n, ctx.L)
    delta = _log_uniform(src, *ctx.delta_range)
    K = hermitian_direction(src, n, delta)
    return n, A, K, delta


def _unitary_pair(src, ctx):
    n = _dim(src, ctx)
    U = unitary(src, n)
    h = _log_uniform(src, *ctx.delta_range)
    V = unitary_near(src, U, min(h, math.pi))
    return n, U, V


def _contraction_pair(src, ctx, t_max=1.0):
    n = _dim(src, ctx)
    T = contraction(src, n, src.uniform(0.0, t_max))
    delta = _log_uniform(src, *ctx.delta_range)
    R = T + delta * contraction(src, n, 1.0)
    s = spectral_norm(R)
    if s > 1:
        R = R / s
    return n, T, R


def _build(tag: str, src, ctx: RatioContext) -> dict:
    f, s = ctx.f, ctx.seminorm
    if tag in ("saH", "omsa"):
        n, A, K, d = _hermitian_pair(src, ctx)
        num = spectral_norm(func_of(A + K, f) - func_of(A, f))
        den = s * (d ** ctx.alpha if tag == "saH" else ctx.omega_star(d))
        return dict(dim=n, delta=d, num=num, den=den, witness={"A": A, "B": A + K})
    if tag in ("sam", "oon"):
        n, A, K, d = _hermitian_pair(src, ctx)
        num = spectral_norm(op_finite_diff(f, A, K, ctx.m))
        den = s * (d ** ctx.alpha if tag == "sam" else ctx.omega_star(d))
        return dict(dim=n, delta=d, num=num, den=den, witness={"A": A, "K": K})
    if tag in ("fcc", "oqc"):
        n, A, K, d = _hermitian_pair(src, ctx)
        B = A + K
        R = ginibre(src, n)
        R = R * _log_uniform(src, 0.1, 10.0) / spectral_norm(R)
        num = spectral_norm(func_of(A, f) @ R - R @ func_of(B, f))
        q, r = spectral_norm(A @ R - R @ B), spectral_norm(R)
        if tag == "fcc":
            den = s * q ** ctx.alpha * r ** (1 - ctx.alpha)
        else:
            den = s * r * ctx.omega_star(q / r) if q > 0 else 0.0
        return dict(dim=n, delta=q, num=num, den=den, witness={"A": A, "B": B, "R": R})
    if tag in ("uH", "oLu", "omu"):
        n, U, V = _unitary_pair(src, ctx)
        d = spectral_norm(U - V)
        num = spectral_norm(_circle_eval(U, f) - _circle_eval(V, f))
        if tag == "uH":
            den = s * d ** ctx.alpha
        elif tag == "oLu":
            den = s * (2 + math.log2(1 / d)) * d
        else:
            den = s * ctx.omega_star(d)
        return dict(dim=n, delta=d, num=num, den=den, witness={"U": U, "V": V})
    if tag == "hou":
        n = _dim(src, ctx)
        U = unitary(src, n)
        d = _log_uniform(src, *ctx.delta_range)
        A = hermitian_direction(src, n, d)
        vals, vecs = np.linalg.eigh(A)
        total = np.zeros((n, n), dtype=complex)
        for k in range(ctx.m + 1):
            Ek = (vecs * np.exp(1j * k * vals)) @ vecs.conj().T
            total = total + (-1) ** k * math.comb(ctx.m, k) * _circle_eval(Ek @ U, f)
        return dict(dim=n, delta=d, num=spectral_norm(total), den=s * d ** ctx.alpha,
                    witness={"U": U, "A": A})
    if tag in ("cH", "oLc", "omc"):
        n, T, R = _contraction_pair(src, ctx)
        d = spectral_norm(T - R)
        num = spectral_norm(_circle_eval(T, f) - _circle_eval(R, f))
        if tag == "cH":
            den = s * d ** ctx.alpha
        elif tag == "oLc":
            den = s * (2 + math.log2(1 / d)) * d if d > 0 else 0.0
        else:
            den = s * ctx.omega_star(d) if d > 0 else 0.0
        return dict(dim=n, delta=d, num=num, den=den, witness={"T": T, "R": R})
    if tag == "conh":
        n, T, R = _contraction_pair(src, ctx, t_max=0.6)
        d = spectral_norm(T - R)
        total = sum((-1) ** k * math.comb(ctx.m, k) * _circle_eval(T + (k / ctx.m) * (T - R), f)
                    for k in range(ctx.m + 1))
        return dict(dim=n, delta=d, num=spectral_norm(total), den=s * d ** ctx.alpha,
                    witness={"T": T, "R": R})
    raise ValueError(f"unknown tag {tag!r}")


def _evaluate(builder, z):
    out = builder(GaussianStream(z))
    out["ratio"] = safe_ratio(out["num"], out["den"])
    return out


def _row(tag, trial, phase, seed, out):
    return {"tag": tag, "trial": trial, "phase": phase, "dim": out["dim"], "seed": seed,
            "delta": float(out["delta"]), "numerator": float(out["num"]),
            "denominator": float(out["den"]), "ratio": float(out["ratio"])}


def ascend(builder, z0, rng, iters: int = 30, sigma: float = 0.3):
    """Hill-climb on the Gaussian vector behind a trial; returns (best_out, best_z)."""
    best_z, best = z0, _evaluate(builder, z0)
    for _ in range(iters):
        z = best_z + sigma * rng.standard_normal(len(best_z))
        try:
            cand = _evaluate(builder, z)
        except (ValueError, ZeroDivisionError, np.linalg.LinAlgError):
            continue
        if cand["ratio"] > best["ratio"]:
            best, best_z = cand, z
        else:
            sigma *= 0.9
    return best, best_z


def run_search(tag: str, builder: Callable, trials: int, seed: int, ascent_runs: int = 0,
               ascent_iters: int = 30, stream_len: int = STREAM_LEN, config=None) -> ExperimentRecord:
    rec = ExperimentRecord(_exp_id(tag, seed, config), tag, config or {}, seed)
    zs, ratios, best_out = [], [], None
    for i in range(trials):
        z = trial_rng(seed, i).standard_normal(stream_len)
        out = _evaluate(builder, z)
        rec.rows.append(_row(tag, i, "random", seed, out))
        zs.append(z)
        ratios.append(out["ratio"])
        if best_out is None or out["ratio"] > best_out["ratio"]:
            best_out = out
    order = np.argsort(-np.asarray(ratios), kind="stable")
    for j in range(min(ascent_runs, trials)):
        rng = trial_rng(seed, 1_000_000 + j)
        out, _ = ascend(builder, zs[order[j]], rng, ascent_iters)
        rec.rows.append(_row(tag, j, "ascent", seed, out))
        if out["ratio"] > best_out["ratio"]:
            best_out = out
    if best_out is not None:
        rec.witness = best_out["witness"]
    return rec


def _exp_id(tag, seed, config):
    h = hashlib.sha256(repr((tag, seed, sorted((config or {}).items()))).encode()).hexdigest()
    return f"{tag}-{h[:10]}"


def ratio_experiment(tag: str, ctx: RatioContext | None = None, trials: int = 1000, seed: int = 0,
                     ascent_runs: int = 0, ascent_iters: int = 30) -> ExperimentRecord:
    """Empirical constant for the tagged inequality over random and ascended trials."""
    ctx = ctx or default_context(tag)
    ctx.ensure_seminorm()
    if tag in ("cH", "conh", "oLc", "omc") and not ctx.f.is_analytic_polynomial:
        raise ValueError("contraction tags need an analytic polynomial")
    config = {"trials": trials, "ascent_runs": ascent_runs, **ctx.describe()}
    config = {k: (str(v) if isinstance(v, dict) else v) for k, v in config.items()}
    return run_search(tag, lambda src: _build(tag, src, ctx), trials, seed, ascent_runs,
                      ascent_iters, config=config)


def envelope_stability(tag: str, trials: int = 10_000, ascent_runs: int = 100, seed: int = 0,
                       ctx: RatioContext | None = None, ascent_iters: int = 80) -> dict:
    """Envelope at half and full budget; the random trials of the half run are
    a prefix of the full one."""
    ctx = ctx or default_context(tag)
    half = ratio_experiment(tag, ctx, trials // 2, seed, ascent_runs // 2, ascent_iters)
    full = ratio_experiment(tag, ctx, trials, seed, ascent_runs, ascent_iters)
    a, b = half.summary()["max_ratio"], full.summary()["max_ratio"]
    change = abs(b - a) / b if b > 0 else 0.0
    return {"tag": tag, "half": a, "full": b, "change": change, "record": full}


# ---------------------------------------------------------------------------
# sharp-constant check for fractional powers of positive matrices


def psd_power(A, alpha: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (A + A.conj().T))
    vals = np.where(vals > 1e-14 * max(vals[-1], 0.0), vals, 0.0)
    return (vecs * vals ** alpha) @ vecs.conj().T


def bks_ratio(A, B, alpha: float) -> float:
    num = spectral_norm(psd_power(A, alpha) - psd_power(B, alpha))
    den = spectral_norm(A - B) ** alpha
    return safe_ratio(num, den)


def bks_check(alphas=(0.25, 0.5, 0.75), trials: int = 10_000, seed: int = 0, dims=(1, 8),
              tol: float = 1e-10) -> ExperimentRecord:
    """||A^a - B^a|| <= ||A - B||^a for positive semidefinite pairs; raises on violation."""
    rec = ExperimentRecord(_exp_id("bks", seed, {"trials": trials}), "bks",
                           {"alphas": list(alphas), "trials": trials, "dims": list(dims)}, seed)
    for i in range(trials):
        rng = trial_rng(seed, i)
        n = int(rng.integers(dims[0], dims[1] + 1))
        alpha = alphas[i % len(alphas)]
        A, B = _psd_sample(rng, n), _psd_sample(rng, n)
        if rng.random() < 0.25:
            B = A + _psd_sample(rng, n) * 10 ** rng.uniform(-6, 0)  # ordered pairs, near and far
        r = bks_ratio(A, B, alpha)
        rec.rows.append({"tag": "bks", "trial": i, "phase": "random", "dim": n, "seed": seed,
                         "delta": alpha, "numerator": r * spectral_norm(A - B) ** alpha,
                         "denominator": spectral_norm(A - B) ** alpha, "ratio": r})
        if r > 1 + tol:
            raise InvariantViolation(f"fractional power bound violated: ratio {r!r}",
                                     {"A": A, "B": B, "alpha": alpha})
    return rec


def _psd_sample(rng, n):
    X = ginibre(rng, n, int(rng.integers(1, n + 1)))  # random rank
    A = X @ X.conj().T
    return A * 10 ** rng.uniform(-2, 1) / spectral_norm(A)


# ---------------------------------------------------------------------------
# measures, exponent fits and block identities


def measure_average(f: FunctionModel, A, K, atoms) -> np.ndarray:
    """int f(A - tK) d nu(t) for nu = sum_j lam_j Delta^{m_j}_{h_j} delta_{a_j}.

    Delta^m_h delta_a = sum_k (-1)^(m-k) C(m,k) delta_{a - kh}, so an atom
    contributes sum_k (-1)^(m-k) C(m,k) f(A - (a - kh) K).  With nu the m-th
    difference of delta_0 at step 1 this is the m-th operator difference.
    ``atoms`` holds tuples (lam, h, a, m).
    """
    A, K = np.asarray(A), np.asarray(K)
    out = np.zeros(A.shape, dtype=complex)
    for lam, h, a, m in atoms:
        for k in range(m + 1):
            out = out + lam * (-1) ** (m - k) * math.comb(m, k) * func_of(A - (a - k * h) * K, f)
    return out


def exponent_fit(deltas, values=None) -> dict:
    """Least-squares slope of log(value) against log(delta)."""
    if isinstance(deltas, ExperimentRecord):
        rows = deltas.rows
        deltas = [r["delta"] for r in rows]
        values = [r["numerator"] for r in rows]
    x, y = np.log(np.asarray(deltas, float)), np.log(np.asarray(values, float))
    if len(x) < 2 or np.ptp(x) == 0:
        raise ValueError("degenerate sweep")
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss = np.sum((y - y.mean()) ** 2)
    return {"slope": float(slope), "intercept": float(icpt),
            "r2": float(1 - np.sum(resid ** 2) / ss) if ss > 0 else 1.0}


def scaled_sweep(f: FunctionModel, A, K0, deltas, seed: int = 0, tag: str = "sweep") -> ExperimentRecord:
    rec = ExperimentRecord(_exp_id(tag, seed, {"n": len(A)}), tag, {"f": f.name, "dim": len(A)}, seed)
    fa = func_of(A, f)
    for i, d in enumerate(deltas):
        num = spectral_norm(func_of(A + d * K0, f) - fa)
        rec.rows.append({"tag": tag, "trial": i, "phase": "sweep", "dim": len(A), "seed": seed,
                         "delta": float(d), "numerator": num, "denominator": float(d),
                         "ratio": safe_ratio(num, d)})
    return rec


def exponent_experiment(f: FunctionModel, dim: int = 8, seed: int = 0,
                        deltas=None) -> dict:
    """Slope of ||f(A + dK) - f(A)|| in d for a base A with a large kernel.

    Half of the spectrum of A sits at 0 and the rest in +-[1/2, 1].  Without
    eigenvalues at the singular point of |t|^a the response is locally smooth
    and the fitted slope is 1; the kernel puts the singularity in play and the
    gap keeps the smooth part from dominating at the top of the sweep.
    """
    rng = trial_rng(seed, 0)
    deltas = np.geomspace(1e-4, 1e-1, 13) if deltas is None else deltas
    ker = max(dim // 2, 1)
    vals = np.concatenate([np.zeros(ker),
                           rng.choice([-1.0, 1.0], dim - ker) * rng.uniform(0.5, 1.0, dim - ker)])
    Q = unitary(rng, dim)
    A = (Q * vals) @ Q.conj().T
    K0 = hermitian_direction(rng, dim, 1.0)
    rec = scaled_sweep(f, A, K0, deltas, seed)
    return {"record": rec, **exponent_fit(rec)}


def block_identity_checks(A, B, R, f: FunctionModel | None = None) -> dict:
    """Residuals of the 2x2 block norm identities used to compare commutator moduli.

    With AA = diag(A, A) and RR = [[0, R], [R*, 0]]:
      ||AA RR - RR AA|| = max(||AR - RA||, ||AR* - R*A||) = ||AR - RA||.
    With AA = diag(A, B), BB = diag(B, A), RR = diag(R, R*):
      ||AA RR - RR BB|| = max(||AR - RB||, ||BR* - R*A||) = ||AR - RB||,
    and the same with f applied to the diagonal operators.
    """
    f = f or fn.sin_fn()
    A, B, R = (np.asarray(M, dtype=complex) for M in (A, B, R))
    n = len(A)
    Z = np.zeros((n, n))
    Rs = R.conj().T
    AA = np.block([[A, Z], [Z, A]])
    R1 = np.block([[Z, R], [Rs, Z]])
    c1, c2 = spectral_norm(A @ R - R @ A), spectral_norm(A @ Rs - Rs @ A)
    fA, fB = func_of(A, f), func_of(B, f)
    out = {
        "self_adjoint_lift": abs(spectral_norm(commutator(AA, R1)) - max(c1, c2)),
        "adjoint_symmetry": abs(max(c1, c2) - c1),
        "self_adjoint_lift_f": abs(spectral_norm(func_of(AA, f) @ R1 - R1 @ func_of(AA, f))
                                   - max(spectral_norm(fA @ R - R @ fA), spectral_norm(fA @ Rs - Rs @ fA))),
    }
    AB = np.block([[A, Z], [Z, B]])
    BA = np.block([[B, Z], [Z, A]])
    R2 = np.block([[R, Z], [Z, Rs]])
    q1, q2 = spectral_norm(A @ R - R @ B), spectral_norm(B @ Rs - Rs @ A)
    swap = np.block([[Z, np.eye(n)], [np.eye(n), Z]])
    out.update({
        "pair_lift": abs(spectral_norm(AB @ R2 - R2 @ BA) - max(q1, q2)),
        "pair_symmetry": abs(max(q1, q2) - q1),
        "pair_lift_f": abs(spectral_norm(func_of(AB, f) @ R2 - R2 @ func_of(BA, f))
                           - max(spectral_norm(fA @ R - R @ fB), spectral_norm(fB @ Rs - Rs @ fA))),
        "unitary_equivalence": spectral_norm(swap @ AB @ swap - BA),
    })
    return out


def mcc_bound_factor(tau: float) -> float:
    return tau + tau ** 2 / math.sqrt(1 - tau ** 2)


def mcc_construction(A, R, tau: float = 0.5) -> dict:
    """Unitary [[tR, S], [-S, tR]] with S = (I - t^2 R^2)^(1/2) for a self-adjoint contraction R."""
    R = np.asarray(R, dtype=complex)
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    if spectral_norm(R) > 1 + 1e-12:
        raise ValueError("R must be a contraction")
    n = len(R)
    S = psd_sqrt(np.eye(n) - tau ** 2 * R @ R)
    U = np.block([[tau * R, S], [-S, tau * R]])
    res = spectral_norm(U.conj().T @ U - np.eye(2 * n))
    if res > 1e-12:
        raise InvariantViolation(f"block is not unitary (residual {res:.3e})")
    out = {"U": U, "bound_factor": mcc_bound_factor(tau), "unitarity": res}
    if A is not None:
        A = np.asarray(A, dtype=complex)
        AA = np.kron(np.eye(2), A)
        out["lifted_commutator"] = spectral_norm(AA @ U - U @ AA)
        out["commutator"] = spectral_norm(A @ R - R @ A)
    return out


def lemma_sweep(which: str, trials: int = 10_000, seed: int = 0, dims=(1, 8), n_max: int = 6,
                t_max: float = 0.95) -> float:
    """Smallest slack over random instances of the power-commutator or defect-root lemma."""
    worst = math.inf
    for i in range(trials):
        rng = trial_rng(seed, i)
        d = int(rng.integers(dims[0], dims[1] + 1))
        X = ginibre(rng, d)
        if which == "pl":
            Y = ginibre(rng, d) * rng.uniform(0.1, 2.0) / math.sqrt(d)
            slack = lemma_pl_slack(X, Y, int(rng.integers(1, n_max + 1)))
            scale = max(spectral_norm(Y) ** (n_max - 1), 1.0) * spectral_norm(X) * spectral_norm(Y)
        elif which == "vl":
            T = hermitian(rng, d, rng.uniform(0.0, t_max)) if d > 1 else np.array([[rng.uniform(-t_max, t_max)]])
            slack = lemma_vl_slack(X, T)
            scale = 1.0
        else:
            raise ValueError(which)
        worst = min(worst, slack / max(scale, 1.0))
    return worst


# ---------------------------------------------------------------------------
# absolute value explorer


def abs_explorer(dims=(1, 2, 4, 8, 16), budget: int = 200, ascent_runs: int = 8,
                 ascent_iters: int = 60, seed: int = 0) -> ExperimentRecord:
    """Best ||(|A| - |B|)|| / ||A - B|| found per dimension, with a running envelope."""
    g = fn.abs_fn()
    rec = ExperimentRecord(_exp_id("abs", seed, {"dims": tuple(dims)}), "abs",
                           {"dims": list(dims), "budget": budget}, seed)
    best_so_far, best_w = 0.0, None
    for n in dims:
        def builder(src, n=n):
            A = hermitian(src, n, 1.0) if n > 1 else np.array([[src.uniform(-1, 1)]], dtype=complex)
            K = hermitian_direction(src, n, _log_uniform(src, 1e-3, 1.0))
            num = spectral_norm(func_of(A + K, g) - func_of(A, g))
            return dict(dim=n, delta=spectral_norm(K), num=num, den=spectral_norm(K),
                        witness={"A": A, "B": A + K})
        sub = run_search("abs", builder, budget, seed + n, ascent_runs, ascent_iters)
        raw = sub.summary()["max_ratio"]
        if raw > best_so_far:
            best_so_far, best_w = raw, sub.witness
        rec.rows.append({"tag": "abs", "trial": n, "phase": "best", "dim": n, "seed": seed,
                         "delta": 0.0, "numerator": raw, "denominator": 1.0,
                         "ratio": best_so_far})
    rec.witness = best_w
    return rec
