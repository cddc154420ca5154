"""Lower bounds for operator moduli of continuity by randomized ascent.

Functionals (tags):
  "f"  ||f(A) - f(B)||          over self-adjoint A, B with ||A - B|| <= delta
  "1"  ||f(A)R - Rf(A)||        over self-adjoint A, R, ||R|| = 1, ||AR - RA|| <= delta
  "2"  same with R arbitrary,   ||R|| = 1
  "3"  ||f(A)R - Rf(B)||        over self-adjoint A, B, ||R|| = 1, ||AR - RB|| <= delta
Every estimate is re-evaluated at its witness, so it is a certified lower bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds_verifier import mcc_construction
from .functions import CIRCLE, FunctionModel, identity
from .matrix_calc import dd_symbol, decompose, doi, func_of, spectral_norm
from .sampling import ginibre, hermitian, hermitian_direction, trial_rng

TAGS = ("f", "1", "2", "3")


@dataclass
class OmegaEstimate:
    delta: float
    lower_bound: float
    witness: dict
    tag: str
    constraint: float
    trace: dict = field(default_factory=dict)


def _herm(Z):
    return 0.5 * (Z + Z.conj().T)


def _clip_hermitian(X, bound):
    vals, vecs = np.linalg.eigh(_herm(X))
    return (vecs * np.clip(vals, -bound, bound)) @ vecs.conj().T


def evaluate(tag: str, f: FunctionModel, w: dict) -> tuple:
    """(functional value, constraint value) at a witness."""
    if tag == "f":
        return spectral_norm(func_of(w["A"], f) - func_of(w["B"], f)), spectral_norm(w["A"] - w["B"])
    A, R = w["A"], w["R"]
    if tag in ("1", "2"):
        fA = func_of(A, f)
        return spectral_norm(fA @ R - R @ fA), spectral_norm(A @ R - R @ A)
    if tag == "3":
        B = w["B"]
        return (spectral_norm(func_of(A, f) @ R - R @ func_of(B, f)),
                spectral_norm(A @ R - R @ B))
    raise ValueError(f"unknown functional tag {tag!r}")


def _top_pair(M):
    u, s, vh = np.linalg.svd(M)
    if len(s) > 1 and s[0] - s[1] <= 1e-12 * max(s[0], 1e-300):
        return (u[:, 0] + u[:, 1]) / math.sqrt(2), (vh[0] + vh[1]).conj() / math.sqrt(2)
    return u[:, 0], vh[0].conj()


def _frechet_adjoint(f, X, W):
    """Adjoint of H -> Df(X)[H] applied to W (real f: the symbol is real)."""
    spec = decompose(_herm(X))
    return doi(dd_symbol(f), spec, spec, W)


def _gradient(tag, f, w):
    """Ascent directions for each witness component (top singular pair subgradient)."""
    if tag == "f":
        A, B = w["A"], w["B"]
        M = func_of(A, f) - func_of(B, f)
        u, v = _top_pair(M)
        W = np.outer(u, v.conj())
        gA = _herm(_frechet_adjoint(f, A, W))
        gB = -_herm(_frechet_adjoint(f, B, W))
        return {"A": gA, "B": gB}
    A, R = w["A"], w["R"]
    B = w.get("B", A)
    fA, fB = func_of(A, f), func_of(B, f)
    M = fA @ R - R @ fB
    u, v = _top_pair(M)
    W = np.outer(u, v.conj())
    gR = fA.conj().T @ W - W @ fB.conj().T
    out = {"R": _herm(gR) if tag == "1" else gR}
    if tag == "3":
        out["A"] = _herm(_frechet_adjoint(f, A, W @ R.conj().T))
        out["B"] = -_herm(_frechet_adjoint(f, B, R.conj().T @ W))
    else:
        out["A"] = _herm(_frechet_adjoint(f, A, W @ R.conj().T - R.conj().T @ W))
    return out


def _project(tag, w, delta, L):
    """Map a candidate back into the feasible set."""
    if tag == "f":
        A = _clip_hermitian(w["A"], L)
        K = _clip_hermitian(w["B"] - w["A"], delta)
        return {"A": A, "B": A + K}
    out = dict(w)
    R = w["R"]
    if tag == "1":
        R = _herm(R)
    out["R"] = R / spectral_norm(R)
    out["A"] = _clip_hermitian(w["A"], L)
    if tag == "3":
        out["B"] = _clip_hermitian(w["B"], L)
    _, c = evaluate(tag, _Identity, out)
    if c > delta:
        # scaling the self-adjoint parts scales the commutator linearly
        s = delta / c * (1 - 1e-12)
        out["A"] = s * out["A"]
        if tag == "3":
            out["B"] = s * out["B"]
    return out


_Identity = identity()


def _random_start(tag, rng, dim, delta, L):
    A = hermitian(rng, dim, L * rng.uniform(0.2, 1.0)) if dim > 1 else np.array([[rng.uniform(-L, L)]], dtype=complex)
    if tag == "f":
        return {"A": A, "B": A + hermitian_direction(rng, dim, delta)}
    if tag == "1":
        R = hermitian(rng, dim, 1.0) if dim > 1 else np.ones((1, 1), dtype=complex)
        return {"A": A, "R": R}
    R = ginibre(rng, dim)
    R = R / spectral_norm(R)
    w = {"A": A, "R": R}
    if tag == "3":
        w["B"] = A + hermitian_direction(rng, dim, delta)
    return w


def _structured_starts(tag, dim, delta, L):
    """Deterministic starts: a rank-one step at the origin and a uniform shift."""
    if tag != "f":
        return []
    e = np.zeros((dim, dim), dtype=complex)
    e[0, 0] = 1.0
    zero = np.zeros((dim, dim), dtype=complex)
    return [{"A": zero, "B": delta * e}, {"A": zero, "B": delta * np.eye(dim)},
            {"A": -0.5 * delta * e, "B": 0.5 * delta * e}]


def omega_search(f: FunctionModel, delta: float, dim: int = 4, restarts: int = 20, iters: int = 200,
                 tag: str = "f", L: float = 1.0, seed: int = 0, warm=None) -> OmegaEstimate:
    """Projected subgradient ascent with accept-if-better steps, best over restarts.

    ``warm`` is a list of feasible witnesses (e.g. from a smaller delta) added
    to the starting pool, which makes delta-sweeps nondecreasing.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if tag not in TAGS:
        raise ValueError(f"unknown functional tag {tag!r}")
    starts = _structured_starts(tag, dim, delta, L) + list(warm or [])
    for r in range(restarts):
        starts.append(_random_start(tag, trial_rng(seed, r), dim, delta, L))
    best_val, best_w, evals = -1.0, None, 0
    for k, w in enumerate(starts):
        w = _project(tag, w, delta, L)
        val, _ = evaluate(tag, f, w)
        evals += 1
        rng = trial_rng(seed, 10_000 + k)
        step = 0.1 * delta
        for _ in range(iters):
            try:
                g = _gradient(tag, f, w)
                ok = all(np.all(np.isfinite(x)) for x in g.values())
            except (ValueError, FloatingPointError, np.linalg.LinAlgError):
                ok = False
            if not ok:
                # nonsmooth point: random direction instead
                g = {key: _herm(ginibre(rng, dim)) for key in w}
            norm = math.sqrt(sum(np.linalg.norm(x) ** 2 for x in g.values())) or 1.0
            cand = {key: w[key] + step * g.get(key, 0) / norm for key in w}
            cand = _project(tag, cand, delta, L)
            cval, _ = evaluate(tag, f, cand)
            evals += 1
            if cval > val:
                w, val = cand, cval
                step *= 1.2
            else:
                step *= 0.7
            if step < 1e-10 * delta:
                break
        if val > best_val:
            best_val, best_w = val, w
    value, cons = evaluate(tag, f, best_w)
    return OmegaEstimate(delta, value, best_w, tag, cons,
                         {"restarts": restarts, "iters": iters, "evaluations": evals, "dim": dim, "L": L})


def omega_sweep(f: FunctionModel, deltas, dim: int = 4, restarts: int = 10, iters: int = 100,
                tag: str = "f", L: float = 1.0, seed: int = 0) -> list:
    """Warm-started sweep over increasing deltas; estimates are nondecreasing."""
    out, pool = [], []
    for d in sorted(deltas):
        est = omega_search(f, d, dim, restarts, iters, tag, L, seed, warm=pool)
        out.append(est)
        pool = [est.witness]
    return out


def mcc_transfer(witness: dict, direction: str, f: FunctionModel, tau: float = 0.5) -> dict:
    """Carry a witness between the operator and commutator functionals.

    "f->3": (A, B) becomes (A, B, R = I) with the same value.
    "1->f": (A, R) becomes (diag(A, A), U* diag(A, A) U) through the unitary
    block of :func:`mcc_construction`; the value is at least tau times the
    source value and the constraint at most the bound factor times the source
    constraint.
    """
    if direction == "f->3":
        A, B = witness["A"], witness["B"]
        new = {"A": A, "B": B, "R": np.eye(len(A), dtype=complex)}
        src_val, src_c = evaluate("f", f, witness)
        val, c = evaluate("3", f, new)
        return {"witness": new, "tag": "3", "value": val, "constraint": c,
                "source_value": src_val, "source_constraint": src_c,
                "ok": abs(val - src_val) <= 1e-12 * max(1.0, src_val) and abs(c - src_c) <= 1e-12 * max(1.0, src_c)}
    if direction == "1->f":
        A, R = witness["A"], witness["R"]
        src_val, src_c = evaluate("1", f, witness)
        blk = mcc_construction(A, R, tau)
        U = blk["U"]
        AA = np.kron(np.eye(2), A)
        BB = _herm(U.conj().T @ AA @ U)
        new = {"A": AA, "B": BB}
        val, c = evaluate("f", f, new)
        ok = val >= tau * src_val - 1e-9 and c <= blk["bound_factor"] * src_c + 1e-9
        return {"witness": new, "tag": "f", "value": val, "constraint": c,
                "source_value": src_val, "source_constraint": src_c,
                "bound_factor": blk["bound_factor"], "ok": bool(ok)}
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# countable-family registry


@dataclass
class Registry:
    """Finite-rank pairs with rational entries and running maxima per delta."""

    f: FunctionModel
    deltas: np.ndarray
    maxima: np.ndarray = None
    entries: list = field(default_factory=list)
    q: int = 2
    cursor: int = 0

    def __post_init__(self):
        self.deltas = np.asarray(self.deltas, dtype=float)
        if self.maxima is None:
            self.maxima = np.zeros(len(self.deltas))

    def append(self, A, B):
        A, B = np.atleast_2d(A).astype(complex), np.atleast_2d(B).astype(complex)
        val, dist = evaluate("f", self.f, {"A": A, "B": B})
        self.entries.append((A, B))
        hit = self.deltas >= dist - 1e-15
        self.maxima = np.where(hit, np.maximum(self.maxima, val), self.maxima)
        return self


def _rational_symmetric(rng, dim, q):
    X = rng.integers(-q, q + 1, size=(dim, dim)) / q
    return np.triu(X) + np.triu(X, 1).T


def registry_extend(reg: Registry, budget: int = 64) -> Registry:
    """Append ``budget`` rational pairs (dimension <= 4, entries on the 1/q grid);
    q doubles after every full pass over the dimensions."""
    for _ in range(budget):
        rng = np.random.default_rng(np.random.SeedSequence([reg.q, reg.cursor]))
        dim = 1 + reg.cursor % 4
        A = _rational_symmetric(rng, dim, reg.q)
        K = _rational_symmetric(rng, dim, reg.q) / reg.q
        reg.append(A, A + K)
        reg.cursor += 1
        if reg.cursor % 16 == 0:
            reg.q *= 2
    return reg


# ---------------------------------------------------------------------------
# Zygmund growth


def _is_bounded(f: FunctionModel) -> bool:
    if f.domain == CIRCLE:
        return True
    if f.coeffs is not None:
        return f.degree == 0
    xs = np.linspace(-1e6, 1e6, 200_001)
    near = np.max(np.abs(f(np.linspace(-1e3, 1e3, 20_001))))
    far = np.max(np.abs(f(xs)))
    return bool(np.isfinite(far) and far <= 1.5 * near + 1e-12)


def zygmund_fit(f: FunctionModel, deltas=None, dim: int = 4, restarts: int = 6, iters: int = 60,
                seed: int = 0) -> dict:
    """C_hat = max over deltas of estimate / (delta log(2/delta)), delta <= 1."""
    if not _is_bounded(f):
        raise ValueError(f"{f.name} is unbounded; the growth fit needs a bounded function")
    deltas = [2.0 ** -k for k in range(1, 11)] if deltas is None else deltas
    if any(d > 1 for d in deltas):
        raise ValueError("deltas must not exceed 1")
    ests = omega_sweep(f, deltas, dim, restarts, iters, "f", 1.0, seed)
    ratios = [e.lower_bound / (e.delta * math.log(2 / e.delta)) for e in ests]
    i = int(np.argmax(ratios))
    return {"C_hat": float(ratios[i]), "argmax_delta": ests[i].delta, "ratios": ratios,
            "estimates": [e.lower_bound for e in ests], "deltas": [e.delta for e in ests]}
