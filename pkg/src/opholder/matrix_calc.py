"""Finite-dimensional spectral calculus.

Spectral measures of Hermitian and unitary matrices are atomic, so double and
multiple operator integrals reduce to entrywise products and tensor
contractions in eigenbases.  Everything here works on plain numpy arrays.
"""
from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .functions import CIRCLE, FunctionModel

HERMITIAN = "hermitian"
UNITARY = "unitary"
MOI_MAX_ORDER = 4


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues plus an orthonormal eigenbasis (columns of ``vectors``)."""

    values: np.ndarray
    vectors: np.ndarray
    kind: str = HERMITIAN

    @property
    def dim(self) -> int:
        return len(self.values)

    def matrix(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def apply(self, fvals) -> np.ndarray:
        return (self.vectors * fvals) @ self.vectors.conj().T


def spectral_norm(X) -> float:
    X = np.asarray(X)
    if X.size == 0:
        return 0.0
    return float(np.linalg.svd(np.atleast_2d(X), compute_uv=False)[0])


def is_hermitian(A, tol: float = 1e-12) -> bool:
    A = np.asarray(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and (
        spectral_norm(A - A.conj().T) <= tol * max(spectral_norm(A), 1e-300)
    )


def is_unitary(U, tol: float = 1e-10) -> bool:
    U = np.asarray(U)
    return spectral_norm(U.conj().T @ U - np.eye(len(U))) <= tol


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # first component above noise made positive real, for reproducible reports
    vecs = vecs.astype(complex)
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))
        if len(idx):
            c = col[idx[0]]
            vecs[:, j] = col * (abs(c) / c)
    return vecs


def eig(A, tol: float = 1e-12) -> SpectralDecomposition:
    """Ascending eigen-decomposition of a Hermitian matrix."""
    A = np.asarray(A)
    if not is_hermitian(A, tol):
        raise ValueError("matrix is not Hermitian")
    A = 0.5 * (A + A.conj().T)
    vals, vecs = np.linalg.eigh(A)
    return SpectralDecomposition(vals, _fix_phases(vecs), HERMITIAN)


def unitary_eig(U, tol: float = 1e-10) -> SpectralDecomposition:
    """Eigen-decomposition of a unitary matrix through the complex Schur form.

    For normal matrices the Schur factor is diagonal, so the Schur vectors are
    an orthonormal eigenbasis even for clustered eigenvalues.
    """
    U = np.asarray(U, dtype=complex)
    if not is_unitary(U, tol):
        raise ValueError("matrix is not unitary")
    T, Z = scipy.linalg.schur(U, output="complex")
    return SpectralDecomposition(np.diag(T).copy(), Z, UNITARY)


def decompose(A) -> SpectralDecomposition:
    if isinstance(A, SpectralDecomposition):
        return A
    A = np.asarray(A)
    if is_hermitian(A):
        return eig(A)
    return unitary_eig(A)


def func_of(A, f: FunctionModel) -> np.ndarray:
    """f(A) by the spectral theorem; ``A`` may be a matrix or a decomposition."""
    if f.coeffs is not None and f.degree == 0:
        # constants are exact: no rounding from the eigenvector round trip
        n = A.dim if isinstance(A, SpectralDecomposition) else len(A)
        return complex(f.coeffs.get(0, 0)) * np.eye(n)
    spec = decompose(A)
    fv = np.asarray(f(spec.values))
    if not np.all(np.isfinite(fv)):
        raise ValueError(f"{f.name} is undefined at an eigenvalue")
    out = spec.apply(fv)
    if spec.kind == HERMITIAN and f.domain != CIRCLE and f.is_real_valued():
        out = 0.5 * (out + out.conj().T)
    return out


def laurent_func_of(U, f: FunctionModel) -> np.ndarray:
    """sum c_p U^p for a trigonometric polynomial, via matrix powers (U^-1 = U*)."""
    if f.coeffs is None:
        raise ValueError("needs a Laurent polynomial")
    U = np.asarray(U, dtype=complex)
    out = np.zeros_like(U)
    for p, c in f.coeffs.items():
        base = U if p >= 0 else U.conj().T
        out = out + c * np.linalg.matrix_power(base, abs(p))
    return out


def psd_sqrt(M) -> np.ndarray:
    """Square root of a positive semidefinite matrix, clamping tiny negative eigenvalues."""
    M = 0.5 * (M + np.conj(M).T)
    vals, vecs = np.linalg.eigh(M)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


# ---------------------------------------------------------------------------
# divided differences


def _complete_homogeneous(xs: Sequence[np.ndarray], top: int) -> list:
    """h_0..h_top of the variables xs (broadcastable arrays)."""
    shape = np.broadcast_shapes(*(np.shape(x) for x in xs))
    dtype = np.result_type(*xs, float)
    H = [np.ones(shape, dtype=dtype)] + [np.zeros(shape, dtype=dtype) for _ in range(top)]
    for x in xs:
        for r in range(1, top + 1):
            H[r] = H[r] + x * H[r - 1]
    return H


def _dd_laurent(coeffs, xs: Sequence[np.ndarray]) -> np.ndarray:
    k = len(xs) - 1
    pos = [p for p, c in coeffs.items() if p >= k and c != 0]
    neg = [-p for p, c in coeffs.items() if p < 0 and c != 0]
    shape = np.broadcast_shapes(*(np.shape(x) for x in xs))
    dtype = np.result_type(*xs, *[np.asarray(c) for c in coeffs.values()], float)
    out = np.zeros(shape, dtype=dtype)
    if pos:
        H = _complete_homogeneous(xs, max(pos) - k)
        for p in pos:
            out = out + coeffs[p] * H[p - k]
    if neg:
        inv = [1.0 / np.asarray(x) for x in xs]
        H = _complete_homogeneous(inv, max(neg) - 1)
        prod = math.prod(inv)
        for p in neg:
            out = out + coeffs[-p] * (-1) ** k * H[p - 1] * prod
    return out


def _dd_newton(f: FunctionModel, nodes: np.ndarray) -> np.ndarray:
    """Newton table along the last axis with a confluent fallback."""
    order = np.argsort(nodes.real if np.iscomplexobj(nodes) else nodes, axis=-1, kind="stable")
    x = np.take_along_axis(nodes, order, axis=-1)
    k = x.shape[-1] - 1
    tol = 1e-7 * (1.0 + np.max(np.abs(x), axis=-1, keepdims=True))
    d = f(x)
    for r in range(1, k + 1):
        lo, hi = x[..., : k + 1 - r], x[..., r:]
        gap = hi - lo
        conf = np.abs(gap) < tol
        with np.errstate(divide="ignore", invalid="ignore"):
            d_new = (d[..., 1:] - d[..., :-1]) / gap
        if np.any(conf):
            if f.deriv is None:
                raise ValueError(f"{f.name}: confluent nodes need derivative of order {r}")
            mid = 0.5 * (lo + hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                dv = f.derivative(mid, r) / math.factorial(r)
            d_new = np.where(conf, dv, d_new)
        d = d_new
    return d[..., 0]


def dd_grid(f: FunctionModel, node_sets: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor D[i1,..,i_{k+1}] = (D^k f)(x1[i1], .., x_{k+1}[i_{k+1}])."""
    k1 = len(node_sets)
    axes = []
    for j, xs in enumerate(node_sets):
        shape = [1] * k1
        shape[j] = len(xs)
        axes.append(np.asarray(xs).reshape(shape))
    if f.coeffs is not None:
        return _dd_laurent(f.coeffs, axes)
    full = np.broadcast_arrays(*axes)
    return _dd_newton(f, np.stack(full, axis=-1))


def divided_diff(f: FunctionModel, nodes, k: int | None = None):
    """(D^k f) at ``k+1`` nodes, repeats allowed."""
    nodes = np.asarray(nodes)
    if k is None:
        k = len(nodes) - 1
    if len(nodes) != k + 1:
        raise ValueError(f"order {k} needs {k + 1} nodes, got {len(nodes)}")
    val = dd_grid(f, [np.array([x]) for x in nodes]).reshape(-1)[0]
    return val.item()


def divided_diff_explicit(f: FunctionModel, nodes):
    """sum_k f(x_k) / prod_{j != k} (x_k - x_j); distinct nodes only."""
    nodes = np.asarray(nodes)
    total = 0.0
    for i, xi in enumerate(nodes):
        others = np.delete(nodes, i)
        total = total + f(xi) / np.prod(xi - others)
    return total


@dataclass(frozen=True)
class DividedDiffTable:
    nodes: tuple
    order: int
    value: complex

    @classmethod
    def build(cls, f: FunctionModel, nodes):
        nodes = tuple(np.asarray(nodes).tolist())
        return cls(nodes, len(nodes) - 1, divided_diff(f, nodes))


@dataclass(frozen=True)
class GridSymbol:
    """Bivariate symbol evaluated directly on a pair of spectra."""

    grid: Callable

    def __call__(self, lam, mu):
        return self.grid(np.asarray(lam), np.asarray(mu))


def dd_symbol(f: FunctionModel) -> GridSymbol:
    """The first divided difference as a bivariate symbol for :func:`doi`."""
    return GridSymbol(lambda lam, mu: dd_grid(f, [lam, mu]))


# ---------------------------------------------------------------------------
# operator integrals


def symbol_matrix(phi, lam, mu) -> np.ndarray:
    if isinstance(phi, GridSymbol):
        return np.asarray(phi(lam, mu))
    if callable(phi):
        out = phi(np.asarray(lam)[:, None], np.asarray(mu)[None, :])
        return np.broadcast_to(out, (len(lam), len(mu)))
    return np.asarray(phi)


def doi(phi, A, B, X) -> np.ndarray:
    """Double operator integral of ``X`` against the spectral measures of A and B.

    ``phi`` is a matrix Phi[i, j] = phi(lam_i, mu_j), a :class:`GridSymbol`, or
    a plain callable broadcast over the outer grid of the two spectra.
    """
    sa, sb = decompose(A), decompose(B)
    X = np.asarray(X)
    if X.shape != (sa.dim, sb.dim):
        raise ValueError(f"X has shape {X.shape}, expected {(sa.dim, sb.dim)}")
    Phi = symbol_matrix(phi, sa.values, sb.values)
    Y = sa.vectors.conj().T @ X @ sb.vectors
    return sa.vectors @ (Phi * Y) @ sb.vectors.conj().T


def moi(f: FunctionModel, m: int, spectra, factors, max_order: int = MOI_MAX_ORDER) -> np.ndarray:
    """Multiple operator integral of (D^m f) with measures ``spectra`` and ``factors``.

    Returns sum over eigen-index tuples of D^m f(lam^(1)_i1, .., lam^(m+1)_i(m+1))
    times P1 X1 P2 X2 ... Xm P(m+1); cost O(n^(m+1)).  No m! factor.
    """
    if m < 1 or len(spectra) != m + 1 or len(factors) != m:
        raise ValueError("need m+1 spectra and m factors")
    if m > max_order:
        raise ValueError(f"order {m} exceeds the cost guard {max_order}")
    specs = [decompose(s) for s in spectra]
    for k, X in enumerate(factors):
        if np.shape(X) != (specs[k].dim, specs[k + 1].dim):
            raise ValueError(f"factor {k} has shape {np.shape(X)}")
    D = dd_grid(f, [s.values for s in specs])
    Ys = [specs[k].vectors.conj().T @ factors[k] @ specs[k + 1].vectors for k in range(m)]
    idx = string.ascii_lowercase[: m + 1]
    expr = idx + "," + ",".join(idx[k : k + 2] for k in range(m)) + "->" + idx[0] + idx[-1]
    M = np.einsum(expr, D, *Ys, optimize=True)
    return specs[0].vectors @ M @ specs[-1].vectors.conj().T


def op_finite_diff(f: FunctionModel, A, K, m: int) -> np.ndarray:
    """sum_j (-1)^(m-j) C(m, j) f(A + jK)."""
    A, K = np.asarray(A), np.asarray(K)
    return sum((-1) ** (m - j) * math.comb(m, j) * func_of(A + j * K, f) for j in range(m + 1))


def lemma_m_moi(f: FunctionModel, A, K, m: int) -> np.ndarray:
    """m! times the multiple integral over E_A, E_{A+K}, .., E_{A+mK} with factors K."""
    A, K = np.asarray(A), np.asarray(K)
    spectra = [eig(A + j * K) for j in range(m + 1)]
    return math.factorial(m) * moi(f, m, spectra, [K] * m)


def frechet_derivative(f: FunctionModel, A, H) -> np.ndarray:
    spec = decompose(A)
    return doi(dd_symbol(f), spec, spec, H)


def bsf_residual(f: FunctionModel, A, K) -> float:
    """Relative residual of f(A+K) - f(A) = doi(Df; A+K, A; K)."""
    A, K = np.asarray(A), np.asarray(K)
    direct = func_of(A + K, f) - func_of(A, f)
    via = doi(dd_symbol(f), A + K, A, K)
    return spectral_norm(direct - via) / max(spectral_norm(direct), spectral_norm(via), 1e-300)


def unitary_second_diff(f: FunctionModel, U, Vc) -> dict:
    """f(VU) - 2f(U) + f(V*U) directly and through the three-point expansion.

    With U1 = VU, U2 = U, U3 = V*U the expansion is
    2 * triple integral over (E1, E2, E3) with factors U1-U2, U2-U3
    plus the double integral over (E1, E3) of U1 - 2U2 + U3.
    """
    U, Vc = np.asarray(U, dtype=complex), np.asarray(Vc, dtype=complex)
    if not (is_unitary(U) and is_unitary(Vc)):
        raise ValueError("inputs must be unitary")
    U1, U2, U3 = Vc @ U, U, Vc.conj().T @ U
    direct = laurent_func_of(U1, f) - 2 * laurent_func_of(U2, f) + laurent_func_of(U3, f)
    E = [unitary_eig(M) for M in (U1, U2, U3)]
    triple = moi(f, 2, E, [U1 - U2, U2 - U3])
    double = doi(dd_symbol(f), E[0], E[2], U1 - 2 * U2 + U3)
    via = 2 * triple + double
    return {"direct": direct, "via_N3": via, "residual": spectral_norm(direct - via)}


# ---------------------------------------------------------------------------
# Schur multipliers


def _top_pair(Y):
    u, s, vh = np.linalg.svd(Y)
    if len(s) > 1 and s[0] - s[1] <= 1e-12 * max(s[0], 1e-300):
        # degenerate top: average the first two pairs
        return s[0], (u[:, 0] + u[:, 1]) / math.sqrt(2), (vh[0] + vh[1]).conj() / math.sqrt(2)
    return s[0], u[:, 0], vh[0].conj()


def _clip_unit(X):
    u, s, vh = np.linalg.svd(X, full_matrices=False)
    return (u * np.minimum(s, 1.0)) @ vh


def _lower_bound(Phi, rng, trials, sweeps):
    best, best_X = 0.0, None
    # unit-at-argmax witness
    i, j = np.unravel_index(np.argmax(np.abs(Phi)), Phi.shape)
    E = np.zeros(Phi.shape, dtype=complex)
    E[i, j] = 1
    cands = [E, np.ones(Phi.shape, dtype=complex) / math.sqrt(Phi.size)]
    for _ in range(trials):
        cands.append(rng.standard_normal(Phi.shape) + 1j * rng.standard_normal(Phi.shape))
    for X in cands:
        X = X / spectral_norm(X)
        step = 0.5
        for _ in range(sweeps):
            val = spectral_norm(Phi * X) / spectral_norm(X)
            if val > best:
                best, best_X = val, X
            s, u, v = _top_pair(Phi * X)
            G = np.conj(Phi) * np.outer(u, v.conj())
            X = _clip_unit(X + step * G)
            step *= 0.9
        val = spectral_norm(Phi * X) / spectral_norm(X)
        if val > best:
            best, best_X = val, X
    return best, best_X


def _factor_cost(U, V):
    return float(np.max(np.linalg.norm(U, axis=1)) * np.max(np.linalg.norm(V, axis=1)))


def _upper_bound(Phi, rng, sweeps, extra_rank=3):
    """Alternating min-norm row factorizations Phi = U V^T; returns the best exact one."""
    nrm = max(spectral_norm(Phi), 1e-300)
    W, s, Zh = np.linalg.svd(Phi, full_matrices=False)
    r = max(int(np.sum(s > 1e-13 * s[0])) if s[0] > 0 else 1, 1)
    # trivial factorizations: (I, Phi^T) and (Phi, I)
    best = min(float(np.max(np.linalg.norm(Phi, axis=0))), float(np.max(np.linalg.norm(Phi, axis=1))))
    converged = False
    for extra in range(extra_rank + 1):
        rank = r + extra
        U = np.zeros((Phi.shape[0], rank), dtype=complex)
        V = np.zeros((Phi.shape[1], rank), dtype=complex)
        U[:, :r] = W[:, :r] * np.sqrt(s[:r])
        V[:, :r] = Zh[:r].T * np.sqrt(s[:r])
        if extra:
            V[:, r:] = 1e-2 * math.sqrt(nrm) * rng.standard_normal((Phi.shape[1], rank - r))
        prev = math.inf
        for _ in range(sweeps):
            U = np.linalg.lstsq(V, Phi.T, rcond=None)[0].T
            V = np.linalg.lstsq(U, Phi, rcond=None)[0].T
            if np.linalg.norm(U @ V.T - Phi) <= 1e-10 * nrm:
                cost = _factor_cost(U, V)
                best = min(best, cost)
                if prev - cost <= 1e-12 * cost:
                    converged = True
                    break
                prev = cost
    return best, converged


def schur_norm_bounds(Phi, trials: int = 8, sweeps: int = 60, seed: int = 0) -> dict:
    """Bracket the Schur multiplier norm of ``Phi`` (operator norm on spectral norm).

    lower: projected ascent over X in the unit ball of ||Phi o X||;
    upper: smallest (max_i |u_i|)(max_j |v_j|) over exact factorizations
    Phi_ij = <u_i, v_j> found by alternating least squares.
    """
    Phi = np.asarray(Phi, dtype=complex)
    rng = np.random.default_rng(seed)
    if not np.any(Phi):
        return {"lower": 0.0, "upper": 0.0, "converged": True, "witness": None}
    lower, X = _lower_bound(Phi, rng, trials, sweeps)
    upper, conv = _upper_bound(Phi, rng, sweeps)
    upper = max(upper, lower)  # both are bounds on the same number
    return {"lower": lower, "upper": upper, "converged": conv, "witness": X}


# ---------------------------------------------------------------------------
# commutator lemmas


def commutator(X, Y) -> np.ndarray:
    return X @ Y - Y @ X


def lemma_pl_slack(X, Y, n: int) -> float:
    """n ||Y||^(n-1) ||XY - YX|| - ||X Y^n - Y^n X||  (nonnegative when the lemma holds)."""
    Yn = np.linalg.matrix_power(Y, n)
    return n * spectral_norm(Y) ** (n - 1) * spectral_norm(commutator(X, Y)) - spectral_norm(
        commutator(X, Yn)
    )


def lemma_vl_slack(X, T) -> float:
    """Slack in the commutator bound for the defect root of a self-adjoint ||T|| < 1."""
    t = spectral_norm(T)
    D = psd_sqrt(np.eye(len(T)) - T @ T)
    return t * spectral_norm(commutator(X, T)) / math.sqrt(1 - t * t) - spectral_norm(
        commutator(D, X)
    )


def to_json_matrix(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {
        "n": int(M.shape[0]),
        "rows": [[[float(z.real), float(z.imag)] for z in row] for row in M],
    }


def from_json_matrix(obj) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in obj["rows"]])
