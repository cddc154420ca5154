"""Contractions: polynomial calculus, finite unitary power dilations and
semi-spectral operator integrals obtained by compressing unitary ones."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functions import FunctionModel
from .matrix_calc import dd_symbol, doi, moi, spectral_norm, unitary_eig

CONTRACTION_TOL = 1e-10


def check_contraction(T, tol: float = CONTRACTION_TOL) -> bool:
    return spectral_norm(T) <= 1 + tol


def _analytic_coeffs(f) -> list:
    if isinstance(f, FunctionModel):
        if not f.is_analytic_polynomial:
            raise ValueError(f"{f.name} is not an analytic polynomial")
        deg = f.degree
        return [f.coeffs.get(k, 0) for k in range(deg + 1)]
    return list(f)


def circle_sup(f, points: int = 4096) -> float:
    c = np.asarray(_analytic_coeffs(f), dtype=complex)
    z = np.exp(2j * np.pi * np.arange(points) / points)
    return float(np.max(np.abs(np.polyval(c[::-1], z))))


def horner(T, coeffs) -> np.ndarray:
    T = np.asarray(T, dtype=complex)
    out = np.zeros_like(T)
    eye = np.eye(len(T))
    for c in reversed(coeffs):
        out = out @ T + c * eye
    return out


def sparse_poly_of(T, f: FunctionModel) -> np.ndarray:
    """sum c_p T^p for an analytic polynomial with few, possibly high, powers."""
    T = np.asarray(T, dtype=complex)
    out = np.zeros_like(T)
    cur, at = np.eye(len(T), dtype=complex), 0
    for p in sorted(p for p, c in f.coeffs.items() if c != 0):
        if p < 0:
            raise ValueError("negative power in an analytic polynomial")
        cur = cur @ np.linalg.matrix_power(T, p - at)
        at = p
        out = out + f.coeffs[p] * cur
    return out


def poly_func_of(T, f, check: bool = True) -> np.ndarray:
    """f(T) by Horner; with ``check`` the von Neumann bound is enforced."""
    coeffs = _analytic_coeffs(f)
    out = horner(T, coeffs)
    if check:
        bound = circle_sup(coeffs)
        if spectral_norm(out) > (1 + 1e-8) * bound + 1e-14:
            raise ArithmeticError("von Neumann bound violated; input is not a contraction")
    return out


def defect_operators(T):
    """(I - T*T)^(1/2) and (I - TT*)^(1/2) from one SVD, so that both defect
    identities and the intertwining D_T T* = T* D_T* hold to rounding even
    when singular values sit at 1."""
    W, s, Zh = np.linalg.svd(T)
    root = np.sqrt(np.clip(1.0 - np.minimum(s, 1.0) ** 2, 0.0, None))
    return (Zh.conj().T * root) @ Zh, (W * root) @ W.conj().T


@dataclass(frozen=True)
class FiniteUnitaryDilation:
    """Unitary on (d+1) copies of C^n whose first d powers compress to T^k."""

    U: np.ndarray
    n: int
    degree: int

    def embed(self, X) -> np.ndarray:
        big = np.zeros(self.U.shape, dtype=complex)
        big[: self.n, : self.n] = X
        return big

    def compress(self, Y) -> np.ndarray:
        return np.asarray(Y)[: self.n, : self.n]

    def unitarity_residual(self) -> float:
        return spectral_norm(self.U.conj().T @ self.U - np.eye(len(self.U)))

    def power_residual(self, T) -> float:
        worst, P = 0.0, np.eye(len(self.U), dtype=complex)
        Tk = np.eye(self.n, dtype=complex)
        for _ in range(self.degree + 1):
            worst = max(worst, spectral_norm(self.compress(P) - Tk))
            P, Tk = self.U @ P, T @ Tk
        return worst


def dilate(T, d: int) -> FiniteUnitaryDilation:
    """(d+1)-block unitary with first block row (T, 0, .., 0, D_T*),
    second block row (D_T, 0, .., 0, -T*) and identities below the diagonal."""
    T = np.asarray(T, dtype=complex)
    if d < 1:
        raise ValueError("degree must be >= 1")
    if not check_contraction(T):
        raise ValueError("not a contraction")
    n = len(T)
    eye = np.eye(n)
    DT, DTs = defect_operators(T)
    U = np.zeros(((d + 1) * n, (d + 1) * n), dtype=complex)

    def blk(i, j, M):
        U[i * n : (i + 1) * n, j * n : (j + 1) * n] = M

    blk(0, 0, T)
    blk(0, d, DTs)
    blk(1, 0, DT)
    blk(1, d, -T.conj().T)
    for k in range(2, d + 1):
        blk(k, k - 1, eye)
    return FiniteUnitaryDilation(U, n, d)


@dataclass(frozen=True)
class SemiSpectralSampler:
    """Atoms (zeta_i, P E_U({zeta_i}) P) of the compressed spectral measure."""

    points: np.ndarray
    masses: np.ndarray  # shape (k, n, n)

    @classmethod
    def of(cls, dil: FiniteUnitaryDilation):
        spec = unitary_eig(dil.U)
        V = spec.vectors[: dil.n, :]
        masses = np.einsum("ik,jk->kij", V, V.conj())
        return cls(spec.values, masses)

    def measure(self, lo: float, hi: float) -> np.ndarray:
        """Mass of the arc of angles in [lo, hi) (angles in (-pi, pi])."""
        ang = np.angle(self.points)
        sel = (ang >= lo) & (ang < hi)
        return self.masses[sel].sum(axis=0)

    def total(self) -> np.ndarray:
        return self.masses.sum(axis=0)

    def moment(self, k: int) -> np.ndarray:
        return np.einsum("k,kij->ij", self.points ** k, self.masses)


def semi_spectral_doi(f: FunctionModel, T, R, degree: int | None = None) -> dict:
    """Compressed unitary double integral of (R - T) against dilations of R and T."""
    T, R = np.asarray(T, dtype=complex), np.asarray(R, dtype=complex)
    d = degree if degree is not None else f.degree + 1
    dR, dT = dilate(R, d), dilate(T, d)
    big = doi(dd_symbol(f), unitary_eig(dR.U), unitary_eig(dT.U), dR.embed(R - T))
    result = dR.compress(big)
    direct = poly_func_of(R, f) - poly_func_of(T, f)
    return {"result": result, "residual_vs_direct": spectral_norm(direct - result)}


def unitary_doi_difference(f: FunctionModel, U, V) -> np.ndarray:
    """doi(Df; U, V; U - V) for unitaries, the undilated reference."""
    return doi(dd_symbol(f), unitary_eig(U), unitary_eig(V), np.asarray(U) - np.asarray(V))


def extrapolated_points(T, R, m: int) -> list:
    T, R = np.asarray(T, dtype=complex), np.asarray(R, dtype=complex)
    return [T + (k / m) * (T - R) for k in range(m + 1)]


def lemma_mc_sides(f: FunctionModel, T, R, m: int, degree: int | None = None):
    """sum_k (-1)^k C(m,k) f(P_k) and the compressed multiple integral with P_k = T + (k/m)(T-R).

    The integral side is (-1)^m m!/m^m times the integral of D^m f over the
    dilated measures of P_0, .., P_m with all factors T - R.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    pts = extrapolated_points(T, R, m)
    for k, P in enumerate(pts):
        if not check_contraction(P):
            raise ValueError(f"point {k} of the extrapolated chain is not a contraction")
    d = degree if degree is not None else f.degree + 1
    dils = [dilate(P, d) for P in pts]
    lhs = sum((-1) ** k * math.comb(m, k) * poly_func_of(P, f, check=False) for k, P in enumerate(pts))
    X = dils[0].embed(np.asarray(T) - np.asarray(R))
    big = moi(f, m, [unitary_eig(D.U) for D in dils], [X] * m)
    rhs = (-1) ** m * math.factorial(m) / m ** m * dils[0].compress(big)
    return lhs, rhs


def lemma_mc_residual(f: FunctionModel, T, R, m: int, degree: int | None = None) -> float:
    lhs, rhs = lemma_mc_sides(f, T, R, m, degree)
    return spectral_norm(lhs - rhs)
