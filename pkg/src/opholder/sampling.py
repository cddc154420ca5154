"""Random operator samplers with exact control of norms and spectra."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .matrix_calc import spectral_norm


def ginibre(rng, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def hermitian(rng, n: int, L: float = 1.0) -> np.ndarray:
    """Gaussian Hermitian matrix with spectrum mapped affinely onto [-L, L]."""
    X = ginibre(rng, n)
    H = 0.5 * (X + X.conj().T)
    if n == 1:
        return np.array([[rng.uniform(-L, L)]], dtype=complex)
    vals, vecs = np.linalg.eigh(H)
    lo, hi = vals[0], vals[-1]
    vals = -L + 2 * L * (vals - lo) / (hi - lo)
    return (vecs * vals) @ vecs.conj().T


def hermitian_direction(rng, n: int, delta: float = 1.0) -> np.ndarray:
    X = ginibre(rng, n)
    H = 0.5 * (X + X.conj().T)
    return delta * H / spectral_norm(H)


def unitary(rng, n: int) -> np.ndarray:
    """Haar unitary (QR with phase correction)."""
    Q, R = np.linalg.qr(ginibre(rng, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def unitary_near(rng, U, delta: float) -> np.ndarray:
    """exp(iH) U with ||H|| = delta, so ||V - U|| = |1 - e^{i delta}| at most."""
    H = hermitian_direction(rng, len(U), delta)
    vals, vecs = np.linalg.eigh(H)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T @ U


def psd(rng, n: int, scale: float = 1.0) -> np.ndarray:
    X = ginibre(rng, n)
    A = X @ X.conj().T
    if rng.random() < 0.3:
        # rank deficiency exercises the edge of the cone
        vals, vecs = np.linalg.eigh(A)
        vals[: rng.integers(1, n + 1) - 1] = 0.0
        A = (vecs * vals) @ vecs.conj().T
    return scale * A / max(spectral_norm(A), 1e-300)


def contraction(rng, n: int, norm: float = 1.0) -> np.ndarray:
    X = ginibre(rng, n)
    return norm * X / spectral_norm(X)


def self_adjoint_contraction(rng, n: int, norm: float = 1.0) -> np.ndarray:
    return hermitian(rng, n, norm)


@dataclass(frozen=True)
class OperatorSampler:
    """Distribution spec: class of operators, dimension range and spectrum box."""

    kind: str = "hermitian"
    dims: tuple = (2, 8)
    L: float = 1.0

    def dim(self, rng) -> int:
        lo, hi = self.dims
        return int(rng.integers(lo, hi + 1))

    def draw(self, rng, n: int | None = None) -> np.ndarray:
        n = self.dim(rng) if n is None else n
        if self.kind == "hermitian":
            return hermitian(rng, n, self.L)
        if self.kind == "unitary":
            return unitary(rng, n)
        if self.kind == "psd":
            return psd(rng, n, self.L)
        if self.kind == "contraction":
            return contraction(rng, n, self.L)
        raise ValueError(f"unknown sampler kind {self.kind!r}")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial stream derived from (master seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


class GaussianStream:
    """Generator-like source that serves draws from a fixed Gaussian vector.

    A trial built from a stream is a deterministic function of the vector, so
    local search can perturb the vector and rebuild the trial.
    """

    def __init__(self, z):
        self.z = np.asarray(z, dtype=float)
        self.pos = 0

    def _take(self, k: int) -> np.ndarray:
        if self.pos + k > len(self.z):
            raise IndexError("stream exhausted; raise the stream length")
        out = self.z[self.pos : self.pos + k]
        self.pos += k
        return out

    def standard_normal(self, size=None):
        if size is None:
            return float(self._take(1)[0])
        shape = (size,) if np.isscalar(size) else tuple(size)
        return self._take(int(np.prod(shape))).reshape(shape)

    def random(self, size=None):
        return special.ndtr(self.standard_normal(size))

    def uniform(self, low=0.0, high=1.0, size=None):
        return low + (high - low) * self.random(size)

    def integers(self, low, high=None, size=None):
        if high is None:
            low, high = 0, low
        u = self.random(size)
        return np.minimum(low + np.floor(u * (high - low)).astype(int), high - 1)
