"""Smooth dyadic cutoff, Littlewood-Paley kernels and their action on signals.

Circle signals are trigonometric polynomials stored by coefficients, so every
multiplier acts exactly.  Line signals are uniform samples of band-limited
functions; multipliers act through the DFT on the sampling grid and the
aliasing/truncation estimate is returned alongside the result.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

MAX_SCALE = 64  # |n| beyond this is irrelevant in double precision

W, WSHARP, V, Q = "W", "Wsharp", "V", "Q"
KINDS = (W, WSHARP, V, Q)


def _psi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def transition(t):
    """Smooth monotone step ``h`` on [0, 1] with h(0) = 0, h(1) = 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    a, b = _psi(t), _psi(1.0 - t)
    return a / (a + b)


def cutoff(x):
    """The dyadic cutoff ``w``: supported in [1/2, 2], w(x) + w(x/2) = 1 on [1, 2]."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    up = (x >= 0.5) & (x <= 1.0)
    down = (x > 1.0) & (x < 2.0)
    out[up] = transition(2.0 * x[up] - 1.0)
    # 1 - h(x-1) == h(2-x) by the symmetry h(t) + h(1-t) = 1, without cancellation
    out[down] = transition(2.0 - x[down])
    return out


def vp_cutoff(x):
    """``v``: equal to 1 on [-1, 1] and to ``w(|x|)`` outside."""
    a = np.abs(np.asarray(x, dtype=float))
    return np.where(a <= 1.0, 1.0, cutoff(a))


@dataclass(frozen=True)
class SmoothCutoff:
    w: object = staticmethod(cutoff)
    h: object = staticmethod(transition)

    def samples(self, lo: float = 2.0 ** -6, hi: float = 2.0 ** 6, num: int = 1000):
        xs = np.geomspace(lo, hi, num)
        return xs, cutoff(xs)

    def partition_defect(self, xs, scales: int = MAX_SCALE) -> float:
        """max |sum_{|n|<=scales} w(x/2^n) - 1| over ``xs``."""
        xs = np.asarray(xs, dtype=float)
        total = np.zeros_like(xs)
        for n in range(-scales, scales + 1):
            total += cutoff(xs / 2.0 ** n)
        return float(np.max(np.abs(total - 1.0)))


def build_cutoff() -> SmoothCutoff:
    return SmoothCutoff()


def kernel_symbol(kind: str, n: int, xi, m: int | None = None):
    """Fourier symbol of the scale-``n`` kernel of the given kind at ``xi``."""
    if abs(n) > MAX_SCALE:
        raise ValueError(f"scale index {n} outside |n| <= {MAX_SCALE}")
    x = np.asarray(xi, dtype=float) / 2.0 ** n
    if kind == W:
        return cutoff(x).astype(complex)
    if kind == WSHARP:
        return cutoff(-x).astype(complex)
    if kind == V:
        return vp_cutoff(x).astype(complex)
    if kind == Q:
        if m is None or m < 1:
            raise ValueError("kind Q needs an order m >= 1")
        return q_symbol(x, m).astype(complex)
    raise ValueError(f"unknown kernel kind {kind!r}")


def q_symbol(x, m: int):
    """sum_{k=1}^m (-1)^{k-1} C(m,k) v(k x): the symbol of Q at unit scale."""
    x = np.asarray(x, dtype=float)
    return sum((-1) ** (k - 1) * math.comb(m, k) * vp_cutoff(k * x) for k in range(1, m + 1))


@dataclass(frozen=True)
class FrequencyKernel:
    kind: str
    n: int
    m: int | None = None

    def symbol(self, xi):
        return kernel_symbol(self.kind, self.n, xi, self.m)

    def support(self):
        hi = 2.0 ** (self.n + 1)
        if self.kind == W:
            return (2.0 ** (self.n - 1), hi)
        if self.kind == WSHARP:
            return (-hi, -(2.0 ** (self.n - 1)))
        return (-hi, hi)

    def circle_coefficients(self):
        """Coefficients (index k -> value) of the periodized kernel on the circle."""
        lo, hi = self.support()
        ks = np.arange(math.floor(lo), math.ceil(hi) + 1)
        vals = self.symbol(ks)
        keep = vals != 0
        return dict(zip(ks[keep].tolist(), vals[keep].tolist()))


def export_kernel_table(path, kinds=(W, V), scales=range(0, 4), points: int = 65, m: int = 2):
    """Write a kernel symbol table with columns n, xi, symbol_re, symbol_im."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["kind", "n", "xi", "symbol_re", "symbol_im"])
        for kind in kinds:
            for n in scales:
                xs = np.linspace(-(2.0 ** (n + 2)), 2.0 ** (n + 2), points)
                vals = kernel_symbol(kind, n, xs, m if kind == Q else None)
                for x, s in zip(xs, vals):
                    out.writerow([kind, n, repr(float(x)), repr(float(s.real)), repr(float(s.imag))])
    return path


# ---------------------------------------------------------------------------
# circle signals


@dataclass(frozen=True)
class PeriodicSignal:
    """Trigonometric polynomial with coefficients for frequencies -d..d."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValueError("coefficient array must have odd length 2d+1")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def freqs(self) -> np.ndarray:
        d = self.degree
        return np.arange(-d, d + 1)

    @classmethod
    def from_dict(cls, cmap, degree: int | None = None):
        d = max((abs(k) for k in cmap), default=0) if degree is None else degree
        c = np.zeros(2 * d + 1, dtype=complex)
        for k, v in cmap.items():
            c[k + d] = v
        return cls(c)

    @classmethod
    def zero(cls, degree: int = 0):
        return cls(np.zeros(2 * degree + 1, dtype=complex))

    def coefficient(self, k: int) -> complex:
        d = self.degree
        return complex(self.coeffs[k + d]) if -d <= k <= d else 0j

    def __call__(self, zeta):
        """Evaluate at points of the circle (Horner in z and 1/z)."""
        z = np.asarray(zeta, dtype=complex)
        d = self.degree
        pos = np.zeros(z.shape, dtype=complex)
        for c in self.coeffs[d:][::-1]:
            pos = pos * z + c
        neg = np.zeros(z.shape, dtype=complex)
        zi = 1.0 / z
        for c in self.coeffs[:d][::1]:
            neg = neg * zi + c
        return pos + neg * zi

    def at_angle(self, x):
        return self(np.exp(1j * np.asarray(x, dtype=float)))

    def multiply(self, symbol_values) -> "PeriodicSignal":
        return PeriodicSignal(self.coeffs * symbol_values)

    def __sub__(self, other):
        d = max(self.degree, other.degree)
        return PeriodicSignal(_pad(self.coeffs, d) - _pad(other.coeffs, d))

    def __add__(self, other):
        d = max(self.degree, other.degree)
        return PeriodicSignal(_pad(self.coeffs, d) + _pad(other.coeffs, d))

    def sup_norm(self, oversample: int = 8) -> float:
        """Grid maximum of |f| with at least ``oversample`` points per wavelength."""
        d = max(self.degree, 1)
        size = 1 << int(math.ceil(math.log2(oversample * 2 * d + 1)))
        return float(np.max(np.abs(self.samples(size))))

    def samples(self, size: int) -> np.ndarray:
        """Values at the ``size`` equispaced angles 2 pi j / size."""
        d = self.degree
        if size <= 2 * d:
            raise ValueError("grid too coarse for the degree")
        buf = np.zeros(size, dtype=complex)
        buf[: d + 1] = self.coeffs[d:]
        if d:
            buf[-d:] = self.coeffs[:d]
        return np.fft.ifft(buf) * size


def _pad(c, d):
    e = (len(c) - 1) // 2
    if e == d:
        return c
    out = np.zeros(2 * d + 1, dtype=complex)
    out[d - e : d + e + 1] = c
    return out


# ---------------------------------------------------------------------------
# line signals


@dataclass(frozen=True)
class SampledLineSignal:
    """Uniform samples of a band-limited function on [-L, L)."""

    values: np.ndarray
    spacing: float
    band_limit: float

    def __post_init__(self):
        if not self.spacing <= math.pi / self.band_limit * (1 + 1e-12):
            raise ValueError(
                f"spacing {self.spacing} aliases band limit {self.band_limit} (need h <= pi/sigma)"
            )
        object.__setattr__(self, "values", np.asarray(self.values))

    @classmethod
    def sample(cls, func, half_width: float, spacing: float, band_limit: float):
        n = int(round(2 * half_width / spacing))
        xs = -half_width + spacing * np.arange(n)
        return cls(func(xs), spacing, band_limit)

    @property
    def grid(self) -> np.ndarray:
        n = len(self.values)
        return -self.spacing * n / 2 + self.spacing * np.arange(n)

    def angular_freqs(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(len(self.values), d=self.spacing)

    def multiply(self, symbol):
        """Apply a Fourier multiplier; returns (signal, edge_defect).

        ``edge_defect`` is the largest sample magnitude within 5% of either end
        of the window, a proxy for the periodization error the DFT introduces.
        """
        spec = np.fft.fft(self.values)
        out = np.fft.ifft(spec * symbol(self.angular_freqs()))
        if np.isrealobj(self.values):
            out = out.real
        edge = max(1, len(self.values) // 20)
        defect = float(max(np.max(np.abs(self.values[:edge])), np.max(np.abs(self.values[-edge:]))))
        return SampledLineSignal(out, self.spacing, self.band_limit), defect


Signal = Union[PeriodicSignal, SampledLineSignal]


def lp_block(f: PeriodicSignal, n: int) -> PeriodicSignal:
    """``f*W_n + f*W_n^#``; block 0 is ``f*W_0`` with W_0(z) = 1/z + 1 + z."""
    if n < 0:
        raise ValueError("circle blocks are indexed by n >= 0")
    k = f.freqs
    if n == 0:
        sym = (np.abs(k) <= 1).astype(complex)
    else:
        sym = kernel_symbol(W, n, k) + kernel_symbol(WSHARP, n, k)
    return f.multiply(sym)


def vp_smooth(f: Signal, N: int):
    """Convolution with the de la Vallee Poussin type kernel V_N.

    Periodic input returns a PeriodicSignal; line input returns
    ``(signal, edge_defect)``.
    """
    if isinstance(f, PeriodicSignal):
        return f.multiply(kernel_symbol(V, N, f.freqs))
    return f.multiply(lambda xi: kernel_symbol(V, N, xi))


def qn_smooth(f: Signal, n: int, m: int):
    """Convolution with Q_n of order m (an alternating sum of dilated V_n)."""
    if m < 1:
        raise ValueError("order m must be >= 1")
    if isinstance(f, PeriodicSignal):
        return f.multiply(kernel_symbol(Q, n, f.freqs, m))
    return f.multiply(lambda xi: kernel_symbol(Q, n, xi, m))


def reconstruct(f: PeriodicSignal, N: int) -> PeriodicSignal:
    """f*V_N + sum_{n>N} lp_block(f, n), truncated once 2^{n-1} exceeds the degree."""
    out = vp_smooth(f, N) if N >= 0 else PeriodicSignal.zero(f.degree)
    if N < 0:
        # below scale 0 the circle has only the W_0 block left
        out = lp_block(f, 0)
        N = 0
    n = N + 1
    while 2.0 ** (n - 1) <= max(f.degree, 1):
        out = out + lp_block(f, n)
        n += 1
    return out


# ---------------------------------------------------------------------------
# the kernel in the time domain and the Q_n identity


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(1200)


def vp_kernel_unit(s):
    """V(s) = (1/pi) int_0^2 v(xi) cos(xi s) d xi: the scale-0 kernel in time."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    safe = np.where(s == 0, 1.0, s)
    flat = np.where(s == 0, 1.0, np.sin(s) / safe)  # int_0^1 cos(xi s)
    xi = 1.5 + 0.5 * _GL_NODES
    wv = cutoff(xi) * _GL_WEIGHTS * 0.5
    tail = np.empty_like(s)
    for lo in range(0, len(s), 4096):
        chunk = s[lo : lo + 4096]
        tail[lo : lo + 4096] = np.cos(np.multiply.outer(chunk, xi)) @ wv
    return (flat + tail) / np.pi


@lru_cache(maxsize=4)
def _unit_kernel_table(half_width: float, step: float):
    s = np.arange(-half_width, half_width + step / 2, step)
    return s, vp_kernel_unit(s)


def qn0_residual(f: PeriodicSignal, n: int, m: int, xs=None, half_width: float = 400.0,
                 step: float = 0.02) -> float:
    """Sup over ``xs`` of |(f - f*Q_n)(x) - (-1)^m int (Delta^m_{-t} f)(x) V_n(t) dt|.

    ``f`` is read as a 2 pi periodic function on the line.  The left side uses
    the Fourier multiplier; the right side is a trapezoidal quadrature in the
    time domain with V_n(t) = 2^n V(2^n t) tabulated by Gauss-Legendre.
    """
    if xs is None:
        xs = np.linspace(-np.pi, np.pi, 17)
    xs = np.asarray(xs, dtype=float)
    smooth = qn_smooth(f, n, m)
    lhs = f.at_angle(xs) - smooth.at_angle(xs)

    s, vs = _unit_kernel_table(half_width, step)
    t = s / 2.0 ** n  # int g(t) V_n(t) dt = int g(s / 2^n) V(s) ds
    rhs = np.empty(len(xs), dtype=complex)
    for i, x in enumerate(xs):
        diff = sum(
            (-1) ** (m - k) * math.comb(m, k) * f.at_angle(x - k * t) for k in range(m + 1)
        )
        rhs[i] = step * np.sum(diff * vs)
    return float(np.max(np.abs(lhs - (-1) ** m * rhs)))
