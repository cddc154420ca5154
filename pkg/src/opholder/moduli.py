"""Grid seminorms, moduli of continuity and the omega_* transforms."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import integrate

from .function_analysis import PeriodicSignal, vp_smooth
from .functions import CIRCLE, FunctionModel


@dataclass(frozen=True)
class ModulusOfContinuity:
    """Nondecreasing gauge omega with doubling order ``m``."""

    name: str
    func: Callable
    order: int = 1
    kind: str = "closed"
    subadditive: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))


def power_modulus(alpha: float, order: int | None = None) -> ModulusOfContinuity:
    m = order if order is not None else max(1, math.ceil(alpha))
    return ModulusOfContinuity(
        f"t^{alpha:g}", lambda x: np.asarray(x, dtype=float) ** alpha, m,
        subadditive=alpha <= 1, params={"alpha": alpha},
    )


def constant_modulus(c: float = 1.0) -> ModulusOfContinuity:
    return ModulusOfContinuity(f"const{c:g}", lambda x: np.full(np.shape(x), float(c)), 1,
                               params={"c": c})


def log_modulus(alpha: float = 1.0) -> ModulusOfContinuity:
    """t^alpha (1 + log(1/t)) for t < 1, continued as t^alpha beyond."""
    def func(x):
        x = np.asarray(x, dtype=float)
        return x ** alpha * (1.0 + np.log(1.0 / np.minimum(x, 1.0)))
    return ModulusOfContinuity(f"t^{alpha:g}log", func, max(1, math.ceil(alpha)), params={"alpha": alpha})


def tabulated_modulus(xs, ys, order: int = 1, name: str = "table") -> ModulusOfContinuity:
    """Piecewise-linear in log-log coordinates; constant beyond the table."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))

    def func(x):
        x = np.asarray(x, dtype=float)
        return np.exp(np.interp(np.log(x), lx, ly))

    return ModulusOfContinuity(name, func, order, kind="tabulated")


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class Grid:
    """Base points x and positive steps t for grid suprema.

    On the circle the base points are angles and a step t means the rotation
    by e^{it}; both signs of t are always scanned.
    """

    x_lo: float = -1.0
    x_hi: float = 1.0
    n_points: int = 2048
    t_lo: float = 1e-6
    t_hi: float = 10.0
    n_steps: int = 512

    def points(self) -> np.ndarray:
        # n_points intervals, so the midpoint is a node
        return np.linspace(self.x_lo, self.x_hi, self.n_points + 1)

    def steps(self) -> np.ndarray:
        return np.geomspace(self.t_lo, self.t_hi, self.n_steps)

    def refined(self) -> "Grid":
        return replace(self, n_points=2 * self.n_points, n_steps=2 * self.n_steps)

    def as_dict(self) -> dict:
        return asdict(self)


CIRCLE_GRID = Grid(-math.pi, math.pi, 2048, 1e-6, math.pi, 512)


@dataclass(frozen=True)
class SeminormReport:
    value: float
    t_star: float
    x_star: float
    grid: dict
    order: int
    refinements: int = 0

    def to_json(self) -> dict:
        return {"value": self.value, "t_star": self.t_star, "x_star": self.x_star,
                "grid": self.grid, "order": self.order}


def finite_diff(f, t, m: int, x):
    """sum_k (-1)^(m-k) C(m,k) f(x + kt)."""
    x = np.asarray(x)
    return sum((-1) ** (m - k) * math.comb(m, k) * f(x + k * t) for k in range(m + 1))


def circle_finite_diff(f, tau, m: int, zeta):
    """Rotation differences on the circle: sum_k (-1)^(m-k) C(m,k) f(tau^k zeta)."""
    zeta = np.asarray(zeta)
    return sum((-1) ** (m - k) * math.comb(m, k) * f(tau ** k * zeta) for k in range(m + 1))


def holder_order(alpha: float) -> int:
    """Difference order n with n-1 <= alpha < n."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return int(math.floor(alpha)) + 1


def _diff_table(f: FunctionModel, grid: Grid, m: int):
    """|Delta_t^m f(x)| on the full (t, x) grid with signed steps."""
    xs = grid.points()
    ts = grid.steps()
    ts = np.concatenate([ts, -ts])
    if f.domain == CIRCLE:
        zeta = np.exp(1j * xs)[None, :]
        tau = np.exp(1j * ts)[:, None]
        vals = np.abs(circle_finite_diff(f, tau, m, zeta))
        scale = np.abs(1 - np.exp(1j * ts))  # |1 - tau| replaces |t| on the circle
    else:
        vals = np.abs(finite_diff(f, ts[:, None], m, xs[None, :]))
        scale = np.abs(ts)
    return xs, ts, vals, scale


def _sup_report(f, grid, m, weight_fn, refine, max_refine=3):
    rounds, prev, report = 0, None, None
    while True:
        if grid.n_points * grid.n_steps == 0:
            raise ValueError("empty grid")
        xs, ts, vals, scale = _diff_table(f, grid, m)
        w = weight_fn(scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(vals == 0, 0.0, vals / w[:, None])
        i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
        report = SeminormReport(float(ratio[i, j]), float(ts[i]), float(xs[j]),
                                grid.as_dict(), m, rounds)
        if not refine or rounds >= max_refine:
            return report
        if prev is not None and abs(report.value - prev) <= 1e-3 * max(abs(report.value), 1e-300):
            return report
        prev = report.value
        grid, rounds = grid.refined(), rounds + 1


def _circle_poly_report(f: FunctionModel, grid: Grid, m: int, weight_fn, oversample: int = 8):
    """Sup over rotation steps for a trigonometric polynomial.

    Differences act on coefficients exactly and each sup norm is read off an
    FFT grid with ``oversample`` points per shortest wavelength.
    """
    sig = PeriodicSignal.from_dict(f.coeffs)
    k = sig.freqs
    d = max(sig.degree, 1)
    size = 1 << int(math.ceil(math.log2(oversample * 2 * d + 1)))
    steps = grid.steps()
    steps = steps[steps <= math.pi]
    best = (0.0, 0.0, 0.0)
    for t in np.concatenate([steps, -steps]):
        vals = np.abs(sig.multiply((np.exp(1j * k * t) - 1) ** m).samples(size))
        j = int(np.argmax(vals))
        r = vals[j] / weight_fn(abs(1 - np.exp(1j * t)), t)
        if r > best[0]:
            best = (float(r), float(t), float(2 * np.pi * j / size))
    g = dict(grid.as_dict(), fft_size=size)
    return SeminormReport(best[0], best[1], best[2], g, m)


def holder_seminorm(f: FunctionModel, alpha: float, grid: Grid | None = None,
                    refine: bool = False) -> SeminormReport:
    """Grid sup of |t|^-alpha |Delta_t^n f(x)| with n = floor(alpha) + 1.

    This is a lower bound for the true seminorm; ``refine`` doubles the grid
    until the value changes by less than 1e-3 relative.  On the circle |t| is
    replaced by |1 - tau| for the rotation tau = e^{it}.
    """
    grid = grid or (CIRCLE_GRID if f.domain == CIRCLE else Grid())
    n = holder_order(alpha)
    if f.domain == CIRCLE and f.coeffs is not None:
        return _circle_poly_report(f, grid, n, lambda chord, t: chord ** alpha)
    return _sup_report(f, grid, n, lambda s: s ** alpha, refine)


def lambda_omega_norm(f: FunctionModel, omega: ModulusOfContinuity, m: int = 1,
                      grid: Grid | None = None, refine: bool = False) -> SeminormReport:
    """Grid sup over t of ||Delta_t^m f||_inf / omega(|t|)."""
    grid = grid or (CIRCLE_GRID if f.domain == CIRCLE else Grid())
    steps = grid.steps()
    if np.any(omega(steps) <= 0):
        raise ValueError("omega vanishes at a grid step")
    # on the circle omega is applied to the arc length |t|
    if f.domain == CIRCLE and f.coeffs is not None:
        return _circle_poly_report(f, grid, m, lambda chord, t: float(omega(abs(t))))
    if f.domain == CIRCLE:
        xs, ts, vals, _ = _diff_table(f, grid, m)
        w = omega(np.abs(ts))
        ratio = vals / w[:, None]
        i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
        return SeminormReport(float(ratio[i, j]), float(ts[i]), float(xs[j]), grid.as_dict(), m)
    return _sup_report(f, grid, m, omega, refine)


def modulus_of_function(f: FunctionModel, m: int, x: float, grid: Grid | None = None) -> float:
    """sup over 0 < h <= x (grid steps plus h = x) and base points of |Delta_h^m f|."""
    if x <= 0:
        raise ValueError("x must be positive")
    grid = grid or Grid(-math.pi, math.pi, 2048, 1e-6, 10.0, 512)
    hs = grid.steps()
    hs = np.append(hs[hs <= x], x)
    xs = grid.points()
    vals = np.abs(finite_diff(f, hs[:, None], m, xs[None, :]))
    return float(np.max(vals))


# ---------------------------------------------------------------------------
# omega_* transforms


def omega_star(omega: ModulusOfContinuity, m: int, x: float, rtol: float = 1e-8,
               max_blocks: int = 2000, diverge_after: int = 60) -> float:
    """x^m int_x^inf omega(t) t^-(m+1) dt = int_1^inf omega(sx) s^-(m+1) ds.

    Integrated block by block over [2^j, 2^(j+1)].  Once consecutive block
    ratios settle at r < 1 the geometric remainder r/(1-r) * last is added;
    returns inf if the blocks fail to decay for ``diverge_after`` blocks.
    """
    if x <= 0:
        raise ValueError("x must be positive")

    def block(j):
        lo, hi = 2.0 ** j, 2.0 ** (j + 1)
        val, _ = integrate.quad(lambda s: float(omega(s * x)) / s ** (m + 1), lo, hi,
                                epsabs=0.0, epsrel=1e-12, limit=200)
        return val

    total = 0.0
    prev = block(0)
    total += prev
    ratios = []
    stalled = 0
    for j in range(1, max_blocks):
        b = block(j)
        total += b
        if b <= 1e-16 * total:
            return total
        r = b / prev if prev > 0 else math.inf
        ratios.append(r)
        prev = b
        stalled = stalled + 1 if r >= 1 else 0
        if stalled >= diverge_after:
            return math.inf
        if len(ratios) >= 3 and r < 1 and abs(ratios[-1] - ratios[-2]) <= 1e-9 * r \
                and abs(ratios[-2] - ratios[-3]) <= 1e-9 * r:
            return total + b * r / (1 - r)
        if b * r / max(1 - r, 1e-300) < rtol * 1e-2 * total and r < 1:
            return total
    return math.inf


def omega_star_closed_power(alpha: float, m: int, x):
    """Closed form for omega = t^alpha, alpha < m."""
    return np.asarray(x, dtype=float) ** alpha / (m - alpha)


def doubling_check(omega: ModulusOfContinuity, m: int, xs=None, star_points: int = 24) -> dict:
    """Empirical doubling constant and the log-free omega_* comparison when it applies."""
    xs = np.geomspace(1e-6, 1e2, 400) if xs is None else np.asarray(xs, dtype=float)
    kappa = float(np.max(omega(2 * xs) / omega(xs)))
    out = {"kappa": kappa, "pass": kappa <= 2 ** m + 1e-12, "ob_factor": None, "ob_pass": None}
    if kappa < 2:
        factor = kappa / (1 - math.log2(kappa))
        sub = xs[np.linspace(0, len(xs) - 1, star_points).astype(int)]
        stars = np.array([omega_star(omega, 1, x) for x in sub])
        out["ob_factor"] = factor
        out["ob_pass"] = bool(np.all(stars <= factor * omega(sub) * (1 + 1e-10)))
        out["ob_max_ratio"] = float(np.max(stars / omega(sub)))
    return out


# ---------------------------------------------------------------------------
# smoothing error on the circle


def periodic_signal_of(f: FunctionModel | Callable, size: int = 1 << 14) -> PeriodicSignal:
    """Fourier coefficients of a 2 pi periodic function (angle argument) by FFT sampling."""
    if isinstance(f, FunctionModel) and f.domain == CIRCLE and f.coeffs is not None:
        return PeriodicSignal.from_dict(f.coeffs)
    g = (lambda x: f(np.exp(1j * x))) if getattr(f, "domain", None) == CIRCLE else f
    xs = 2 * np.pi * np.arange(size) / size
    c = np.fft.fft(g(xs)) / size
    d = size // 2 - 1
    coeffs = np.concatenate([c[-d:], c[: d + 1]])
    return PeriodicSignal(coeffs)


def periodic_lambda_norm(sig: PeriodicSignal, omega: ModulusOfContinuity, m: int = 1,
                         steps=None, oversample: int = 4) -> float:
    """sup_t ||Delta_t^m f||_inf / omega(t), each sup norm taken on an FFT grid."""
    steps = np.geomspace(1e-5, math.pi, 96) if steps is None else steps
    best = 0.0
    k = sig.freqs
    for t in steps:
        diff = sig.multiply((np.exp(1j * k * t) - 1) ** m)
        best = max(best, diff.sup_norm(oversample) / float(omega(t)))
    return best


def vp_error_ratio(f, omega: ModulusOfContinuity, m: int, n: int, seminorm: float | None = None,
                   oversample: int = 4) -> float:
    """||f - f*V_n||_inf / (omega(2^-n) ||f||_{omega,m}) for a periodic f."""
    sig = f if isinstance(f, PeriodicSignal) else periodic_signal_of(f)
    if seminorm is None:
        seminorm = periodic_lambda_norm(sig, omega, m, oversample=oversample)
    if seminorm == 0:
        return 0.0
    err = (sig - vp_smooth(sig, n)).sup_norm(oversample)
    return float(err / (float(omega(2.0 ** -n)) * seminorm))


def lacunary_signal(n_terms: int, alpha: float, base: int = 2) -> PeriodicSignal:
    """sum_{j=1}^{n_terms} base^(-alpha j) cos(base^j x) as exact coefficients."""
    cmap = {}
    for j in range(1, n_terms + 1):
        a = 0.5 * float(base) ** (-alpha * j)
        cmap[base ** j] = a
        cmap[-(base ** j)] = a
    return PeriodicSignal.from_dict(cmap)
