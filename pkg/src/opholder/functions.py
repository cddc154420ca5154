"""Scalar function models used throughout the package.

A :class:`FunctionModel` bundles an evaluator with derivative access and a
little metadata (domain, Fourier-support bound).  Polynomials and
trigonometric polynomials additionally carry their coefficients, which lets
divided differences be computed exactly instead of through difference
quotients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

LINE = "line"
CIRCLE = "circle"


@dataclass(frozen=True)
class FunctionModel:
    """Evaluable scalar function.

    ``coeffs`` maps integer powers to coefficients; when present the function
    is the Laurent polynomial ``sum c_p z**p`` (on the circle) or the ordinary
    polynomial ``sum c_p t**p`` (on the line) and every derivative is exact.
    """

    name: str
    func: Callable
    deriv: Optional[Callable] = None
    coeffs: Optional[Mapping[int, complex]] = None
    band_limit: Optional[float] = None
    domain: str = LINE
    approx_derivs: bool = False
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.func(np.asarray(x))

    def derivative(self, x, r: int = 1):
        if r == 0:
            return self(x)
        if self.deriv is None:
            raise ValueError(f"{self.name}: no derivative of order {r} available")
        return self.deriv(np.asarray(x), r)

    @property
    def is_polynomial(self) -> bool:
        return self.coeffs is not None

    @property
    def degree(self) -> int:
        if self.coeffs is None:
            raise ValueError(f"{self.name} is not a polynomial")
        nz = [abs(p) for p, c in self.coeffs.items() if c != 0]
        return max(nz) if nz else 0

    @property
    def is_analytic_polynomial(self) -> bool:
        return self.coeffs is not None and all(p >= 0 for p, c in self.coeffs.items() if c != 0)

    def is_real_valued(self) -> bool:
        if self.coeffs is None:
            return bool(self.params.get("real", True))
        if self.domain == LINE:
            return all(np.isreal(c) for c in self.coeffs.values())
        # real on the circle iff c_{-p} = conj(c_p)
        return all(np.isclose(self.coeffs.get(-p, 0), np.conj(c)) for p, c in self.coeffs.items())


def _laurent_eval(coeffs: Mapping[int, complex], z):
    z = np.asarray(z)
    out = np.zeros(z.shape, dtype=complex if np.iscomplexobj(z) or _has_complex(coeffs) else float)
    for p, c in coeffs.items():
        if c != 0:
            out = out + c * z ** p if p >= 0 else out + c * (1.0 / z) ** (-p)
    return out


def _laurent_deriv(coeffs: Mapping[int, complex], z, r: int):
    z = np.asarray(z)
    out = np.zeros(z.shape, dtype=complex if np.iscomplexobj(z) or _has_complex(coeffs) else float)
    for p, c in coeffs.items():
        if c == 0:
            continue
        fall = math.prod(p - i for i in range(r))
        if fall == 0:
            continue
        q = p - r
        out = out + c * fall * (z ** q if q >= 0 else (1.0 / z) ** (-q))
    return out


def _has_complex(coeffs) -> bool:
    return any(np.iscomplexobj(c) or isinstance(c, complex) for c in coeffs.values())


def polynomial(coeffs, name: str = "poly") -> FunctionModel:
    """Ordinary polynomial on the line; ``coeffs[k]`` multiplies ``t**k``."""
    cmap = {k: c for k, c in enumerate(coeffs) if c != 0}
    return FunctionModel(
        name=name,
        func=lambda x: _laurent_eval(cmap, x),
        deriv=lambda x, r: _laurent_deriv(cmap, x, r),
        coeffs=cmap,
        domain=LINE,
    )


def trig_polynomial(coeffs: Mapping[int, complex], name: str = "trigpoly") -> FunctionModel:
    """Laurent polynomial ``sum c_p z**p`` on the unit circle."""
    cmap = {int(p): complex(c) for p, c in coeffs.items() if c != 0}
    deg = max((abs(p) for p in cmap), default=0)
    return FunctionModel(
        name=name,
        func=lambda z: _laurent_eval(cmap, z),
        deriv=lambda z, r: _laurent_deriv(cmap, z, r),
        coeffs=cmap,
        band_limit=float(deg),
        domain=CIRCLE,
    )


def analytic_polynomial(coeffs, name: str = "apoly") -> FunctionModel:
    """Analytic polynomial ``sum_k coeffs[k] z**k`` on the closed disc."""
    return trig_polynomial({k: c for k, c in enumerate(coeffs)}, name=name)


def power(p: int) -> FunctionModel:
    coeffs = [0] * p + [1]
    return polynomial(coeffs, name=f"t^{p}")


def identity() -> FunctionModel:
    return polynomial([0, 1], name="identity")


def constant(c: float = 1.0) -> FunctionModel:
    return polynomial([c], name=f"const{c:g}")


def exp_fn() -> FunctionModel:
    return FunctionModel(name="exp", func=np.exp, deriv=lambda x, r: np.exp(x))


def sin_fn() -> FunctionModel:
    return FunctionModel(
        name="sin",
        func=np.sin,
        deriv=lambda x, r: np.sin(x + r * np.pi / 2),
        band_limit=1.0,
    )


def cos_fn() -> FunctionModel:
    return FunctionModel(
        name="cos",
        func=np.cos,
        deriv=lambda x, r: np.cos(x + r * np.pi / 2),
        band_limit=1.0,
    )


def abs_power(alpha: float) -> FunctionModel:
    """``|t|**alpha``; derivatives are exact away from 0 and undefined at 0."""

    def deriv(x, r):
        x = np.asarray(x, dtype=float)
        coef = math.prod(alpha - i for i in range(r))
        with np.errstate(divide="ignore", invalid="ignore"):
            val = coef * np.abs(x) ** (alpha - r) * np.sign(x) ** r
        return np.where(x == 0, np.nan if alpha < r else 0.0, val)

    return FunctionModel(
        name=f"|t|^{alpha:g}",
        func=lambda x: np.abs(np.asarray(x, dtype=float)) ** alpha,
        deriv=deriv,
        params={"alpha": alpha},
    )


def abs_fn() -> FunctionModel:
    f = abs_power(1.0)
    return FunctionModel(name="|t|", func=f.func, deriv=f.deriv, params={"alpha": 1.0})


def lacunary_cos(n_terms: int = 12, alpha: float = 1.0, base: int = 2) -> FunctionModel:
    """``sum_{n=1}^{n_terms} base**(-alpha n) cos(base**n t)`` on the line.

    With ``alpha = 1`` this is the bounded Zygmund-class test function used by
    the growth fit.
    """
    amps = np.array([float(base) ** (-alpha * n) for n in range(1, n_terms + 1)])
    freqs = np.array([float(base) ** n for n in range(1, n_terms + 1)])

    def func(x):
        x = np.asarray(x, dtype=float)
        return np.cos(np.multiply.outer(x, freqs)) @ amps

    def deriv(x, r):
        x = np.asarray(x, dtype=float)
        return np.cos(np.multiply.outer(x, freqs) + r * np.pi / 2) @ (amps * freqs ** r)

    return FunctionModel(
        name=f"lacunary_cos(n={n_terms},a={alpha:g})",
        func=func,
        deriv=deriv,
        band_limit=float(freqs[-1]),
        params={"alpha": alpha, "n_terms": n_terms, "sup": float(amps.sum())},
    )


def circle_abs_power(alpha: float) -> FunctionModel:
    """``|1 - z|**alpha`` on the circle; its rotation differences obey
    ``|f(tau z) - f(z)| <= |1 - tau|**alpha``."""
    return FunctionModel(
        name=f"|1-z|^{alpha:g}",
        func=lambda z: np.abs(1 - np.asarray(z)) ** alpha,
        domain=CIRCLE,
        params={"alpha": alpha},
    )


def lacunary_analytic(n_terms: int = 10, alpha: float = 0.5, base: int = 2) -> FunctionModel:
    """``sum_{n=1}^{n_terms} base**(-alpha n) z**(base**n)``, analytic on the disc."""
    cmap = {base ** n: float(base) ** (-alpha * n) for n in range(1, n_terms + 1)}
    f = trig_polynomial(cmap, name=f"lacunary_analytic(n={n_terms},a={alpha:g})")
    return FunctionModel(f.name, f.func, f.deriv, f.coeffs, f.band_limit, CIRCLE,
                         params={"alpha": alpha, "n_terms": n_terms})


def lacunary_circle(n_terms: int = 10, alpha: float = 1.0, base: int = 2) -> FunctionModel:
    """Real lacunary series ``sum base**(-alpha n) Re z**(base**n)`` on the circle."""
    cmap = {}
    for n in range(1, n_terms + 1):
        a = 0.5 * float(base) ** (-alpha * n)
        cmap[base ** n] = a
        cmap[-(base ** n)] = a
    f = trig_polynomial(cmap, name=f"lacunary_circle(n={n_terms},a={alpha:g})")
    return FunctionModel(f.name, f.func, f.deriv, f.coeffs, f.band_limit, CIRCLE,
                         params={"alpha": alpha, "n_terms": n_terms})


def from_callable(func: Callable, name: str = "user", h: float = 1e-4) -> FunctionModel:
    """Wrap a plain callable; derivatives come from central differences and are flagged."""

    def deriv(x, r):
        x = np.asarray(x, dtype=float)
        step = h * (1 + np.abs(x))
        return sum(
            (-1) ** k * math.comb(r, k) * func(x + (r / 2 - k) * step) for k in range(r + 1)
        ) / step ** r

    return FunctionModel(name=name, func=func, deriv=deriv, approx_derivs=True)


def circle_from_angle(g: Callable, name: str = "circle_fn") -> FunctionModel:
    """Function on the circle given through the angle: ``f(e^{ix}) = g(x)``."""
    return FunctionModel(
        name=name,
        func=lambda z: g(np.angle(np.asarray(z))),
        domain=CIRCLE,
    )


def on_angle(f: FunctionModel) -> Callable:
    """The 2pi-periodic function ``x -> f(e^{ix})`` of a circle function."""
    if f.domain != CIRCLE:
        return f.func
    return lambda x: f(np.exp(1j * np.asarray(x, dtype=float)))


REGISTRY = {
    "identity": identity,
    "exp": exp_fn,
    "sin": sin_fn,
    "cos": cos_fn,
    "abs": abs_fn,
    "abs_power": abs_power,
    "power": power,
    "lacunary": lacunary_cos,
    "circle_abs_power": circle_abs_power,
    "lacunary_analytic": lacunary_analytic,
    "lacunary_circle": lacunary_circle,
}


def by_name(name: str, **params) -> FunctionModel:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown function id {name!r}") from None
    return factory(**params)
