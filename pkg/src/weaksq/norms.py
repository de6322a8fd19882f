"""Weighted strong, weak and Lorentz norms, testing ratios and exponent fits.

All norms act on piecewise-constant functions, so level-set quantities are
finite sums over the distinct values of ``|g|``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .dyadic import GridFunction
from .weights import Weight

__all__ = [
    "NormValue",
    "FitResult",
    "strong_norm",
    "weak_norm",
    "lorentz_p1_norm",
    "level_profile",
    "sigma_testing_ratio",
    "sigma_weighted",
    "fit_exponent",
]


@dataclass(frozen=True)
class NormValue:
    value: float
    kind: str
    p: float
    weight: object = field(default=None, repr=False, compare=False)

    def __float__(self):
        return self.value


def _masses(g: GridFunction, w: Weight) -> np.ndarray:
    return w.cell_masses(g.grid)


def strong_norm(g: GridFunction, w: Weight, p: float) -> NormValue:
    """``(sum_cells |g|**p w(cell))**(1/p)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(g.values)
    s = float(np.sum(a ** p * _masses(g, w)))
    return NormValue(s ** (1.0 / p), "strong", p, w)


def level_profile(g: GridFunction, w: Weight) -> tuple[np.ndarray, np.ndarray]:
    """Distinct positive values ``v`` of ``|g|`` (descending) and ``w{|g| >= v}``."""
    a = np.abs(g.values)
    m = _masses(g, w)
    keep = a > 0
    a, m = a[keep], m[keep]
    if a.size == 0:
        return np.zeros(0), np.zeros(0)
    vals, inv = np.unique(a, return_inverse=True)
    per_value = np.bincount(inv, weights=m, minlength=vals.size)
    vals, per_value = vals[::-1], per_value[::-1]
    return vals, np.cumsum(per_value)


def weak_norm(g: GridFunction, w: Weight, p: float) -> NormValue:
    """``sup_lambda lambda w{|g| > lambda}**(1/p)``, attained at level values.

    With ``v_1 > v_2 > ...`` the distinct values, the ``>`` convention gives
    ``sup_{lambda < v_i} lambda w{|g| > lambda}^(1/p) = v_i w{|g| >= v_i}^(1/p)``
    and the ``>=`` convention gives the same numbers; both are formed and the
    larger reported.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    vals, cum = level_profile(g, w)
    if vals.size == 0:
        return NormValue(0.0, "weak", p, w)
    geq = float(np.max(vals * cum ** (1.0 / p)))
    gt = float(np.max(vals * np.concatenate([[0.0], cum[:-1]]) ** (1.0 / p))) if vals.size > 1 else 0.0
    return NormValue(max(geq, gt), "weak", p, w)


def lorentz_p1_norm(g: GridFunction, w: Weight, p: float) -> NormValue:
    """``int_0^inf w{|g| > lambda}**(1/p) d lambda`` as a finite sum."""
    if not p > 1:
        raise ValueError("Lorentz L^{p,1} needs p > 1")
    vals, cum = level_profile(g, w)
    if vals.size == 0:
        return NormValue(0.0, "lorentz", p, w)
    steps = vals - np.concatenate([vals[1:], [0.0]])
    return NormValue(float(np.sum(steps * cum ** (1.0 / p))), "lorentz", p, w)


def sigma_weighted(f: GridFunction, w: Weight, p: float) -> tuple[GridFunction, Weight]:
    """``sigma f`` as a grid function (cell averages of sigma) and ``sigma``."""
    sigma = w.dual(p)
    return f * (sigma.cell_masses(f.grid) / f.grid.dx), sigma


def sigma_testing_ratio(T: Callable[[GridFunction], GridFunction], f: GridFunction,
                        w: Weight, p: float) -> float:
    """``||T(sigma f)||_{L^{p,inf}(w)} / ||f||_{L^p(sigma)}``.

    A lower bound for the norm of ``T(sigma .)`` from ``L^p(sigma)`` to
    ``L^{p,inf}(w)``.
    """
    g, sigma = sigma_weighted(f, w, p)
    den = strong_norm(f, sigma, p).value
    if den == 0:
        raise ZeroDivisionError("test function has zero L^p(sigma) norm")
    return weak_norm(T(g), w, p).value / den


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float
    points: list
    narrow: bool = False

    def within(self, target: float, tol: float) -> bool:
        return abs(self.slope - target) <= tol


def fit_exponent(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Least-squares line through ``(ln x, ln y)``.

    ``narrow`` flags an x-range with ``max/min < 4``, where fixed constants
    dominate the slope.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3 or x.size != y.size:
        raise ValueError("need at least three (x, y) pairs")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("exponent fits need positive data")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x must be strictly increasing")
    lx, ly = np.log(x), np.log(y)
    res = stats.linregress(lx, ly)
    r2 = min(1.0, max(0.0, float(res.rvalue) ** 2))
    narrow = bool(x[-1] / x[0] < 4)
    if narrow:
        warnings.warn("exponent fit over less than a factor 4 in x", RuntimeWarning, stacklevel=2)
    return FitResult(float(res.slope), float(res.intercept), r2,
                     list(zip(lx.tolist(), ly.tolist())), narrow)
