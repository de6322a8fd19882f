"""Weights with exact interval masses, dual weights and A_p-type constants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import DilatedInterval, DomainError, DyadicInterval, Grid, GridFunction

__all__ = [
    "Weight",
    "PowerWeight",
    "StepWeight",
    "ModulatedWeight",
    "power_weight",
    "unit_weight",
    "conjugate",
    "ApCharacteristic",
    "ap_characteristic",
    "ap_value",
    "a1_characteristic",
    "AInftyDecay",
    "ainfty_decay_check",
    "heaviest_half_subset",
    "weight_from_record",
]


def conjugate(p: float) -> float:
    """Hölder conjugate ``p / (p - 1)``."""
    if p <= 1:
        raise ValueError("conjugate exponent needs p > 1")
    return p / (p - 1)


class Weight:
    """Base class: a positive density known through its interval masses."""

    def measure(self, a, b) -> float:
        raise NotImplementedError

    def measure_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.array([self.measure(x, y) for x, y in zip(a, b)])

    def cell_masses(self, grid: Grid) -> np.ndarray:
        return self.level_masses(grid, grid.J)

    def level_masses(self, grid: Grid, level: int) -> np.ndarray:
        raise NotImplementedError

    def cell_minima(self, grid: Grid) -> np.ndarray:
        raise NotImplementedError

    def cell_density(self, grid: Grid) -> GridFunction:
        """Cell averages of the density as a grid function."""
        return GridFunction(grid, self.cell_masses(grid) / grid.dx)

    def dual(self, p: float) -> "Weight":
        raise NotImplementedError

    def interval_mass(self, q, grid: Grid | None = None) -> float:
        if isinstance(q, DilatedInterval):
            if grid is None:
                raise ValueError("clipping a dilate needs the grid")
            return self.measure(*q.clipped(grid))
        return self.measure(q.left, q.right)

    def mass_of_cells(self, grid: Grid, mask) -> float:
        return float(np.sum(self.cell_masses(grid)[mask]))

    def scaled(self, factor: GridFunction) -> "ModulatedWeight":
        return ModulatedWeight(self, factor)

    def to_record(self) -> dict:
        raise NotImplementedError


class PowerWeight(Weight):
    """Density ``x**exponent`` on ``x > 0`` (``exponent > -1``).

    ``PowerWeight.from_epsilon(eps)`` is the weight ``x**(eps - 1)``.  Masses
    use the closed form ``(b**(e+1) - a**(e+1)) / (e+1)`` evaluated through
    ``expm1``/``log1p`` so that short intervals far from the origin keep full
    relative precision.
    """

    def __init__(self, exponent: float):
        if not exponent > -1:
            raise ValueError("power weight exponent must exceed -1")
        self.exponent = float(exponent)

    @classmethod
    def from_epsilon(cls, eps: float) -> "PowerWeight":
        if not 0 < eps <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        return cls(eps - 1.0)

    @property
    def epsilon(self) -> float:
        return self.exponent + 1.0

    def __repr__(self):
        return f"PowerWeight(exponent={self.exponent!r})"

    def _mass(self, a, length):
        s = self.exponent + 1.0
        a = np.asarray(a, dtype=float)
        length = np.asarray(length, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            safe_a = np.where(a > 0, a, 1.0)
            u = s * (np.log(safe_a + length) - np.log(safe_a))
            near = u < 1
            # expm1 only matters when b**s and a**s nearly cancel
            u = np.where(near, s * np.log1p(np.where(near, length / safe_a, 0.0)), u)
            inner = np.where(near, np.power(safe_a, s) * np.expm1(u) / s,
                             (np.power(safe_a + length, s) - np.power(safe_a, s)) / s)
        at_zero = np.power(length, s) / s
        return np.where(a > 0, inner, at_zero)

    def measure(self, a, b) -> float:
        a, b = float(a), float(b)
        if a < 0:
            raise DomainError("power weights live on [0, inf)")
        if b <= a:
            return 0.0
        return float(self._mass(a, b - a))

    def measure_many(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return np.where(b > a, self._mass(a, np.maximum(b - a, 0.0)), 0.0)

    def level_masses(self, grid: Grid, level: int) -> np.ndarray:
        n = 2 ** (grid.M + level)
        length = 2.0 ** -level
        left = np.arange(n, dtype=float) * length
        return self._mass(left, np.full(n, length))

    def cell_minima(self, grid: Grid) -> np.ndarray:
        e = grid.edges()
        if self.exponent < 0:
            return e[1:] ** self.exponent
        return e[:-1] ** self.exponent

    def dual(self, p: float) -> "PowerWeight":
        return PowerWeight(self.exponent * (1.0 - conjugate(p)))

    def to_record(self) -> dict:
        return {"kind": "power", "epsilon": self.epsilon}


class StepWeight(Weight):
    """Cellwise-constant strictly positive density on a grid."""

    def __init__(self, grid: Grid, densities):
        d = np.array(densities, dtype=float)
        if d.shape != (grid.n_cells,):
            raise DomainError("one density per cell expected")
        if not np.all(d > 0):
            raise ValueError("step weights need strictly positive cells")
        self.grid = grid
        self.density = GridFunction(grid, d)

    @classmethod
    def ones(cls, grid: Grid) -> "StepWeight":
        return cls(grid, np.ones(grid.n_cells))

    def __repr__(self):
        return f"StepWeight(M={self.grid.M}, J={self.grid.J})"

    def _check(self, grid):
        if grid != self.grid:
            raise DomainError("step weight used on a foreign grid")

    def measure(self, a, b) -> float:
        return self.density.integral(a, b)

    def measure_many(self, a, b):
        edges = self.grid.edges()
        cum = np.concatenate([[0.0], np.cumsum(self.density.values)]) * self.grid.dx
        fa = np.interp(np.asarray(a, float), edges, cum)
        fb = np.interp(np.asarray(b, float), edges, cum)
        return np.maximum(fb - fa, 0.0)

    def level_masses(self, grid: Grid, level: int) -> np.ndarray:
        self._check(grid)
        return self.density.level_integrals(level)

    def interval_mass(self, q, grid=None):
        if isinstance(q, DyadicInterval):
            return float(self.density.level_integrals(q.level)[q.index])
        return super().interval_mass(q, grid if grid is not None else self.grid)

    def cell_minima(self, grid: Grid) -> np.ndarray:
        self._check(grid)
        return self.density.values

    def dual(self, p: float) -> "StepWeight":
        return StepWeight(self.grid, self.density.values ** (1.0 - conjugate(p)))

    def to_record(self) -> dict:
        return {"kind": "step", "M": self.grid.M, "J": self.grid.J,
                "cells": self.density.values.tolist()}


class ModulatedWeight(StepWeight):
    """``factor * base`` for a grid function factor, e.g. ``H w``.

    Masses are exact cell masses of the base times the factor; essential
    infima use the base's true cell minima.
    """

    def __init__(self, base: Weight, factor: GridFunction):
        grid = factor.grid
        masses = base.cell_masses(grid) * factor.values
        super().__init__(grid, masses / grid.dx)
        self.base = base
        self.factor = factor

    def __repr__(self):
        return f"ModulatedWeight({self.base!r})"

    def cell_minima(self, grid: Grid) -> np.ndarray:
        self._check(grid)
        return self.factor.values * self.base.cell_minima(grid)


def power_weight(eps: float) -> PowerWeight:
    """The weight ``|x|**(eps - 1)``."""
    return PowerWeight.from_epsilon(eps)


def unit_weight(grid: Grid) -> StepWeight:
    return StepWeight.ones(grid)


def weight_from_record(rec: dict) -> Weight:
    kind = rec.get("kind")
    if kind == "power":
        return PowerWeight.from_epsilon(float(rec["epsilon"]))
    if kind == "step":
        return StepWeight(Grid(int(rec["M"]), int(rec["J"])), rec["cells"])
    raise ValueError(f"unknown weight kind {kind!r}")


# ---------------------------------------------------------------------------
# characteristics


@dataclass(frozen=True)
class ApCharacteristic:
    value: float
    witness: object
    p: float

    def __float__(self):
        return self.value


def ap_value(w_mass: float, s_mass: float, length: float, p: float) -> float:
    """``(w(Q)/|Q|) (sigma(Q)/|Q|)**(p-1)`` for one interval."""
    return (w_mass / length) * (s_mass / length) ** (p - 1.0)


def ap_characteristic(w: Weight, p: float, grid: Grid, dilates: bool = False,
                      levels=None) -> ApCharacteristic:
    """Largest A_p ratio over every dyadic interval of the grid.

    With ``dilates=True`` the clipped triples ``3Q`` are scanned as well.
    Ties go to the smallest ``(level, index)``.
    """
    if not p > 1:
        raise ValueError("A_p needs p > 1")
    sigma = w.dual(p)
    best, witness = -math.inf, None
    levels = grid.levels if levels is None else levels
    for j in levels:
        L = 2.0 ** -j
        vals = ap_value(w.level_masses(grid, j), sigma.level_masses(grid, j), L, p)
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-integrable dual weight")
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, witness = float(vals[i]), DyadicInterval(j, i)
    if dilates:
        top = float(grid.top)
        for j in levels:
            L = 2.0 ** -j
            left = np.arange(2 ** (grid.M + j)) * L - L
            a = np.maximum(left, 0.0)
            b = np.minimum(left + 3 * L, top)
            length = b - a
            vals = ap_value(w.measure_many(a, b), sigma.measure_many(a, b), length, p)
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, witness = float(vals[i]), DilatedInterval(DyadicInterval(j, i), Fraction(3))
    return ApCharacteristic(best, witness, p)


def _min_pyramid(v: np.ndarray) -> list[np.ndarray]:
    out = [v]
    while out[-1].size > 1:
        x = out[-1]
        out.append(np.minimum(x[0::2], x[1::2]))
    return out


def a1_characteristic(w: Weight, grid: Grid) -> float:
    """``max_Q (w(Q)/|Q|) / essinf_Q w`` over all dyadic intervals."""
    minima = np.asarray(w.cell_minima(grid), dtype=float)
    if not np.all(minima > 0):
        raise ValueError("A_1 needs a strictly positive weight")
    pyr = _min_pyramid(minima)
    best = 0.0
    for j in grid.levels:
        L = 2.0 ** -j
        avg = w.level_masses(grid, j) / L
        best = max(best, float(np.max(avg / pyr[grid.J - j])))
    return best


@dataclass(frozen=True)
class AInftyDecay:
    ratio: float
    implied_c: float
    passed: bool
    c_min: float


def ainfty_decay_check(w: Weight, q: DyadicInterval, cells, p2char: float,
                       grid: Grid, c_min: float = 0.01) -> AInftyDecay:
    """Realised ``w(E)/w(Q)`` and ``c = (1 - ratio) [w]_{A_2}`` for ``E`` in ``Q``.

    ``cells`` are level-J cell indices; ``|E| < |Q|/2`` is required.
    """
    s, e = q.cells(grid)
    cells = np.unique(np.asarray(list(cells), dtype=int))
    if cells.size and (cells.min() < s or cells.max() >= e):
        raise DomainError("E must lie inside Q")
    if not 2 * cells.size < e - s:
        raise ValueError("A_inf decay check needs |E| < |Q|/2")
    masses = w.cell_masses(grid)
    wq = w.interval_mass(q)
    ratio = float(np.sum(masses[cells])) / wq
    c = (1.0 - ratio) * p2char
    return AInftyDecay(ratio, c, c >= c_min, c_min)


def heaviest_half_subset(w: Weight, q: DyadicInterval, grid: Grid) -> np.ndarray:
    """Cells of ``Q`` maximising ``w(E)`` subject to ``|E| < |Q|/2``."""
    s, e = q.cells(grid)
    n = e - s
    k = (n - 1) // 2
    masses = w.cell_masses(grid)[s:e]
    order = np.argsort(-masses, kind="stable")
    return np.sort(order[:k]) + s
