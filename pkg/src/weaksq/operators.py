"""Model operators on grid functions.

Averages, the dyadic (or dilated) maximal function, the Haar square
function, the sparse square operator, a finite-dictionary stand-in for the
intrinsic square function and the positive dual testing operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

from .dyadic import DilatedInterval, DyadicInterval, Grid, GridFunction, SparseFamily
from .weights import Weight

__all__ = [
    "average",
    "dilated_averages",
    "maximal_function",
    "HaarCoefficientTable",
    "haar_coefficients",
    "haar_square_function",
    "sparse_square_operator",
    "KernelDictionary",
    "default_dictionary",
    "intrinsic_square_discrete",
    "dual_testing_operator",
    "identity",
]


def average(f: GridFunction, interval) -> float:
    """``<f>_I``: integral over the clipped interval over its unclipped length."""
    return f.average(interval)


def identity(f: GridFunction) -> GridFunction:
    return f


def dilated_averages(f: GridFunction, level: int, rho) -> np.ndarray:
    """``<f>_{rho Q}`` for every dyadic ``Q`` of one level."""
    rho = Fraction(rho)
    if rho == 1:
        return f.level_averages(level)
    grid = f.grid
    L = 2.0 ** -level
    n = 2 ** (grid.M + level)
    centers = (np.arange(n) + 0.5) * L
    half = float(rho) * L / 2
    edges = grid.edges()
    cum = np.concatenate([[0.0], np.cumsum(f.values)]) * grid.dx
    a = np.clip(centers - half, 0.0, float(grid.top))
    b = np.clip(centers + half, 0.0, float(grid.top))
    return (np.interp(b, edges, cum) - np.interp(a, edges, cum)) / (float(rho) * L)


def maximal_function(f: GridFunction, rho=None) -> GridFunction:
    """``Mf(x) = max_{Q ∋ x} <|f|>_Q`` over dyadic ``Q`` (or their ``rho``-dilates)."""
    g = abs(f)
    grid = f.grid
    acc = np.zeros(1)
    for j in grid.levels:
        if j > -grid.M:
            acc = np.repeat(acc, 2)
        avg = g.level_averages(j) if rho in (None, 1) else dilated_averages(g, j, rho)
        acc = np.maximum(acc, avg)
    return GridFunction(grid, acc)


@dataclass(frozen=True)
class HaarCoefficientTable:
    """``<f, h_Q>`` for every dyadic ``Q`` of levels ``-M .. J-1``.

    ``h_Q = |Q|**-1/2 (1_left - 1_right)``; ``mean`` is the average of ``f``
    over the whole domain.
    """

    grid: Grid
    levels: dict
    mean: float

    def __getitem__(self, q: DyadicInterval) -> float:
        return float(self.levels[q.level][q.index])

    def items(self):
        for j in sorted(self.levels):
            for k, c in enumerate(self.levels[j]):
                yield DyadicInterval(j, k), float(c)

    def energy(self) -> float:
        """``sum_Q <f,h_Q>**2``."""
        return float(sum(np.sum(c * c) for c in self.levels.values()))

    def mean_energy(self) -> float:
        return self.mean ** 2 * float(self.grid.top)


def haar_coefficients(f: GridFunction) -> HaarCoefficientTable:
    grid = f.grid
    levels = {}
    for j in range(-grid.M, grid.J):
        halves = f.level_integrals(j + 1)
        levels[j] = (halves[0::2] - halves[1::2]) * 2.0 ** (j / 2)
    mean = f.total() / float(grid.top)
    return HaarCoefficientTable(grid, levels, mean)


def haar_square_function(f: GridFunction) -> GridFunction:
    """``Sf = (sum_Q <f,h_Q>**2 |Q|**-1 1_Q)**1/2``, mean term excluded."""
    grid = f.grid
    table = haar_coefficients(f)
    acc = np.zeros(1)
    for j in range(-grid.M, grid.J):
        if j > -grid.M:
            acc = np.repeat(acc, 2)
        c = table.levels[j]
        acc = acc + c * c * 2.0 ** j
    if grid.J > -grid.M:
        acc = np.repeat(acc, 2)
    return GridFunction(grid, np.sqrt(acc))


def sparse_square_operator(f: GridFunction, family: SparseFamily, rho=1) -> GridFunction:
    """``(sum_{Q in S} <f>_{rho Q}**2 1_Q)**1/2``, summed by (level, index)."""
    if not family.certified:
        raise ValueError("sparse operator needs a certified family")
    grid = f.grid
    rho = Fraction(rho)
    acc = np.zeros(grid.n_cells)
    for q in family.sorted():
        s, e = q.cells(grid)
        avg = f.average(DilatedInterval(q, rho))
        acc[s:e] += avg * avg
    return GridFunction(grid, np.sqrt(acc))


# ---------------------------------------------------------------------------
# finite stand-in for the intrinsic square function


def _bump(x):
    return np.where(np.abs(x) < 1, (1 - x * x) ** 2, 0.0)


@dataclass(frozen=True)
class KernelDictionary:
    """Kernels on ``[-1, 1]`` sampled at spacing ``2**-resolution``.

    Every kernel has zero sum over the samples and a Hölder-``alpha``
    constant at most one over all pairs of sample points; both are checked
    when the dictionary is built.
    """

    alpha: float
    resolution: int
    kernels: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.kernels) == 0:
            raise ValueError("empty kernel dictionary")
        x = self.points
        if self.kernels.shape[1] != x.size:
            raise ValueError("kernel samples do not match the resolution")
        for k in self.kernels:
            if abs(k.sum()) > 1e-12 * max(1.0, np.abs(k).sum()):
                raise ValueError("kernel is not mean zero on the sample grid")
            if k[0] != 0 or k[-1] != 0:
                raise ValueError("kernel must vanish at the ends of [-1, 1]")
            if _holder_constant(k, x, self.alpha) > 1 + 1e-12:
                raise ValueError("kernel fails its Hölder certificate")

    @property
    def points(self) -> np.ndarray:
        n = 2 ** self.resolution
        return np.arange(-n, n + 1) / n

    def __len__(self):
        return len(self.kernels)

    def merged(self, other: "KernelDictionary") -> "KernelDictionary":
        if (other.alpha, other.resolution) != (self.alpha, self.resolution):
            raise ValueError("incompatible dictionaries")
        return KernelDictionary(self.alpha, self.resolution,
                                np.vstack([self.kernels, other.kernels]))

    def subset(self, idx) -> "KernelDictionary":
        return KernelDictionary(self.alpha, self.resolution, self.kernels[list(idx)])

    def samples(self, step: int) -> np.ndarray:
        """Every ``step``-th sample, still covering ``[-1, 1]``."""
        return self.kernels[:, ::step]


def _holder_constant(k: np.ndarray, x: np.ndarray, alpha: float) -> float:
    best = 0.0
    for shift in range(1, x.size):
        diff = np.abs(k[shift:] - k[:-shift])
        best = max(best, float(diff.max()) / (shift * (x[1] - x[0])) ** alpha)
    return best


def default_dictionary(alpha: float, resolution: int = 7, frequencies=range(1, 9),
                       phases=(0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4)) -> KernelDictionary:
    """Mollified oscillations ``sin(n pi x + phase) (1 - x**2)**2``.

    Each is corrected to mean zero with a multiple of the bump and scaled to
    Hölder constant one on the sample grid.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    n = 2 ** resolution
    x = np.arange(-n, n + 1) / n
    bump = _bump(x)
    rows = []
    for freq in frequencies:
        for ph in phases:
            k = np.sin(freq * math.pi * x + ph) * bump
            k = k - bump * (k.sum() / bump.sum())
            k[0] = k[-1] = 0.0
            k = k / _holder_constant(k, x, alpha)
            rows.append(k)
    return KernelDictionary(alpha, resolution, np.array(rows))


def intrinsic_square_discrete(f: GridFunction, alpha: float, dictionary: KernelDictionary,
                              scales: Iterable[int]) -> GridFunction:
    """Lower approximation to ``G_alpha f`` from a finite dictionary.

    ``scales`` are integers ``m`` with ``t = 2**-m``; the cone integral is
    replaced by ``sum_m ln2 / t_m * sum_{|y-x| < t_m} A(y, t_m)**2 dy`` with
    ``A`` the largest kernel response at scale ``t_m``.
    """
    if len(dictionary) == 0:
        raise ValueError("empty kernel dictionary")
    scales = sorted(set(int(m) for m in scales))
    if not scales:
        raise ValueError("empty scale list")
    if alpha != dictionary.alpha:
        raise ValueError("dictionary was certified for a different alpha")
    grid = f.grid
    dx = grid.dx
    parts = []
    for m in scales:
        half = 2 ** (grid.J - m)  # cells per t
        if half < 1:
            raise ValueError(f"scale 2^-{m} is finer than the grid")
        step = 2 ** dictionary.resolution // half
        if step < 1 or 2 ** dictionary.resolution % half:
            raise ValueError(f"dictionary resolution too coarse for scale 2^-{m}")
        t = 2.0 ** -m
        response = np.zeros(grid.n_cells)
        for k in dictionary.samples(step):
            # full[n + half] = sum_i f_i gamma((n - i)/half) dx/t
            conv = np.convolve(f.values, k * (dx / t))[half:half + grid.n_cells]
            response = np.maximum(response, np.abs(conv))
        sq = response * response * dx
        # direct window sums in a fixed order are monotone in the summands,
        # which prefix-sum differences are not
        window = np.convolve(sq, np.ones(2 * half - 1))[half - 1:half - 1 + grid.n_cells]
        parts.append((math.log(2) / t) * window)
    # correctly rounded sums keep the output monotone in the scale set
    stacked = np.array(parts).T
    out = np.array([math.fsum(row) for row in stacked])
    return GridFunction(grid, np.sqrt(out))


def dual_testing_operator(a: Mapping[DyadicInterval, GridFunction], w: Weight) -> GridFunction:
    """``(sum_Q <a_Q w>_Q**2 1_Q)**1/2`` with exact cell masses of ``w``."""
    if not a:
        raise ValueError("no functions given")
    grid = next(iter(a.values())).grid
    masses = w.cell_masses(grid)
    acc = np.zeros(grid.n_cells)
    for q in sorted(a):
        g = a[q]
        if np.any(g.values < 0):
            raise ValueError("dual testing needs a_Q >= 0")
        s, e = q.cells(grid)
        avg = float(np.sum(g.values[s:e] * masses[s:e])) / float(q.length)
        acc[s:e] += avg * avg
    return GridFunction(grid, np.sqrt(acc))


OperatorHandle = Callable[[GridFunction], GridFunction]
