"""Dyadic intervals, piecewise-constant grid functions and sparse families.

Everything lives on a working domain ``[0, 2**M)`` sampled at resolution
``2**-J``.  Interval endpoints and lengths are exact :class:`Fraction`
values; the packing inequalities that define sparseness are decided in
rational arithmetic so that boundary cases never flip by rounding.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "DomainError",
    "Grid",
    "DyadicInterval",
    "DilatedInterval",
    "GridFunction",
    "SparseFamily",
    "verify_sparse",
    "packing_measures",
    "check_strengthened",
    "split_sparse",
    "dominating_family",
    "random_sparse_family",
    "write_family",
    "read_family",
]


class DomainError(ValueError):
    """An interval or function does not fit the working domain."""


def _pow2(e: int) -> Fraction:
    return Fraction(2) ** e


@dataclass(frozen=True)
class Grid:
    """Working domain ``[0, 2**M)`` cut into cells of width ``2**-J``."""

    M: int
    J: int

    def __post_init__(self):
        if self.M + self.J < 0:
            raise DomainError("need M + J >= 0")

    @property
    def n_cells(self) -> int:
        return 2 ** (self.M + self.J)

    @property
    def top(self) -> Fraction:
        return _pow2(self.M)

    @property
    def cell_width(self) -> Fraction:
        return _pow2(-self.J)

    @property
    def dx(self) -> float:
        return 2.0 ** -self.J

    @property
    def levels(self) -> range:
        return range(-self.M, self.J + 1)

    def root(self) -> "DyadicInterval":
        return DyadicInterval(-self.M, 0)

    def intervals(self, level: int) -> Iterator["DyadicInterval"]:
        for k in range(2 ** (self.M + level)):
            yield DyadicInterval(level, k)

    def edges(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.dx

    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """``[k 2**-j, (k+1) 2**-j)``, identified by ``(level, index)``."""

    level: int
    index: int

    @property
    def length(self) -> Fraction:
        return _pow2(-self.level)

    @property
    def left(self) -> Fraction:
        return self.index * self.length

    @property
    def right(self) -> Fraction:
        return (self.index + 1) * self.length

    @property
    def center(self) -> Fraction:
        return (2 * self.index + 1) * self.length / 2

    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.level - 1, self.index // 2)

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return (DyadicInterval(self.level + 1, 2 * self.index),
                DyadicInterval(self.level + 1, 2 * self.index + 1))

    def contains(self, other: "DyadicInterval") -> bool:
        """True if ``other`` is a (not necessarily proper) subinterval."""
        d = other.level - self.level
        return d >= 0 and (other.index >> d) == self.index

    def strictly_contains(self, other: "DyadicInterval") -> bool:
        return other.level > self.level and self.contains(other)

    def check(self, grid: Grid) -> None:
        if not (-grid.M <= self.level <= grid.J):
            raise DomainError(f"{self} has level outside [{-grid.M}, {grid.J}]")
        if not (0 <= self.index < 2 ** (grid.M + self.level)):
            raise DomainError(f"{self} lies outside [0, 2^{grid.M})")

    def cells(self, grid: Grid) -> tuple[int, int]:
        """Half-open range of level-J cell indices covered by the interval."""
        self.check(grid)
        size = 2 ** (grid.J - self.level)
        return self.index * size, (self.index + 1) * size

    def dilate(self, rho) -> "DilatedInterval":
        return DilatedInterval(self, Fraction(rho))

    def __str__(self):
        return f"[{self.left}, {self.right})"


@dataclass(frozen=True)
class DilatedInterval:
    """Concentric dilate ``rho Q``; clipped to the domain on request."""

    base: DyadicInterval
    rho: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "rho", Fraction(self.rho))
        if self.rho < 1:
            raise ValueError("dilation factor must be >= 1")

    @property
    def length(self) -> Fraction:
        """Unclipped length ``rho |Q|``."""
        return self.rho * self.base.length

    @property
    def left(self) -> Fraction:
        return self.base.center - self.length / 2

    @property
    def right(self) -> Fraction:
        return self.base.center + self.length / 2

    def clipped(self, grid: Grid) -> tuple[Fraction, Fraction]:
        return max(self.left, Fraction(0)), min(self.right, grid.top)


def _as_dilate(interval) -> DilatedInterval:
    if isinstance(interval, DilatedInterval):
        return interval
    return DilatedInterval(interval)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Piecewise-constant function on the cells of a :class:`Grid`.

    Integrals over dyadic intervals are read off a pairwise-summed pyramid,
    so they are sums of cell values with no long-range cancellation.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_cells,):
            raise DomainError(f"expected {self.grid.n_cells} cell values, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        return cls(grid, np.zeros(grid.n_cells))

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.n_cells, float(c)))

    @classmethod
    def indicator(cls, grid: Grid, a, b) -> "GridFunction":
        """Indicator of ``[a, b)``; both endpoints must sit on cell edges."""
        s, e = Fraction(a) / grid.cell_width, Fraction(b) / grid.cell_width
        if s.denominator != 1 or e.denominator != 1:
            raise DomainError("indicator endpoints must be cell edges")
        v = np.zeros(grid.n_cells)
        v[max(int(s), 0):min(int(e), grid.n_cells)] = 1.0
        return cls(grid, v)

    @classmethod
    def from_interval(cls, grid: Grid, q: DyadicInterval, c: float = 1.0) -> "GridFunction":
        s, e = q.cells(grid)
        v = np.zeros(grid.n_cells)
        v[s:e] = c
        return cls(grid, v)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise DomainError("grid mismatch")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._coerce(other))

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def __pow__(self, e):
        return GridFunction(self.grid, self.values ** e)

    def maximum(self, other) -> "GridFunction":
        return GridFunction(self.grid, np.maximum(self.values, self._coerce(other)))

    def sqrt(self) -> "GridFunction":
        return GridFunction(self.grid, np.sqrt(self.values))

    def __len__(self):
        return self.grid.n_cells

    def __repr__(self):
        return f"GridFunction(M={self.grid.M}, J={self.grid.J}, n={self.grid.n_cells})"

    # integrals --------------------------------------------------------
    @cached_property
    def _pyramid(self) -> list[np.ndarray]:
        # _pyramid[t][i] = sum of cells [i 2^t, (i+1) 2^t)
        levels = [self.values]
        while levels[-1].size > 1:
            v = levels[-1]
            levels.append(v[0::2] + v[1::2])
        return levels

    @cached_property
    def _exact_prefix(self) -> list[Fraction]:
        out = [Fraction(0)]
        acc = Fraction(0)
        for x in self.values.tolist():
            acc += Fraction(x)
            out.append(acc)
        return out

    def level_sums(self, level: int) -> np.ndarray:
        """Cell-value sums over every dyadic interval of the given level."""
        t = self.grid.J - level
        if not (0 <= t <= self.grid.M + self.grid.J):
            raise DomainError(f"level {level} outside the grid")
        return self._pyramid[t]

    def level_integrals(self, level: int) -> np.ndarray:
        return self.level_sums(level) * self.grid.dx

    def level_averages(self, level: int) -> np.ndarray:
        return self.level_sums(level) * 2.0 ** (level - self.grid.J)

    def _cell_block_sum(self, s: int, e: int) -> float:
        total = 0.0
        n = self.grid.n_cells
        while s < e:
            size = (s & -s) if s else n
            while size > e - s:
                size //= 2
            t = size.bit_length() - 1
            total += float(self._pyramid[t][s >> t])
            s += size
        return total

    def _split(self, a, b):
        g = self.grid
        a = min(max(Fraction(a), Fraction(0)), g.top)
        b = min(max(Fraction(b), Fraction(0)), g.top)
        if b <= a:
            return None
        u, v = a / g.cell_width, b / g.cell_width
        return u, v

    def integral(self, a, b) -> float:
        """Integral over ``[a, b)`` (clipped to the domain)."""
        uv = self._split(a, b)
        if uv is None:
            return 0.0
        u, v = uv
        vals = self.values
        dx = self.grid.dx
        iu, iv = math.floor(u), math.floor(v)
        if iu == iv:
            return float(vals[iu]) * float(v - u) * dx
        total = 0.0
        s = iu
        if u != iu:
            total += float(vals[iu]) * float(iu + 1 - u)
            s = iu + 1
        total += self._cell_block_sum(s, iv)
        if v != iv and iv < self.grid.n_cells:
            total += float(vals[iv]) * float(v - iv)
        return total * dx

    def integral_exact(self, a, b) -> Fraction:
        """Rational value of the integral, treating cell values as exact."""
        uv = self._split(a, b)
        if uv is None:
            return Fraction(0)
        u, v = uv
        pre = self._exact_prefix
        iu, iv = math.floor(u), math.floor(v)

        def cell(i):
            return pre[i + 1] - pre[i]

        if iu == iv:
            return cell(iu) * (v - u) * self.grid.cell_width
        total = pre[iv] - pre[iu + 1] + cell(iu) * (iu + 1 - u)
        if v != iv and iv < self.grid.n_cells:
            total += cell(iv) * (v - iv)
        return total * self.grid.cell_width

    def integrate(self, interval) -> float:
        d = _as_dilate(interval)
        if d.rho == 1:
            q = d.base
            lvl_sums = self.level_sums(q.level)
            return float(lvl_sums[q.index]) * self.grid.dx
        return self.integral(*d.clipped(self.grid))

    def average(self, interval) -> float:
        """Integral over the (clipped) interval divided by its unclipped length."""
        d = _as_dilate(interval)
        if d.length == 0:
            raise ValueError("zero-length interval")
        return self.integrate(d) / float(d.length)

    def average_exact(self, interval) -> Fraction:
        d = _as_dilate(interval)
        if d.length == 0:
            raise ValueError("zero-length interval")
        return self.integral_exact(*d.clipped(self.grid)) / d.length

    def total(self) -> float:
        return float(self._pyramid[-1][0]) * self.grid.dx

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write("x,value\n")
        for x, y in zip(self.grid.midpoints(), self.values):
            buf.write(f"{float(x)!r},{float(y)!r}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path, M: int | None = None) -> "GridFunction":
        """Read ``x,value`` rows written by :meth:`to_csv`."""
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        x, y = data[:, 0], data[:, 1]
        width = 2 * x[0]
        J = -int(round(math.log2(width)))
        n = len(y)
        if M is None:
            M = int(round(math.log2(n))) - J
        grid = Grid(M, J)
        return cls(grid, y)


# ---------------------------------------------------------------------------
# sparse families


@dataclass(frozen=True)
class SparseFamily:
    grid: Grid
    members: frozenset
    certified: bool
    strengthened_for_rho: Fraction | None = None
    worst: tuple | None = field(default=None, compare=False)

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __contains__(self, q):
        return q in self.members

    def sorted(self) -> list[DyadicInterval]:
        return sorted(self.members)

    def total_length(self) -> Fraction:
        return sum((q.length for q in self.members), Fraction(0))


def _by_position(members) -> list[DyadicInterval]:
    # ancestors precede descendants: same left end sorts the longer first
    return sorted(members, key=lambda q: (q.left, q.level))


def packing_measures(members: Iterable[DyadicInterval]) -> dict:
    """Map each member Q to ``|U{Q' in members : Q' strictly inside Q}|``."""
    order = _by_position(members)
    out = {}
    for i, q in enumerate(order):
        covered = Fraction(0)
        cover_end = q.left
        r = q.right
        for d in order[i + 1:]:
            if d.left >= r:
                break
            if d.left >= cover_end:
                covered += d.length
                cover_end = d.right
        out[q] = covered
    return out


def verify_sparse(members: Iterable[DyadicInterval], grid: Grid) -> SparseFamily:
    """Certify ``|U{Q' < Q}| < |Q|/2`` for every member, exactly.

    The returned family records the member with the largest covered
    fraction in ``worst`` as ``(Q, fraction)``.
    """
    members = frozenset(members)
    for q in members:
        q.check(grid)
    pack = packing_measures(members)
    worst = None
    ok = True
    for q, covered in pack.items():
        frac = covered / q.length
        if worst is None or frac > worst[1] or (frac == worst[1] and q < worst[0]):
            worst = (q, frac)
        if not frac < Fraction(1, 2):
            ok = False
    return SparseFamily(grid, members, ok, None, worst)


def check_strengthened(family: SparseFamily | Iterable[DyadicInterval], rho) -> tuple[bool, str]:
    """Both strengthened conditions for dilation ``rho`` (dimension one).

    Packing below ``|Q|/(8 rho)`` and pairwise disjoint ``rho``-dilates
    among distinct members of equal length.
    """
    rho = Fraction(rho)
    members = family.members if isinstance(family, SparseFamily) else frozenset(family)
    for q, covered in packing_measures(members).items():
        if not covered < q.length / (8 * rho):
            return False, f"packing {covered} >= |Q|/(8 rho) at {q!r}"
    by_level: dict[int, list[int]] = {}
    for q in members:
        by_level.setdefault(q.level, []).append(q.index)
    for level, idx in by_level.items():
        idx.sort()
        for a, b in zip(idx, idx[1:]):
            # dilates of [a L, (a+1) L) and [b L, ...) are disjoint iff (b - a) >= rho
            if b - a < rho:
                return False, f"dilates overlap at level {level}: {a}, {b}"
    return True, ""


def split_sparse(family: SparseFamily, rho) -> list[SparseFamily]:
    """Split a certified family into subfamilies strengthened for ``rho``.

    Members are classed by their depth in the family tree modulo ``m``
    (``2**m >= 8 rho``), which pushes the packing below ``|Q|/(8 rho)``, and
    then by index modulo ``ceil(rho)`` within each level, which separates the
    dilates.  That gives at most ``m * ceil(rho)`` pieces, well under
    ``3 rho**2``.
    """
    if not family.certified:
        raise ValueError("split_sparse needs a certified family")
    rho = Fraction(rho)
    if rho < 1:
        raise ValueError("rho must be >= 1")
    m = 0
    while 2 ** m < 8 * rho:
        m += 1
    c = math.ceil(rho)
    gen = _family_generations(family.members)
    buckets: dict[tuple[int, int], set] = {}
    for q in family.members:
        buckets.setdefault((gen[q] % m, q.index % c), set()).add(q)
    out = []
    for key in sorted(buckets):
        sub = buckets[key]
        ok, why = check_strengthened(sub, rho)
        if not ok:
            raise AssertionError(f"split produced an invalid subfamily: {why}")
        base = verify_sparse(sub, family.grid)
        out.append(SparseFamily(family.grid, base.members, base.certified, rho, base.worst))
    return out


def _family_generations(members: frozenset) -> dict:
    if not members:
        return {}
    lowest = min(q.level for q in members)
    gen = {}
    for q in sorted(members, key=lambda q: q.level):
        p = q
        parent = None
        while p.level > lowest:
            p = p.parent()
            if p in members:
                parent = p
                break
        gen[q] = 0 if parent is None else gen[parent] + 1
    return gen


def dominating_family(f: GridFunction, q0: DyadicInterval | None = None) -> SparseFamily:
    """Stopping-time family: children are the maximal ``Q'`` with ``<f>_Q' > 2 <f>_Q``.

    Comparisons are made on cell-value sums scaled by powers of two, so they
    are exact whenever the pairwise sums are.
    """
    grid = f.grid
    q0 = grid.root() if q0 is None else q0
    q0.check(grid)
    v = f.values
    if np.any(v < 0):
        raise ValueError("dominating_family needs f >= 0")
    s0, e0 = q0.cells(grid)
    if np.any(v[:s0] != 0) or np.any(v[e0:] != 0):
        raise DomainError("f must be supported in Q0")
    chosen = [q0]
    stack = [q0]
    while stack:
        q = stack.pop()
        sum_q = float(f.level_sums(q.level)[q.index])
        if sum_q == 0.0:
            continue
        covered = np.zeros(1, dtype=bool)
        for lvl in range(q.level + 1, grid.J + 1):
            d = lvl - q.level
            lo = q.index << d
            block = f.level_sums(lvl)[lo:lo + (1 << d)]
            covered = np.repeat(covered, 2)
            hit = (block * 2.0 ** d > 2.0 * sum_q) & ~covered
            for i in np.flatnonzero(hit):
                child = DyadicInterval(lvl, lo + int(i))
                chosen.append(child)
                stack.append(child)
            covered |= hit
            if covered.all():
                break
    fam = verify_sparse(chosen, grid)
    if not fam.certified:
        raise AssertionError("stopping family failed its sparseness certificate")
    return fam


def random_sparse_family(grid: Grid, size: int, rng: np.random.Generator,
                         min_level: int | None = None, max_level: int | None = None,
                         max_tries: int | None = None) -> SparseFamily:
    """Greedy random certified family: draw intervals, keep those that stay sparse.

    Levels are drawn uniformly from ``min_level .. max_level`` (default the
    whole grid); fewer than ``size`` members come back if the tries run out.
    """
    lo = -grid.M if min_level is None else min_level
    hi = grid.J if max_level is None else max_level
    tries = 50 * size if max_tries is None else max_tries
    members: set = set()
    covered: dict = {}  # member -> measure of the union of members strictly inside
    for _ in range(tries):
        if len(members) >= size:
            break
        lvl = int(rng.integers(lo, hi + 1))
        q = DyadicInterval(lvl, int(rng.integers(0, 2 ** (grid.M + lvl))))
        if q in members:
            continue
        own = packing_measures([m for m in members if q.contains(m)] + [q])[q]
        if not own < q.length / 2:
            continue
        # only the innermost member above q sees its covered measure change
        gain = q.length - own
        update = None
        p = q
        while p.level > -grid.M:
            p = p.parent()
            if p in members:
                update = (p, covered[p] + gain)
                break
        if update is not None and not update[1] < update[0].length / 2:
            continue
        members.add(q)
        covered[q] = own
        if update is not None:
            covered[update[0]] = update[1]
    return verify_sparse(members, grid)


# ---------------------------------------------------------------------------
# text format: "# domain M=<M> J=<J>" then one "level index" pair per line


def write_family(family: SparseFamily, path=None) -> str:
    lines = [f"# domain M={family.grid.M} J={family.grid.J}"]
    lines += [f"{q.level} {q.index}" for q in family.sorted()]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_family(source) -> SparseFamily:
    """Parse the line format back; accepts a path or the text itself."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).exists()):
        source = Path(source).read_text()
    grid = None
    members = []
    for raw in source.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = dict(tok.split("=") for tok in line[1:].split() if "=" in tok)
            if "M" in fields and "J" in fields:
                grid = Grid(int(fields["M"]), int(fields["J"]))
            continue
        lvl, idx = line.split()
        members.append(DyadicInterval(int(lvl), int(idx)))
    if grid is None:
        raise ValueError("missing '# domain M=.. J=..' header")
    return verify_sparse(members, grid)
