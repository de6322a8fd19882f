"""Executable steps of the weak-type argument for sparse square operators.

The level decomposition of a sparse family, the exceptional sets ``E(Q)``,
the averaging lemma, the ``p < 2`` and ``p = 2`` level-set estimates and
the Rubio de Francia majorant used to pass to ``p > 2``.  Every function
returns the numbers it measured so callers can inspect or export them.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .dyadic import DilatedInterval, DyadicInterval, Grid, GridFunction, SparseFamily
from .norms import strong_norm
from .operators import maximal_function, sparse_square_operator
from .weights import Weight, a1_characteristic, ap_characteristic

__all__ = [
    "LevelDecomposition",
    "decompose",
    "ExceptionalSets",
    "exceptional_sets",
    "eq_e_check",
    "WeakRhoReport",
    "lemma_weakrho_check",
    "TraceRecord",
    "BoundTrace",
    "weak_bound_p_lt_2",
    "weak_bound_p_eq_2",
    "ExtrapolationMajorant",
    "maximal_norm_estimate",
    "rubio_de_francia",
    "ExtrapolationTrace",
    "extrapolate_p_gt_2",
]


# ---------------------------------------------------------------------------
# level decomposition


@dataclass(frozen=True)
class LevelDecomposition:
    family: SparseFamily
    rho: Fraction
    s1: SparseFamily
    levels: dict
    zero: SparseFamily
    averages: dict = field(repr=False)

    def buckets(self):
        yield "S1", self.s1
        for ell in sorted(self.levels):
            yield ell, self.levels[ell]
        yield "zero", self.zero


def _bucket(avg: Fraction):
    if avg > 1:
        return "S1"
    if avg == 0:
        return "zero"
    # 2^-(l+1) < avg <= 2^-l  <=>  l = floor(log2(1/avg))
    return math.floor(1 / avg).bit_length() - 1


def _subfamily(family: SparseFamily, members) -> SparseFamily:
    return SparseFamily(family.grid, frozenset(members), family.certified,
                        family.strengthened_for_rho)


def decompose(family: SparseFamily, f: GridFunction, rho=1) -> LevelDecomposition:
    """Split ``family`` by the size of ``<f>_{rho Q}``.

    ``S1`` holds ``<f>_{rho Q} > 1``, level ``l`` holds
    ``2**-(l+1) < <f>_{rho Q} <= 2**-l`` and ``zero`` the members where
    ``f`` vanishes on ``rho Q``.  Averages are rational.
    """
    if np.any(f.values < 0):
        raise ValueError("decompose needs f >= 0")
    rho = Fraction(rho)
    averages = {}
    groups: dict = {}
    for q in family.sorted():
        a = f.average_exact(DilatedInterval(q, rho))
        averages[q] = a
        groups.setdefault(_bucket(a), []).append(q)
    s1 = _subfamily(family, groups.pop("S1", []))
    zero = _subfamily(family, groups.pop("zero", []))
    levels = {ell: _subfamily(family, qs) for ell, qs in sorted(groups.items())}
    return LevelDecomposition(family, rho, s1, levels, zero, averages)


# ---------------------------------------------------------------------------
# exceptional sets


def _merge(intervals):
    out = []
    for a, b in sorted(intervals):
        if b <= a:
            continue
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def _subtract(a, b, holes):
    pieces = []
    cur = a
    for x, y in _merge(holes):
        if y <= cur or x >= b:
            continue
        if x > cur:
            pieces.append((cur, x))
        cur = max(cur, y)
    if cur < b:
        pieces.append((cur, b))
    return pieces


def _length(pieces) -> Fraction:
    return sum((b - a for a, b in pieces), Fraction(0))


@dataclass(frozen=True)
class ExceptionalSets:
    ell: int
    rho: Fraction
    bound: Fraction
    E: dict = field(repr=False)
    R: dict = field(repr=False)
    e_average: dict = field(repr=False)
    violations: list
    overlaps: list
    r_violations: list

    @property
    def ok(self) -> bool:
        return not (self.violations or self.overlaps or self.r_violations)


def exceptional_sets(decomp: LevelDecomposition, ell: int, f: GridFunction,
                     strict: bool = True) -> ExceptionalSets:
    """``R(Q)``, ``E(Q) = rho Q \\ R(Q)`` and ``<f 1_E(Q)>_{rho Q}`` for one level.

    Checks, in rational arithmetic, ``|R(Q)| < |rho Q|/8``, the lower bound
    ``<f 1_E(Q)>_{rho Q} >= (3/8) 2**-l`` and pairwise disjointness of the
    ``E(Q)``.  With ``strict`` any failure raises ``AssertionError``.
    """
    rho = decomp.rho
    if decomp.family.strengthened_for_rho != rho:
        raise ValueError(f"family is not certified as strengthened for rho={rho}")
    fam = decomp.levels.get(ell)
    members = fam.sorted() if fam is not None else []
    grid = decomp.family.grid
    bound = Fraction(3, 8) * Fraction(1, 2 ** ell)
    E, R, avg = {}, {}, {}
    violations, r_bad = [], []
    for q in members:
        d = DilatedInterval(q, rho)
        lo, hi = d.left, d.right
        inner = [DilatedInterval(o, rho).clipped(grid) for o in members
                 if o != q and lo <= o.left and o.right <= hi and o.length < d.length]
        a, b = d.clipped(grid)
        R[q] = _merge(inner)
        E[q] = _subtract(a, b, R[q])
        if not _length(R[q]) < d.length / 8:
            r_bad.append(q)
        avg[q] = sum((f.integral_exact(x, y) for x, y in E[q]), Fraction(0)) / d.length
        if avg[q] < bound:
            violations.append(q)
    pieces = sorted((a, b, q) for q in members for a, b in E[q])
    overlaps = []
    for i, (a, b, q) in enumerate(pieces):
        for a2, b2, q2 in pieces[i + 1:]:
            if a2 >= b:
                break
            if q2 != q:
                overlaps.append((q, q2))
    out = ExceptionalSets(ell, rho, bound, E, R, avg, violations, overlaps, r_bad)
    if strict and not out.ok:
        raise AssertionError(f"exceptional set checks failed at level {ell}: "
                             f"{len(violations)} bound, {len(overlaps)} overlap, "
                             f"{len(r_bad)} |R| violations")
    return out


def eq_e_check(sets: ExceptionalSets, grid: Grid) -> float:
    """Largest pointwise ratio of ``sum 2**-2l 1_Q`` to ``(8/3)**2 sum <f 1_E>**2 1_Q``."""
    lhs = np.zeros(grid.n_cells)
    rhs = np.zeros(grid.n_cells)
    for q, a in sets.e_average.items():
        s, e = q.cells(grid)
        lhs[s:e] += 4.0 ** -sets.ell
        rhs[s:e] += (8 / 3) ** 2 * float(a) ** 2
    mask = lhs > 0
    if not mask.any():
        return 0.0
    return float(np.max(lhs[mask] / rhs[mask]))


# ---------------------------------------------------------------------------
# averaging lemma


@dataclass(frozen=True)
class WeakRhoReport:
    lhs: float
    rhs: float
    ratio: float
    apchar: float
    rho: Fraction


def lemma_weakrho_check(family, g: Mapping[DyadicInterval, GridFunction], w: Weight,
                        p: float, rho=1, apchar: float | None = None) -> WeakRhoReport:
    """Both sides of the averaging lemma.

    ``L = ||(sum_Q <g_Q>_{rho Q}**p 1_Q)**(1/p)||_{L^p(w)}`` and
    ``R = [w]_{A_p}**(1/p) ||(sum_Q g_Q**p)**(1/p)||_{L^p(w)}``.  For
    ``rho = 1`` Hölder gives ``L <= R`` with constant exactly one.
    """
    rho = Fraction(rho)
    members = sorted(family)
    if not members:
        raise ValueError("empty collection")
    grid = g[members[0]].grid
    if apchar is None:
        apchar = ap_characteristic(w, p, grid).value
    left = np.zeros(grid.n_cells)
    right = np.zeros(grid.n_cells)
    for q in members:
        gq = g[q]
        if np.any(gq.values < 0):
            raise ValueError("lemma needs non-negative g_Q")
        s, e = q.cells(grid)
        left[s:e] += gq.average(DilatedInterval(q, rho)) ** p
        right += gq.values ** p
    L = strong_norm(GridFunction(grid, left ** (1 / p)), w, p).value
    R = apchar ** (1 / p) * strong_norm(GridFunction(grid, right ** (1 / p)), w, p).value
    return WeakRhoReport(L, R, L / R if R > 0 else math.inf, apchar, rho)


# ---------------------------------------------------------------------------
# level-set estimates


@dataclass(frozen=True)
class TraceRecord:
    ell: int
    bucket_size: int
    level_mass: float
    bound_term: float


@dataclass
class BoundTrace:
    """Per-level measurements of one run of a level-set estimate."""

    p: float
    apchar: float
    records: list
    s1_mass: float
    maximal_mass: float
    total_measured: float
    total_bound: float
    certified: bool
    extras: dict = field(default_factory=dict)

    def to_json(self, path=None) -> str:
        text = json.dumps([asdict(r) for r in self.records], indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def decay_ratios(self) -> np.ndarray:
        b = np.array([r.bound_term for r in self.records])
        return b[1:] / b[:-1] if b.size > 1 else np.zeros(0)


def _count(family: SparseFamily, grid: Grid) -> np.ndarray:
    c = np.zeros(grid.n_cells)
    for q in family.sorted():
        s, e = q.cells(grid)
        c[s:e] += 1
    return c


def _union_mask(family: SparseFamily, grid: Grid) -> np.ndarray:
    return _count(family, grid) > 0


def _square_sum(f: GridFunction, family: SparseFamily, rho, grid: Grid) -> np.ndarray:
    if len(family) == 0:
        return np.zeros(grid.n_cells)
    return sparse_square_operator(f, family, rho).values ** 2


def _normalise(f: GridFunction, w: Weight, p: float) -> tuple[GridFunction, float]:
    n = strong_norm(f, w, p).value
    if n == 0:
        raise ValueError("f must have positive norm")
    return f / n, n


def weak_bound_p_lt_2(family: SparseFamily, f: GridFunction, w: Weight, p: float,
                      rho=1) -> BoundTrace:
    """Run the ``1 < p < 2`` estimate with ``eps = 1 - p/2``.

    Level ``l`` measures ``w{sum_{S_l} 2**-2l 1_Q > 2**-eps l}`` and pairs it
    with ``[w]_{A_p} (8/3)**p 2**(-(2-p-eps) p l / 2)``; the constant comes
    from the exceptional-set bound, so the pairing is a certified inequality
    whenever ``rho = 1`` and the family is strengthened.
    """
    if not 1 < p < 2:
        raise ValueError("this estimate needs 1 < p < 2")
    grid = f.grid
    f, _ = _normalise(f, w, p)
    eps = 1 - p / 2
    apchar = ap_characteristic(w, p, grid).value
    decomp = decompose(family, f, rho)
    masses = w.cell_masses(grid)
    records = []
    rate = (2 - p - eps) * p / 2
    for ell, fam in sorted(decomp.levels.items()):
        over = _count(fam, grid) * 4.0 ** -ell > 2.0 ** (-eps * ell)
        mass = float(np.sum(masses[over]))
        bound = apchar * (8 / 3) ** p * 2.0 ** (-rate * ell)
        records.append(TraceRecord(ell, len(fam), mass, bound))
    k_eps = 1 / (1 - 2.0 ** -eps)
    rest = SparseFamily(grid, family.members - decomp.s1.members, family.certified)
    total = float(np.sum(masses[_square_sum(f, rest, rho, grid) > k_eps]))
    s1_mass = float(np.sum(masses[_union_mask(decomp.s1, grid)]))
    mf = maximal_function(f, None if rho == 1 else rho)
    max_mass = float(np.sum(masses[mf.values > 1]))
    certified = (Fraction(rho) == 1 and family.strengthened_for_rho == 1
                 and all(r.level_mass <= r.bound_term for r in records))
    return BoundTrace(p, apchar, records, s1_mass, max_mass, total,
                      sum(r.bound_term for r in records), certified,
                      {"eps": eps, "k_eps": k_eps, "rate": rate,
                       "series_limit": apchar * (8 / 3) ** p / (1 - 2.0 ** -rate),
                       "level_mass_sum": sum(r.level_mass for r in records)})


def weak_bound_p_eq_2(family: SparseFamily, f: GridFunction, w: Weight, rho=1,
                      C_ell0: float = 4.0) -> BoundTrace:
    """Run the ``p = 2`` estimate split at ``l0 = floor(C (1 + log2 [w]_{A_2}))``.

    Head levels pair ``w{sum_{S_l} <f>**2 1_Q > 1/l0}`` with the certified
    ``l0 (8/3)**2 [w] int_{U E(Q)} f**2 dw``.  Tail levels record
    ``w{sum_{S_l} 1_Q >= 2**(15 l/8)}`` next to ``w(U S_l)``, and the largest
    ``c`` with ``mass <= w(U S_l) exp(-c 2**(15 l/8) / [w])`` is reported.
    """
    grid = f.grid
    f, _ = _normalise(f, w, 2.0)
    apchar = ap_characteristic(w, 2.0, grid).value
    ell0 = int(math.floor(C_ell0 * (1 + math.log2(apchar))))
    decomp = decompose(family, f, rho)
    masses = w.cell_masses(grid)
    f2w = f.values ** 2 * masses
    strengthened = family.strengthened_for_rho == Fraction(rho)
    head, tail = [], []
    c_env = math.inf
    for ell, fam in sorted(decomp.levels.items()):
        if ell < ell0:
            over = _square_sum(f, fam, rho, grid) > 1 / ell0
            mass = float(np.sum(masses[over]))
            if strengthened and Fraction(rho) == 1:
                sets = exceptional_sets(decomp, ell, f, strict=False)
                e_mask = np.zeros(grid.n_cells, dtype=bool)
                for pieces in sets.E.values():
                    for a, b in pieces:
                        e_mask[int(a / grid.cell_width):int(b / grid.cell_width)] = True
                bound = ell0 * (8 / 3) ** 2 * apchar * float(np.sum(f2w[e_mask]))
            else:
                bound = math.inf
            head.append(TraceRecord(ell, len(fam), mass, bound))
        else:
            count = _count(fam, grid)
            mass = float(np.sum(masses[count >= 2.0 ** (15 * ell / 8)]))
            union = float(np.sum(masses[count > 0]))
            if mass > 0:
                c_env = min(c_env, -math.log(mass / union) * apchar / 2.0 ** (15 * ell / 8))
            tail.append(TraceRecord(ell, len(fam), mass, union))
    rest = SparseFamily(grid, family.members - decomp.s1.members, family.certified)
    total = float(np.sum(masses[_square_sum(f, rest, rho, grid) > 2]))
    s1_mass = float(np.sum(masses[_union_mask(decomp.s1, grid)]))
    mf = maximal_function(f, None if rho == 1 else rho)
    max_mass = float(np.sum(masses[mf.values > 1]))
    scale = apchar * (1 + math.log(apchar)) ** 2
    certified = all(r.level_mass <= r.bound_term for r in head)
    return BoundTrace(2.0, apchar, head, s1_mass, max_mass, total,
                      sum(r.bound_term for r in head), certified,
                      {"ell0": ell0, "tail": tail, "tail_c": c_env,
                       "head_mass_sum": sum(r.level_mass for r in head),
                       "tail_mass_sum": sum(r.level_mass for r in tail),
                       "scale": scale, "ratio": total / scale})


# ---------------------------------------------------------------------------
# Rubio de Francia majorant


@dataclass
class ExtrapolationMajorant:
    H: GridFunction
    h: GridFunction
    terms: int
    A: float
    tail: GridFunction
    norm_h: float
    norm_H: float
    a1_Hw: float
    excess: float
    estimate: float


def _random_test_functions(grid: Grid, n: int, seed: int):
    rng = np.random.default_rng(seed)
    N = grid.n_cells
    for i in range(n):
        kind = i % 4
        if kind == 0:
            v = rng.lognormal(0.0, 1.5, N)
        elif kind == 1:
            lvl = int(rng.integers(-grid.M, grid.J + 1))
            k = int(rng.integers(0, 2 ** (grid.M + lvl)))
            v = GridFunction.from_interval(grid, DyadicInterval(lvl, k)).values
        elif kind == 2:
            v = np.zeros(N)
            v[: max(1, N >> int(rng.integers(0, grid.M + grid.J + 1)))] = 1.0
        else:
            v = rng.random(N) ** 4 * (rng.random(N) < 0.3)
            v[int(rng.integers(0, N))] += 1.0
        yield GridFunction(grid, v)


def maximal_norm_estimate(w: Weight, q: float, grid: Grid, samples: int = 100,
                          seed: int = 0) -> float:
    """Largest ``||M g||/||g||`` in ``L^q(w)`` over seeded random ``g >= 0``."""
    best = 1.0
    for g in _random_test_functions(grid, samples, seed):
        n = strong_norm(g, w, q).value
        if n > 0:
            best = max(best, strong_norm(maximal_function(g), w, q).value / n)
    return best


def rubio_de_francia(h: GridFunction, w: Weight, q_prime: float, A: float | None = None,
                     terms: int = 20, samples: int = 100, seed: int = 0) -> ExtrapolationMajorant:
    """``H = sum_{k<=K} M^k h / (2A)^k`` with the dyadic maximal function.

    ``A`` defaults to 1.25 times the empirical ``L^{q'}(w)`` norm of ``M``;
    a smaller ``A`` is refused.  ``h <= H`` holds by construction, the bound
    ``||H|| <= 2 ||h||`` is re-checked and ``MH <= 2A H + tail`` is measured
    with ``tail = M^{K+1} h / (2A)^K``.
    """
    if np.any(h.values < 0):
        raise ValueError("h must be non-negative")
    if terms < 1:
        raise ValueError("need at least one term")
    grid = h.grid
    est = maximal_norm_estimate(w, q_prime, grid, samples, seed)
    if A is None:
        A = 1.25 * est
    elif A < est:
        raise ValueError(f"A={A:.4g} is below the empirical maximal norm {est:.4g}")
    H = h.values.copy()
    g = h.values
    for k in range(1, terms + 1):
        g = maximal_function(GridFunction(grid, g)).values
        H = H + g / (2 * A) ** k
    tail = maximal_function(GridFunction(grid, g)).values / (2 * A) ** terms
    Hf = GridFunction(grid, H)
    norm_h = strong_norm(h, w, q_prime).value
    norm_H = strong_norm(Hf, w, q_prime).value
    if norm_H > 2 * norm_h * (1 + 1e-6):
        raise RuntimeError("Rubio de Francia series failed to contract")
    mh = maximal_function(Hf).values
    excess = float(np.max(mh - (2 * A * H + tail)))
    a1 = a1_characteristic(w.scaled(Hf), grid)
    return ExtrapolationMajorant(Hf, h, terms, A, GridFunction(grid, tail),
                                 norm_h, norm_H, a1, excess, est)


@dataclass
class ExtrapolationTrace:
    p: float
    apchar: float
    level_set_mass: float
    direct: float
    via_H: float
    hw_a2: float
    chain: float
    scale: float
    norm_f: float
    majorant: ExtrapolationMajorant = field(repr=False)

    @property
    def ratio(self) -> float:
        return self.direct / self.scale


def extrapolate_p_gt_2(f: GridFunction, w: Weight, p: float, family: SparseFamily,
                       rho=1, terms: int = 20, samples: int = 100,
                       seed: int = 0) -> ExtrapolationTrace:
    """Numerical pass through the extrapolation chain for ``2 < p < 3``.

    With ``Omega = {T_S f > 1}``, ``q' = p/(p-2)`` and the dual witness
    ``h = 1_Omega / w(Omega)**(1/q')``, records ``w(Omega)**(1/p)``,
    ``(Hw)(Omega)**(1/2)``, the ``p = 2`` chain value
    ``([Hw]_{A_2} (1 + log [Hw]_{A_2})**2 ||f||_p**2 ||H||_{q'})**(1/2)`` and
    the target scale ``[w]_{A_p}**(1/2) (1 + log [w]_{A_p}) ||f||_p``.
    """
    if not 2 < p < 3:
        raise ValueError("extrapolation step needs 2 < p < 3")
    grid = f.grid
    q_prime = p / (p - 2)
    apchar = ap_characteristic(w, p, grid).value
    masses = w.cell_masses(grid)
    tf = sparse_square_operator(f, family, rho).values
    omega = tf > 1
    w_omega = float(np.sum(masses[omega]))
    norm_f = strong_norm(f, w, p).value
    if w_omega > 0:
        h = GridFunction(grid, omega.astype(float) / w_omega ** (1 / q_prime))
    else:
        h = GridFunction.constant(grid, 1.0 / float(np.sum(masses)) ** (1 / q_prime))
    maj = rubio_de_francia(h, w, q_prime, terms=terms, samples=samples, seed=seed)
    hw = w.scaled(maj.H)
    via_H = float(np.sum(hw.cell_masses(grid)[omega])) ** 0.5
    hw_a2 = ap_characteristic(hw, 2.0, grid).value
    chain = (hw_a2 * (1 + math.log(hw_a2)) ** 2 * norm_f ** 2 * maj.norm_H) ** 0.5
    scale = apchar ** 0.5 * (1 + math.log(apchar)) * norm_f
    return ExtrapolationTrace(p, apchar, w_omega, w_omega ** (1 / p), via_H, hw_a2,
                              chain, scale, norm_f, maj)
