from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weaksq.dyadic import (DilatedInterval, DomainError, DyadicInterval, Grid, GridFunction,
                           SparseFamily, check_strengthened, dominating_family, packing_measures,
                           random_sparse_family, read_family, split_sparse, verify_sparse,
                           write_family)


def brute_covered(q, members, grid):
    """Cell enumeration of |U{Q' strictly inside Q}|."""
    mask = np.zeros(grid.n_cells, dtype=bool)
    for m in members:
        if q.strictly_contains(m):
            s, e = m.cells(grid)
            mask[s:e] = True
    return Fraction(int(mask.sum())) * grid.cell_width


intervals = st.integers(0, 6).flatmap(
    lambda j: st.tuples(st.just(j), st.integers(0, 2 ** j - 1)))


def test_interval_geometry():
    q = DyadicInterval(2, 3)
    assert (q.left, q.right, q.length) == (Fraction(3, 4), Fraction(1), Fraction(1, 4))
    assert q.parent() == DyadicInterval(1, 1)
    assert all(q.contains(c) and q.strictly_contains(c) for c in q.children())
    assert not q.strictly_contains(q)
    big = DyadicInterval(-2, 0)
    assert big.length == 4 and big.right == 4


def test_interval_outside_domain_is_rejected():
    g = Grid(0, 4)
    with pytest.raises(DomainError):
        DyadicInterval(1, 2).check(g)
    with pytest.raises(DomainError):
        verify_sparse([DyadicInterval(-1, 0)], g)


def test_dilate_rho_one_is_base_and_clipping_is_exact():
    g = Grid(0, 4)
    q = DyadicInterval(2, 0)
    d1 = DilatedInterval(q, 1)
    assert (d1.left, d1.right) == (q.left, q.right)
    d3 = DilatedInterval(q, Fraction(3))
    assert (d3.left, d3.right) == (Fraction(-1, 4), Fraction(1, 2))
    assert d3.clipped(g) == (Fraction(0), Fraction(1, 2))
    d = DilatedInterval(DyadicInterval(3, 5), Fraction(5, 3))
    a, b = d.clipped(g)
    assert a.denominator in (48, 24, 16, 12, 8, 6, 4, 3, 2, 1)


def test_verify_sparse_examples():
    g = Grid(0, 4)
    assert verify_sparse([DyadicInterval(0, 0)], g).certified
    fam = verify_sparse([DyadicInterval(0, 0), DyadicInterval(1, 0)], g)
    assert not fam.certified
    assert fam.worst == (DyadicInterval(0, 0), Fraction(1, 2))
    members = [DyadicInterval(0, 0), DyadicInterval(2, 0), DyadicInterval(2, 2)]
    assert brute_covered(members[0], members, g) == Fraction(1, 2)
    assert not verify_sparse(members, g).certified


@settings(max_examples=80, deadline=None)
@given(st.lists(intervals, min_size=1, max_size=25, unique=True))
def test_packing_matches_cell_enumeration(raw):
    g = Grid(0, 6)
    members = [DyadicInterval(j, k) for j, k in raw]
    pack = packing_measures(members)
    for q in members:
        assert pack[q] == brute_covered(q, members, g)
    fam = verify_sparse(members, g)
    expected = all(brute_covered(q, members, g) < q.length / 2 for q in members)
    assert fam.certified == expected


def test_split_singleton():
    g = Grid(0, 4)
    fam = verify_sparse([DyadicInterval(1, 1)], g)
    pieces = split_sparse(fam, 1)
    assert len(pieces) == 1 and pieces[0].members == fam.members


def test_split_random_family_rho3():
    g = Grid(0, 12)
    fam = random_sparse_family(g, 200, np.random.default_rng(3))
    assert fam.certified and len(fam) == 200
    pieces = split_sparse(fam, 3)
    union = frozenset().union(*(p.members for p in pieces))
    assert union == fam.members
    assert sum(len(p) for p in pieces) == len(fam)
    for p in pieces:
        ok, why = check_strengthened(p, 3)
        assert ok, why
        assert verify_sparse(p.members, g).certified
        assert p.strengthened_for_rho == 3
    assert len(pieces) <= 3 * 9


def test_split_requires_certified():
    g = Grid(0, 4)
    with pytest.raises(ValueError):
        split_sparse(verify_sparse([DyadicInterval(0, 0), DyadicInterval(1, 0)], g), 1)


def test_strengthened_detects_overlapping_dilates():
    ok, why = check_strengthened([DyadicInterval(3, 0), DyadicInterval(3, 2)], 3)
    assert not ok and "dilates" in why
    assert check_strengthened([DyadicInterval(3, 0), DyadicInterval(3, 3)], 3)[0]


def test_dominating_family_constant_and_zero():
    g = Grid(0, 6)
    assert dominating_family(GridFunction.constant(g, 1.0)).members == {g.root()}
    assert dominating_family(GridFunction.zeros(g)).members == {g.root()}


def _brute_children(f, q, grid):
    """Maximal Q' strictly inside q with <f>_Q' > 2 <f>_q, by full scan."""
    base = f.average(q)
    hits = []
    for lvl in range(q.level + 1, grid.J + 1):
        for k in range(q.index << (lvl - q.level), (q.index + 1) << (lvl - q.level)):
            c = DyadicInterval(lvl, k)
            if f.average(c) > 2 * base and not any(h.contains(c) for h in hits):
                hits.append(c)
    return set(hits)


def test_dominating_family_left_half():
    g = Grid(0, 5)
    f = GridFunction.indicator(g, 0, Fraction(1, 2))
    fam = dominating_family(f)
    assert fam.certified
    assert _brute_children(f, g.root(), g) == set()
    assert fam.members == {g.root()}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 20))
def test_dominating_family_matches_brute_force(seed):
    g = Grid(0, 5)
    r = np.random.default_rng(seed)
    f = GridFunction(g, r.random(g.n_cells) ** 6 * (r.random(g.n_cells) < 0.4))
    fam = dominating_family(f)
    assert fam.certified and g.root() in fam
    expected = {g.root()}
    frontier = [g.root()]
    while frontier:
        q = frontier.pop()
        if f.average(q) == 0:
            continue
        kids = _brute_children(f, q, g)
        expected |= kids
        frontier += kids
    assert fam.members == expected
    assert fam.total_length() <= 2 * g.root().length


def test_dominating_family_support_check():
    g = Grid(1, 4)
    f = GridFunction.indicator(g, 1, 2)
    with pytest.raises(DomainError):
        dominating_family(f, DyadicInterval(0, 0))
    with pytest.raises(ValueError):
        dominating_family(GridFunction.constant(g, -1.0))


def test_grid_function_integrals_exact(rng):
    g = Grid(1, 6)
    f = GridFunction(g, rng.random(g.n_cells))
    for j in g.levels:
        for q in list(g.intervals(j))[:5]:
            s, e = q.cells(g)
            brute = float(np.sum(f.values[s:e])) * g.dx
            assert abs(f.integrate(q) - brute) <= 2 ** -40 * max(1.0, brute)
    exact = f.integral_exact(Fraction(1, 3), Fraction(7, 5))
    cw = g.cell_width
    brute = Fraction(0)
    for i, v in enumerate(f.values):
        lo, hi = max(Fraction(1, 3), i * cw), min(Fraction(7, 5), (i + 1) * cw)
        if hi > lo:
            brute += Fraction(v) * (hi - lo)
    assert exact == brute


def test_average_over_clipped_dilate_uses_unclipped_length(rng):
    g = Grid(0, 6)
    f = GridFunction(g, rng.random(g.n_cells))
    q = DyadicInterval(2, 1)
    d = DilatedInterval(q, 3)
    s, e = 0, 48  # 3Q = [0, 3/4)
    brute = float(np.sum(f.values[s:e])) * g.dx / (3 / 4)
    assert f.average(d) == pytest.approx(brute, rel=1e-12)
    edge = DilatedInterval(DyadicInterval(1, 0), 3)  # [-1/2, 1) clipped to [0, 1)
    assert f.average(edge) == pytest.approx(f.total() / 1.5, rel=1e-12)


def test_grid_function_arithmetic_keeps_grid(rng):
    g = Grid(0, 4)
    a = GridFunction(g, rng.random(g.n_cells))
    b = GridFunction(g, rng.random(g.n_cells))
    for out in (a + b, a * b, a - 1.0, a.maximum(b), abs(-a), a ** 2, a.sqrt()):
        assert out.grid == g
    with pytest.raises(DomainError):
        a + GridFunction.zeros(Grid(0, 5))


def test_csv_roundtrip(tmp_path, rng):
    g = Grid(1, 4)
    f = GridFunction(g, rng.random(g.n_cells))
    path = tmp_path / "f.csv"
    f.to_csv(path)
    back = GridFunction.from_csv(path)
    assert back.grid == g and np.array_equal(back.values, f.values)


def test_family_text_roundtrip(tmp_path):
    g = Grid(0, 8)
    fam = random_sparse_family(g, 30, np.random.default_rng(1))
    text = write_family(fam, tmp_path / "s.txt")
    assert text.splitlines()[0] == "# domain M=0 J=8"
    back = read_family(tmp_path / "s.txt")
    assert back.members == fam.members and back.certified
    with pytest.raises(ValueError):
        read_family("0 0\n")
