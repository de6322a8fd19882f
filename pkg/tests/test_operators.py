from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weaksq.dyadic import (DilatedInterval, DyadicInterval, Grid, GridFunction, dominating_family,
                           random_sparse_family, verify_sparse)
from weaksq.operators import (KernelDictionary, average, default_dictionary, dilated_averages,
                              dual_testing_operator, haar_coefficients, haar_square_function,
                              intrinsic_square_discrete, maximal_function, sparse_square_operator)
from weaksq.weights import StepWeight, power_weight, unit_weight


def brute_maximal(f, grid, rho=1):
    out = np.zeros(grid.n_cells)
    for j in grid.levels:
        for q in grid.intervals(j):
            s, e = q.cells(grid)
            out[s:e] = np.maximum(out[s:e], abs(f).average(DilatedInterval(q, rho)))
    return out


def test_average_examples(rng):
    g = Grid(0, 6)
    assert average(GridFunction.constant(g, 3.0), g.root()) == pytest.approx(3.0)
    assert average(GridFunction.indicator(g, 0, Fraction(1, 2)), g.root()) == 0.5
    f = GridFunction(g, rng.random(g.n_cells))
    d = DilatedInterval(DyadicInterval(2, 1), 3)
    assert average(f, d) == pytest.approx(f.values[:48].sum() * g.dx / 0.75, rel=1e-12)
    with pytest.raises(ValueError):
        DilatedInterval(DyadicInterval(2, 1), Fraction(1, 2))


def test_dilated_averages_match_pointwise(rng):
    g = Grid(1, 5)
    f = GridFunction(g, rng.random(g.n_cells))
    for j in (-1, 0, 2, 4):
        got = dilated_averages(f, j, Fraction(5, 2))
        want = [f.average(DilatedInterval(q, Fraction(5, 2))) for q in g.intervals(j)]
        assert np.allclose(got, want, rtol=1e-12)


def test_maximal_examples():
    g = Grid(0, 6)
    assert np.allclose(maximal_function(GridFunction.indicator(g, 0, 1)).values, 1.0)
    f = GridFunction.indicator(g, 0, Fraction(1, 16))
    assert np.allclose(maximal_function(f).values, brute_maximal(f, g))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 30), st.sampled_from([1, 3, Fraction(5, 2)]))
def test_maximal_matches_scan(seed, rho):
    g = Grid(1, 4)
    r = np.random.default_rng(seed)
    f = GridFunction(g, r.normal(size=g.n_cells))
    got = maximal_function(f, None if rho == 1 else rho).values
    assert np.allclose(got, brute_maximal(f, g, rho), rtol=1e-12)


def test_maximal_dominates_every_average(rng):
    g = Grid(0, 10)
    f = GridFunction(g, rng.random(g.n_cells) ** 5)
    mf = maximal_function(f).values
    for j in g.levels:
        avg = f.level_averages(j)
        assert np.all(mf >= np.repeat(avg, 2 ** (g.J - j)) - 1e-15)


def test_haar_constant_is_zero():
    g = Grid(2, 5)
    assert np.allclose(haar_square_function(GridFunction.constant(g, 2.0)).values, 0.0)


def test_haar_indicator_of_unit_interval():
    for M in (1, 3, 6):
        g = Grid(M, 4)
        sf = haar_square_function(GridFunction.indicator(g, 0, 1)).values
        inside = sf[: 2 ** g.J]
        assert np.allclose(inside ** 2, (1 - 4.0 ** -M) / 3, rtol=1e-13)


def test_haar_coefficients_match_inner_products(rng):
    g = Grid(1, 4)
    f = GridFunction(g, rng.normal(size=g.n_cells))
    table = haar_coefficients(f)
    for q, c in table.items():
        s, e = q.cells(g)
        mid = (s + e) // 2
        h = np.zeros(g.n_cells)
        h[s:mid], h[mid:e] = 1, -1
        h *= float(q.length) ** -0.5
        assert c == pytest.approx(float(np.sum(f.values * h)) * g.dx, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 30), st.integers(0, 3), st.integers(0, 8))
def test_haar_plancherel(seed, M, J):
    g = Grid(M, J)
    f = GridFunction(g, np.random.default_rng(seed).normal(size=g.n_cells))
    sf = haar_square_function(f)
    table = haar_coefficients(f)
    energy = float(np.sum(f.values ** 2)) * g.dx
    lhs = float(np.sum(sf.values ** 2)) * g.dx + table.mean_energy()
    assert lhs == pytest.approx(energy, rel=1e-9)
    assert table.energy() + table.mean_energy() == pytest.approx(energy, rel=1e-9)


def test_sparse_operator_examples():
    g = Grid(0, 4)
    f = GridFunction.indicator(g, 0, 1)
    single = verify_sparse([g.root()], g)
    assert np.allclose(sparse_square_operator(f, single).values, 1.0)
    nested = verify_sparse([g.root(), DyadicInterval(2, 0)], g)
    t = sparse_square_operator(f, nested).values
    assert np.allclose(t[:4], np.sqrt(2)) and np.allclose(t[4:], 1.0)
    with pytest.raises(ValueError):
        sparse_square_operator(f, verify_sparse([g.root(), DyadicInterval(1, 0)], g))


def test_sparse_operator_matches_double_loop(rng):
    g = Grid(0, 7)
    fam = random_sparse_family(g, 40, rng)
    f = GridFunction(g, rng.random(g.n_cells))
    for rho in (1, 3):
        got = sparse_square_operator(f, fam, rho).values
        want = np.zeros(g.n_cells)
        x = g.midpoints()
        for q in fam:
            a = sum(f.values[i] * g.dx for i in range(g.n_cells)
                    if abs(x[i] - float(q.center)) < rho * float(q.length) / 2)
            a /= rho * float(q.length)
            want[(x >= float(q.left)) & (x < float(q.right))] += a * a
        assert np.allclose(got, np.sqrt(want), rtol=1e-12)


def test_kernel_dictionary_certificates():
    d = default_dictionary(0.75, resolution=5)
    assert len(d) == 32
    x = d.points
    for k in d.kernels:
        assert abs(k.sum()) <= 1e-12 * np.abs(k).sum()
        diffs = np.abs(k[:, None] - k[None, :])
        dist = np.abs(x[:, None] - x[None, :])
        np.fill_diagonal(dist, 1.0)
        assert np.all(diffs <= dist ** 0.75 + 1e-12)
    bad = d.kernels[:1].copy()
    bad[0, 10] += 1.0
    with pytest.raises(ValueError):
        KernelDictionary(0.75, 5, bad)


def test_intrinsic_zero_and_monotone(rng):
    g = Grid(0, 8)
    d = default_dictionary(0.8, resolution=6)
    assert np.all(intrinsic_square_discrete(GridFunction.zeros(g), 0.8, d, [3, 4]).values == 0)
    f = GridFunction(g, rng.normal(size=g.n_cells))
    small = intrinsic_square_discrete(f, 0.8, d.subset(range(8)), [3, 4]).values
    full = intrinsic_square_discrete(f, 0.8, d, [3, 4]).values
    more = intrinsic_square_discrete(f, 0.8, d, [2, 3, 4, 5]).values
    assert np.all(small <= full) and np.all(full <= more)
    with pytest.raises(ValueError):
        intrinsic_square_discrete(f, 0.8, d, [])
    with pytest.raises(ValueError):
        intrinsic_square_discrete(f, 0.5, d, [3])


def test_intrinsic_convolution_against_direct_sum(rng):
    g = Grid(0, 6)
    d = default_dictionary(1.0, resolution=4, frequencies=[1], phases=[0.0])
    f = GridFunction(g, rng.normal(size=g.n_cells))
    m = 3
    half = 2 ** (g.J - m)
    k = d.samples(2 ** d.resolution // half)[0]
    t = 2.0 ** -m
    resp = np.zeros(g.n_cells)
    for n in range(g.n_cells):
        s = 0.0
        for i in range(g.n_cells):
            off = n - i
            if -half <= off <= half:
                s += f.values[i] * k[off + half] * g.dx / t
        resp[n] = abs(s)
    out = np.zeros(g.n_cells)
    for n in range(g.n_cells):
        lo, hi = max(0, n - half + 1), min(g.n_cells, n + half)
        out[n] = np.log(2) / t * np.sum(resp[lo:hi] ** 2) * g.dx
    got = intrinsic_square_discrete(f, 1.0, d, [m]).values
    assert np.allclose(got, np.sqrt(out), rtol=1e-10)


def test_intrinsic_domination_sanity(rng):
    g = Grid(0, 8)
    d = default_dictionary(0.75, resolution=6)
    worst = 0.0
    for _ in range(50):
        f = GridFunction(g, rng.random(g.n_cells) ** 3)
        G = intrinsic_square_discrete(f, 0.75, d, range(2, 7)).values
        bound = maximal_function(f).values ** 2 + \
            sparse_square_operator(f, dominating_family(f)).values ** 2 + 1e-12
        worst = max(worst, float(np.max(G ** 2 / bound)))
    assert np.isfinite(worst) and worst < 100


def test_dual_testing_operator_examples(rng):
    g = Grid(0, 4)
    q = DyadicInterval(1, 1)
    out = dual_testing_operator({q: GridFunction.from_interval(g, q)}, unit_weight(g)).values
    assert np.allclose(out, GridFunction.from_interval(g, q).values)
    w = StepWeight(g, rng.random(g.n_cells) + 0.5)
    zero = dual_testing_operator({q: GridFunction.zeros(g)}, w).values
    assert np.all(zero == 0)
    with pytest.raises(ValueError):
        dual_testing_operator({q: GridFunction.constant(g, -1.0)}, w)


def test_dual_testing_power_weight_average():
    g = Grid(0, 6)
    w = power_weight(0.5)
    a = {g.root(): GridFunction.constant(g, 1.0)}
    out = dual_testing_operator(a, w).values
    assert np.allclose(out, 2.0)  # w([0,1)) = 1/eps
