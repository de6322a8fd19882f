"""Sparse families: stopping-time domination and splitting into strengthened pieces."""
import numpy as np

from weaksq import (Grid, GridFunction, check_strengthened, dominating_family,
                    random_sparse_family, split_sparse)

grid = Grid(0, 8)
rng = np.random.default_rng(3)
x = grid.midpoints()
f = GridFunction(grid, np.abs(np.sin(12 * x)) / np.sqrt(x) + rng.random(grid.n_cells))

fam = dominating_family(f)
print(f"stopping-time family: {len(fam.members)} intervals, certified sparse: {fam.certified}")

fam = random_sparse_family(grid, 80, rng)
for rho in (1, 2, 3, 5):
    pieces = split_sparse(fam, rho)
    ok = all(check_strengthened(piece, rho)[0] for piece in pieces)
    print(f"rho={rho}: {len(pieces)} pieces (cap {3 * rho * rho}), all strengthened: {ok}")
