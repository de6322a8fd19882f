"""Walk through the weak-type argument numerically on one sparse family."""
import numpy as np

from weaksq import Grid, GridFunction, power_weight, random_sparse_family, split_sparse
from weaksq.prooflab import (decompose, exceptional_sets, extrapolate_p_gt_2, weak_bound_p_eq_2,
                             weak_bound_p_lt_2)

grid = Grid(0, 10)
rng = np.random.default_rng(0)
f = GridFunction(grid, rng.random(grid.n_cells) ** 3)
w = power_weight(0.25)

# exceptional sets need a strengthened family, so take the biggest rho = 1 piece
piece = max(split_sparse(random_sparse_family(grid, 60, rng), 1), key=lambda s: len(s.members))
d = decompose(piece, f, 1)
print(f"{len(piece.members)} intervals, {len(d.s1.members)} in S1, levels {sorted(d.levels)}")
for ell in sorted(d.levels):
    es = exceptional_sets(d, ell, f)
    print(f"level {ell}: {len(d.levels[ell])} intervals, |E| bound {float(es.bound):.4f}, ok={es.ok}")

for tr in (weak_bound_p_lt_2(piece, f, w, 1.5), weak_bound_p_eq_2(piece, f, w)):
    print(f"p={tr.p}: level sets {tr.total_measured:.4g} <= {tr.total_bound:.4g} "
          f"(certified {tr.certified}); w(S1)={tr.s1_mass:.4g}, w(Mf > 1)={tr.maximal_mass:.4g}")

ex = extrapolate_p_gt_2(f, w, 2.5, piece)
print(f"p=2.5: direct {ex.direct:.4g}, through the majorant {ex.via_H:.4g}, chain {ex.chain:.4g}")
