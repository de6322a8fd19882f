"""Power weights x^(eps-1): closed-form A_p growth and the Haar testing ratio.

Run with ``python3 notebooks/01_power_weights.py``.
"""
import math

from weaksq import Grid, ap_characteristic, example_power_weight, fit_exponent, power_weight

eps_list = [2.0 ** -k for k in range(1, 10)]

# The dyadic A_p constant of a power weight is attained on intervals touching 0,
# so a small grid gives the same numbers as a large one.
grid = Grid(4, 10)
for p in (1.5, 2.0, 2.5):
    vals = [ap_characteristic(power_weight(e), p, grid).value for e in eps_list]
    fit = fit_exponent([1 / e for e in eps_list], vals)
    print(f"p={p}: [w]_Ap ~ (1/eps)^{fit.slope:.3f}  (r2={fit.r2:.5f})")

# Weak-type Haar square function tested on the indicator of [0, 1).
# The ratio should grow like [w]_Ap^(1/p).
records, fit = example_power_weight(2.0, eps_list, M=6, J=12)
for r in records:
    print(f"eps=2^{round(math.log2(r.epsilon)):>3d}  [w]_A2={r.ap_char:10.3f}  ratio={r.ratio:.4f}")
print(f"log-log slope {fit.slope:.3f}, expected 0.5")
