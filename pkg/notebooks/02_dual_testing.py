"""Dual testing counterexample: the ratio grows like [w]_A2^(1 - alpha)."""
from weaksq import example_dual_testing

eps_list = [2.0 ** -k for k in range(6, 19)]
for alpha in (0.55, 0.65, 0.75):
    records, fit = example_dual_testing(2.0, alpha, eps_list)
    print(f"alpha={alpha}: slope={fit.slope:.4f} target={1 - alpha:.2f}")
    for r in records[::4]:
        print(f"    [w]={r.ap_char:12.1f}  ratio={r.ratio:.4f}")
