"""A small configured sweep, written to CSV next to this script."""
from pathlib import Path

from weaksq import SweepConfig, sweep

out = Path(__file__).with_name("sweep_demo.csv")
config = SweepConfig(p_list=(2.0,), epsilon_list=tuple(2.0 ** -k for k in range(1, 9)),
                     M=4, J=10, seeds=(0,), output_path=str(out))
res = sweep(config)
print(res.csv_text.splitlines()[0])
print(f"{len(res.records)} records, passed={res.passed}, wrote {out}")
