"""Sweep the UAV transmit SNR for one, two and three devices per cluster.

Writes the same CSV layout as ``sscp sweep`` and prints each curve.
"""

import sys

from sscp.experiments import Axis, SweepSpec, figure_config, run_sweep, write_csv

spec = SweepSpec(
    figure_config(3),
    (Axis.parse("K+Q=1,2,3"), Axis.parse("gamma_u_db=0:40:5")),
    methods=("analytic", "monte-carlo"),
    trials=200_000,
    seed=3,
)
rows = run_sweep(spec)

for k in (1, 2, 3):
    curve = [r for r in rows if r.values[0] == k]
    line = " ".join(f"{r.sscp_ana:.3f}" for r in curve)
    print(f"K=Q={k}: {line}")

out = sys.argv[1] if len(sys.argv) > 1 else None
text = write_csv(spec, rows, out)
if out is None:
    print()
    print(text, end="")
