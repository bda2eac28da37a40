"""Best UAV altitude and best energy-harvesting ratio.

Flying higher raises the LoS probability but lengthens every link, and a
longer harvesting phase buys transmit energy at the cost of offloading time.
Both trade-offs peak inside the search range.
"""

from sscp.experiments import figure_config, optimize_scalar

for k in (1, 2, 3):
    cfg = figure_config(5).replace(K=k, Q=k)
    h, v = optimize_scalar(cfg, "h_u", (50.0, 300.0), budget=30)
    print(f"K=Q={k}: h* = {h:6.1f} m  SSCP {v:.4f}")

print()
for k in (1, 2, 3):
    cfg = figure_config(6).replace(K=k, Q=k)
    e, v = optimize_scalar(cfg, "eta", (0.05, 0.95), budget=30)
    print(f"K=Q={k}: eta* = {e:.3f}  SSCP {v:.4f}")
