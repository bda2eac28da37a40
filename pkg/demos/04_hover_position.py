"""Closed-form SSCP over a grid of UAV hover positions.

A coarse 30 m grid keeps this quick; ``sscp gridpos --step 10`` gives the
full map as CSV.
"""

import numpy as np

from sscp import grid_position
from sscp.experiments import figure_config

cfg = figure_config(7).replace(quad_n=400, quad_o=400)
res = grid_position(cfg, step=30.0)

print("      " + " ".join(f"{y:6.0f}" for y in res.ys))
for x, row in zip(res.xs, res.sscp):
    print(f"{x:6.0f} " + " ".join(f"{v:6.3f}" for v in row))

x, y, v = res.best
print(f"\nbest hover point ({x:g}, {y:g}) m, SSCP {v:.4f}")
print(f"far cluster ({cfg.x_f:g}, {cfg.y_f:g}), near cluster ({cfg.x_n:g}, {cfg.y_n:g}), "
      f"eavesdropper ({cfg.x_e:g}, {cfg.y_e:g})")
print("mean SSCP over the grid:", np.round(res.sscp.mean(), 4))
