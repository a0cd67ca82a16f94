"""Blending pro-rata with user-centric sharing.

Only the pro-rata part rewards fake streams, so a small enough weight on it
removes the incentive altogether.
"""
# %%
from pathlib import Path

import numpy as np

from clickfraud.model import Scenario, reduce
from clickfraud.rules import max_alpha, solve_weighted

game = reduce(Scenario.from_json((Path(__file__).parent / "data" / "scenario_a.json").read_text()))
bound = max_alpha(game)
print(f"honesty is dominant for alpha <= {bound.value:.6f}")

# %%
print(f"{'alpha':>6} {'regime':>10} {'T*':>8} {'u_1':>8} {'u_2':>8}")
for alpha in np.linspace(0.1, 1.0, 10):
    eq = solve_weighted(game, alpha)
    print(f"{alpha:6.2f} {eq.regime.value:>10} {eq.T_star:8.4f} "
          f"{eq.utilities[0]:8.4f} {eq.utilities[1]:8.4f}")
