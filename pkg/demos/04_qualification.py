"""Minimum-stream thresholds can backfire.

A threshold just above the equilibrium cutoff makes every cheater buy
exactly enough streams to qualify, which raises total fraud.
"""
# %%
import numpy as np

from clickfraud.equilibrium import solve_closed_form
from clickfraud.model import ReducedGame
from clickfraud.policy import analyze, theta_range

game = ReducedGame.from_parameters([0.3, 0.7], xi=0.5, V=4.0)
eq = solve_closed_form(game)
theta_star, theta_2 = theta_range(game, eq)
print(f"cutoff d* = {eq.d_star:.3f}; thresholds in ({eq.d_star:.3f}, "
      f"{eq.d_star + theta_2:.3f}] are characterized")

# %%
for d_hat in (0.8, 1.2, 1.5, 2.5, 3.2):
    a = analyze(game, eq, d_hat)
    if a.t_hat is None:
        print(f"d_hat={d_hat}: {a.classification.value}")
        continue
    print(f"d_hat={d_hat}: {a.classification.value:>13}  T={a.T_hat:.3f}  "
          f"u={np.round(a.u_hat, 3)}  equilibrium={a.is_equilibrium}")
