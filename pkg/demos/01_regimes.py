"""When does buying fake streams pay?

Walks Scenario A from weak to strong fraud technology and prints the
equilibrium at each step.
"""
# %%
from pathlib import Path

import numpy as np

from clickfraud.equilibrium import fraud_threshold, solve
from clickfraud.model import Scenario, reduce

scenario = Scenario.from_json((Path(__file__).parent / "data" / "scenario_a.json").read_text())
game = reduce(scenario)
print(f"streamshares d = {game.d}, fraud premium xi = {game.xi:.3f}, V = {game.V:.3f}")

# %% Honesty stays dominant up to this many fake streams per fake user
lam_star = fraud_threshold(game)
print(f"fraud-free up to lambda0 = {lam_star:.4f}")

# %% Sweep the technology parameter
print(f"{'lambda0':>9} {'regime':>10} {'T*':>8} {'cheaters':>9} {'d*':>8}")
for lam in np.linspace(120, 420, 11):
    eq = solve(reduce(scenario.with_lambda0(lam)))
    d_star = "" if eq.d_star is None else f"{eq.d_star:8.4f}"
    print(f"{lam:9.1f} {eq.regime.value:>10} {eq.T_star:8.4f} {eq.n_d:9d} {d_star:>8}")

# %% At lambda0 = 300 both artists cheat until their shares match
eq = solve(game)
print("t* =", np.round(eq.t_star, 6), " d + t* =", np.round(game.d + eq.t_star, 6))
print("worst case (everyone cheats):", eq.worst_case)
