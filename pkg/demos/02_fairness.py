"""Fraud can help the smallest artist.

Compares the poorest artist's utility with and without fraud, first on
Scenario A and then across random games.
"""
# %%
import numpy as np

from clickfraud import oracle
from clickfraud.equilibrium import solve_closed_form
from clickfraud.fairness import compare
from clickfraud.model import ReducedGame

game = ReducedGame.from_parameters([0.3, 0.7], xi=0.5, V=4.0)
rep = compare(game, solve_closed_form(game))
for artist, u0, u1, delta in rep.rows():
    print(f"artist {artist}: honest {u0:.3f} -> fraud {u1:.3f} ({delta:+.3f})")
print(f"min utility {rep.min_zero:.3f} -> {rep.min_star:.3f}; fairer: {rep.fairer}")

# %% The closed-form test 1 + T* < V - sqrt(d_min V (V - 1)) against the direct comparison
rng = np.random.default_rng(7)
agree = fairer = 0
for _ in range(500):
    g = oracle.random_fraud_game(rng, int(rng.integers(2, 7)))
    r = compare(g, solve_closed_form(g))
    agree += r.fairer == r.condition_holds
    fairer += r.fairer
print(f"condition agrees on {agree}/500 games; fraud is fairer in {fairer}")
