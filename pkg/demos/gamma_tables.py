"""Compare the four closed-form approximations on two gamma claim models.

Run ``python demos/gamma_tables.py``.
"""
import numpy as np

from ruinkit.approx import approximate
from ruinkit.claims import Gamma
from ruinkit.oracle import talbot_ruin
from ruinkit.riskmodel import RiskModel

METHODS = ["renyi", "devylder", "ramsay", "two_point"]

for shape, scale in [(2.0, 0.5), (0.5, 2.0)]:
    model = RiskModel.from_loading(1.0, 0.1, Gamma(shape, 1.0 / scale))
    print(f"\nGamma claims, shape {shape}, mean 1, loading 0.1 (rho = {model.rho:.5f})")
    x = np.array([0, 1, 5, 10, 25, 50, 100, 250, 500, 1000], dtype=float)
    exact = talbot_ruin(model, x)
    print(f"{'x':>6} {'exact':>10}" + "".join(f"{m:>11}" for m in METHODS))
    cols = [approximate(model, m)(x) for m in METHODS]
    for i, xi in enumerate(x):
        print(f"{xi:6g} {exact[i]:10.6f}" + "".join(f"{c[i]:11.6f}" for c in cols))
