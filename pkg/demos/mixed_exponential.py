"""Exact ruin probability for mixed-exponential claims, three ways.

The claim transform is rational, so the ruin function is a finite
exponential sum.  It is checked against Talbot inversion and Monte Carlo.
"""
import numpy as np

from ruinkit.claims import HyperExponential
from ruinkit.oracle import exact_ruin_rational, mc_aggregate_loss, talbot_ruin
from ruinkit.riskmodel import RiskModel

claims = HyperExponential([63 / 128, 7 / 32, 9 / 64, 3 / 32, 7 / 128], [5, 4, 3, 2, 1])
model = RiskModel(lam=1.0, c=2 / 5, claims=claims)
law = exact_ruin_rational(model)
print(f"rho = {model.rho:.8f}, atom at zero = {law.atom0:.8f}")
print("Psi(x) = sum of w exp(-r x):")
for w, r, k in sorted(law.tail().terms(), key=lambda t: complex(t[1]).real):
    print(f"  w = {complex(w).real:.10f}  r = {complex(r).real:.4f}")

grid = np.linspace(0.5, 9.5, 10)
mc = mc_aggregate_loss(model, grid, 10**6, seed=1)
exact = law.survival(grid)
print(f"\n{'x':>5} {'exact':>11} {'Talbot':>11} {'MC':>11} {'+/-':>9}")
for x, e, t, m, h in zip(grid, exact, talbot_ruin(model, grid), mc.psi_hat, mc.half_width_95):
    print(f"{x:5.1f} {e:11.8f} {t:11.8f} {m:11.8f} {h:9.6f}")
