"""Johnson-Taaffe fits for uniform claims.

Shows how the JT index of the aggregate loss grows with the loading, and
how the two JT-based ruin approximations compare with a Monte Carlo
reference.  Talbot inversion is avoided here: the uniform transform has an
``exp(-s)`` factor and the fixed contour converges slowly below ``x = 1``.
"""
import numpy as np

from ruinkit.approx import jt_beekman, jt_ramsay
from ruinkit.claims import Uniform
from ruinkit.jtfit import compare_indices
from ruinkit.oracle import mc_aggregate_loss
from ruinkit.riskmodel import RiskModel

print(f"{'theta':>6} {'J(L)':>8} {'floor':>6}")
for theta in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0]:
    cmp = compare_indices(RiskModel.from_loading(1.0, theta, Uniform(0.0, 1.0)))
    print(f"{theta:6.2f} {cmp.partial_J_aggregate:8.4f} {int(np.floor(cmp.partial_J_aggregate + 1e-12)):6d}")

model = RiskModel.from_loading(1.0, 1.0, Uniform(0.0, 1.0))
r, b = jt_ramsay(model), jt_beekman(model)
print(f"\norders: equilibrium fit {r.meta['order']}, conditional aggregate fit {b.meta['order']}")
x = np.array([0.0, 0.25, 0.5, 1, 2, 3, 5])
mc = mc_aggregate_loss(model, x, 10**6, seed=1)
print(f"{'x':>5} {'MC':>10} {'+/-':>9} {'jt_ramsay':>10} {'jt_beekman':>11}")
for i, xi in enumerate(x):
    print(f"{xi:5g} {mc.psi_hat[i]:10.6f} {mc.half_width_95[i]:9.6f} {r(xi):10.6f} {b(xi):11.6f}")
