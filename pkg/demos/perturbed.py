"""Creeping and jump parts of the ruin probability under diffusion perturbation."""
import numpy as np

from ruinkit.approx import perturbed_1m, perturbed_2m
from ruinkit.claims import Gamma
from ruinkit.oracle import talbot_ruin
from ruinkit.riskmodel import RiskModel

model = RiskModel.from_loading(1.0, 0.2, Gamma(2.0, 2.0), sigma=0.5)
two, one = perturbed_2m(model), perturbed_1m(model)
print(f"two-moment fit: mu1 = {two.meta['mu1']:.5f} < a_d = {two.meta['a_d']:.5f} < mu2 = {two.meta['mu2']:.5f}")
x = np.array([0.0, 0.5, 1, 2, 5, 10, 20, 40])
exact = talbot_ruin(model, x)
print(f"{'x':>5} {'exact':>10} {'2m':>10} {'creep':>10} {'jump':>10} {'1m':>10}")
for i, xi in enumerate(x):
    print(f"{xi:5g} {exact[i]:10.6f} {two(xi):10.6f} {two.psi_d(xi):10.6f} "
          f"{two.psi_j(xi):10.6f} {one(xi):10.6f}")
