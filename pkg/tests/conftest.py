from math import sqrt

import numpy as np
import pytest

from ruinkit.claims import Erlang, Exponential, Gamma, HyperExponential, Uniform
from ruinkit.riskmodel import RiskModel

MIXEXP_CLAIMS = HyperExponential((63 / 128, 7 / 32, 9 / 64, 3 / 32, 7 / 128), (5, 4, 3, 2, 1))


def gamma1_model():
    return RiskModel.from_loading(1.0, 0.1, Gamma(0.01, 100.0))


def gamma2_model():
    return RiskModel(0.4, 0.8 * (4 * sqrt(2) - 1), Gamma(2.5, 1.0))


def mixexp_model(sigma=0.0):
    return RiskModel(1.0, 0.4, MIXEXP_CLAIMS, sigma)


def exp_model(mu=1.0, lam=1.0, c=1.1, sigma=0.0):
    return RiskModel(lam, c, Exponential(mu), sigma)


def exp_psi(model, x):
    """Closed-form ruin function for exponential claims (sigma = 0)."""
    mu = model.claims.rate
    return model.rho * np.exp(-(mu - model.lam / model.c) * np.asarray(x))


def exp_psi_perturbed(model, x):
    """Closed-form ruin function for exponential claims with sigma > 0.

    Roots of the quadratic (c + s2 s/2)(s + mu) - lam = p (..) obtained from
    kappa(s)/s at the two negative poles of phi.
    """
    mu, lam, c, s2 = model.claims.rate, model.lam, model.c, model.sigma**2
    # kappa(s)/s * (s + mu) = (s2/2) s^2 + (c + s2 mu/2) s + (c mu - lam)
    r = np.roots([s2 / 2, c + s2 * mu / 2, c * mu - lam])
    r1, r2 = sorted(r.real)
    # Psi*(s) = (1 - phi)/s with phi = p (s + mu) / ((s2/2)(s - r1)(s - r2))
    p = model.p
    x = np.asarray(x, dtype=float)
    k = p / (s2 / 2)
    out = np.zeros_like(x)
    for a, b in ((r1, r2), (r2, r1)):
        # residue of -phi(s)/s at s = a
        res = -k * (a + mu) / (a * (a - b))
        out += res * np.exp(a * x)
    return out


def random_models(rng, n, sigma=False):
    """``n`` random profitable models over several claim families."""
    out = []
    for _ in range(n):
        kind = rng.integers(4)
        if kind == 0:
            cl = Exponential(rng.uniform(0.2, 5))
        elif kind == 1:
            cl = Gamma(rng.uniform(0.3, 4), rng.uniform(0.2, 3))
        elif kind == 2:
            w = rng.dirichlet(np.ones(3))
            cl = HyperExponential(tuple(w / w.sum()), tuple(rng.uniform(0.5, 1.5) + np.arange(3)))
        else:
            cl = Erlang(int(rng.integers(1, 5)), rng.uniform(0.5, 3))
        sig = rng.uniform(0.1, 2) if sigma else 0.0
        out.append(RiskModel.from_loading(rng.uniform(0.2, 3), rng.uniform(0.05, 2), cl, sig))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


@pytest.fixture
def uniform_model():
    return RiskModel.from_loading(1.0, 1.0, Uniform(0.0, 1.0))
