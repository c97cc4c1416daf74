"""Closed-form and moment-based approximations of the ruin probability.

Every method returns a :class:`RuinApprox` whose ``survival`` mixture is the
(approximate) law of the maximal aggregate loss ``L``: an atom ``1 - Psi(0)``
at zero plus a density, so that ``survival.survival(x) = Psi(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np
import numpy.polynomial.polynomial as P

from .errors import NotPerturbed, NumericalInconsistency, PerturbedNotSupported
from .jtfit import jt_fit3
from .ratlap import ExpPolyMixture, RationalLT, partial_fractions
from .riskmodel import RiskModel

METHODS = (
    "renyi",
    "devylder",
    "ramsay",
    "two_point",
    "perturbed_2m",
    "perturbed_1m",
    "jt_ramsay",
    "jt_beekman",
)
DEGENERATE_TOL = 1e-10


@dataclass(frozen=True)
class RuinApprox:
    """An approximate ruin function.

    Attributes
    ----------
    method : str
    survival : ExpPolyMixture
        Law of ``L``; ``survival.survival(x)`` is ``Psi(x)``.
    components : tuple or None
        For the perturbed methods, ``(Psi_d, Psi_j)`` as mixtures whose
        ``density`` method evaluates the creeping and jump parts of ``Psi``.
    meta : dict
        Fitted coefficients.
    """

    method: str
    survival: ExpPolyMixture
    components: tuple | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def psi(self, x):
        return self.survival.survival(x)

    __call__ = psi

    def psi_d(self, x):
        return self.components[0].density(x)

    def psi_j(self, x):
        return self.components[1].density(x)


def law_from_psi(psi: ExpPolyMixture) -> ExpPolyMixture:
    """Law of ``L`` from a mixture that evaluates ``Psi`` itself.

    The atom at zero is ``1 - Psi(0)`` and the density is ``-Psi'``.
    """
    psi0 = float(psi.density(0.0))
    dens = psi.derivative().scaled(-1.0)
    return ExpPolyMixture(dens.weights, dens.rates, dens.powers, 1.0 - psi0)


def _from_psi(method, psi_mix, meta, components=None):
    return RuinApprox(method, law_from_psi(psi_mix), components, meta)


def _unperturbed(model: RiskModel, name: str):
    if model.sigma > 0:
        raise PerturbedNotSupported(f"{name} is defined for sigma = 0 only")


def renyi(model: RiskModel) -> RuinApprox:
    """Exponential approximation ``rho exp(-x (1 - rho) / mtilde_1)``."""
    _unperturbed(model, "renyi")
    mt1 = model.claims.equilibrium_moments(1)[0]
    rate = (1 - model.rho) / mt1
    psi = ExpPolyMixture.from_terms([(model.rho, rate, 0)])
    return _from_psi("renyi", psi, {"rho": model.rho, "rate": rate})


def devylder(model: RiskModel) -> RuinApprox:
    """Approximation ``Psi*(s) = a / (s + alpha)`` matching the first two moments of ``L``."""
    _unperturbed(model, "devylder")
    m1, m2, m3 = model.claims.moments(3)
    lam, p = model.lam, model.p
    d = 3 * lam * m2**2 + 2 * p * m3
    a = 3 * lam * m2**2 / d
    alpha = 6 * p * m2 / d
    psi = ExpPolyMixture.from_terms([(a, alpha, 0)])
    return _from_psi("devylder", psi, {"a": a, "alpha": alpha})


def _ramsay_form(model, b0, b1, b2, a1, method, scale):
    """Invert ``rho (b2 s + b1 - a1) / (b2 s^2 + (b1 - rho a1) s + (1 - rho) b0)``.

    When all ``b`` vanish (exponential equilibrium law) the form degenerates
    to 0/0; the limit is the exact exponential answer, which is what
    :func:`renyi` returns in that case.
    """
    rho = model.rho
    meta = {"b0": b0, "b1": b1, "b2": b2, "a1": a1}
    if max(abs(b0) / scale[0], abs(b1) / scale[1], abs(b2) / scale[2]) <= DEGENERATE_TOL:
        base = renyi(model)
        return RuinApprox(method, base.survival, None, {**meta, "degenerate": True, **base.meta})
    num = [rho * (b1 - a1), rho * b2]
    den = [(1 - rho) * b0, b1 - rho * a1, b2]
    r = RationalLT(num, den)
    psi = partial_fractions(r)
    meta.update(degenerate=False, transform=r)
    return _from_psi(method, psi, meta)


def ramsay_pade12(model: RiskModel) -> RuinApprox:
    """Pade (1,2) approximation built from factorially reduced equilibrium moments."""
    _unperturbed(model, "ramsay_pade12")
    mt = model.claims.equilibrium_moments(3)
    mu1, mu2, mu3 = mt[0], mt[1] / 2, mt[2] / 6
    b0 = mu2 - mu1**2
    b1 = mu3 - mu2 * mu1
    b2 = mu1 * mu3 - mu2**2
    a1 = b1 - mu1 * b0
    scale = (mu2, mu3, mu1 * mu3)
    return _ramsay_form(model, b0, b1, b2, a1, "ramsay", scale)


def two_point_ramsay(model: RiskModel) -> RuinApprox:
    """Two-point Pade approximation matching ``Psi(0) = rho`` and ``Psi'(0)``."""
    _unperturbed(model, "two_point_ramsay")
    m1, m2, m3 = model.claims.moments(3)
    b2 = (2 * m1 * m3 - 3 * m2**2) / 6
    b1 = (m3 - 3 * m1 * m2) / 3
    b0 = m2 - 2 * m1**2
    a1 = b2 / m1
    scale = (m2, m3, m1 * m3)
    return _ramsay_form(model, b0, b1, b2, a1, "two_point", scale)


def _perturbed(model: RiskModel, a_d: float, a_j: float, method: str) -> RuinApprox:
    """Two-exponential creeping/jump decomposition.

    ``Psi_d*(s) = (s + a_d)/D(s)`` and ``Psi_j*(s) = a_j/D(s)`` with
    ``D(s) = s^2 + (a_d + a_j + 2p/sigma^2) s + 2 a_d p/sigma^2 = (s+mu1)(s+mu2)``.
    """
    s2 = model.sigma**2
    B = a_d + a_j + 2 * model.p / s2
    C = a_d * 2 * model.p / s2
    disc = B * B - 4 * C
    meta = {"a_d": a_d, "a_j": a_j, "b1": B, "b0": C, "discriminant": disc}
    if disc < -DEGENERATE_TOL * B * B:
        raise NumericalInconsistency(f"negative discriminant {disc:.3g}")
    if abs(disc) <= DEGENERATE_TOL * B * B:
        mu = B / 2
        psi_d = ExpPolyMixture.from_terms([(1.0, mu, 0), (a_d - mu, mu, 1)])
        psi_j = ExpPolyMixture.from_terms([(a_j, mu, 1)])
        meta.update(mu1=mu, mu2=mu, confluent=True)
    else:
        sq = sqrt(disc)
        q = (B + sq) / 2
        mu2, mu1 = q, C / q
        if not (mu1 < a_d < mu2):
            raise NumericalInconsistency("root ordering mu1 < a_d < mu2 violated")
        gap = mu2 - mu1
        psi_d = ExpPolyMixture.from_terms([((a_d - mu1) / gap, mu1, 0), ((mu2 - a_d) / gap, mu2, 0)])
        psi_j = ExpPolyMixture.from_terms([(a_j / gap, mu1, 0), (-a_j / gap, mu2, 0)])
        meta.update(mu1=mu1, mu2=mu2, confluent=False)
    total = ExpPolyMixture.from_terms(list(psi_d.terms()) + list(psi_j.terms()))
    out = _from_psi(method, total, meta, (psi_d, psi_j))
    if meta["confluent"]:
        from .admiss import numeric_admissibility

        meta["admissibility"] = numeric_admissibility(out.survival)
    return out


def _need_sigma(model, name):
    if model.sigma <= 0:
        raise NotPerturbed(f"{name} needs sigma > 0")


def perturbed_2m(model: RiskModel) -> RuinApprox:
    """Creeping/jump approximation fitting two claim moments."""
    _need_sigma(model, "perturbed_2m")
    m1, m2, m3 = model.claims.moments(3)
    a_d = 3 * m2 / m3
    a_j = 3 * model.lam * m2**2 / (model.sigma**2 * m3)
    return _perturbed(model, a_d, a_j, "perturbed_2m")


def perturbed_1m(model: RiskModel) -> RuinApprox:
    """Creeping/jump approximation fitting the claim mean only."""
    _need_sigma(model, "perturbed_1m")
    m1, m2 = model.claims.moments(2)
    a_j = 2 * model.lam * m1 / model.sigma**2
    a_d = 2 * m1 / m2
    return _perturbed(model, a_d, a_j, "perturbed_1m")


def pk_assemble(model: RiskModel, fe: RationalLT) -> RationalLT:
    """``Psi*(s) = rho (1 - fe*(s)) / (s (1 - rho fe*(s)))`` for a rational ``fe*``.

    With ``fe* = N/D`` and ``N(0) = D(0)`` the factor ``s`` cancels by
    dropping the constant term of ``D - N``.
    """
    rho = model.rho
    D = fe.den
    N = np.zeros(len(D))
    N[: len(fe.num)] = fe.num
    top = (D - N)[1:]
    bottom = D - rho * N
    return RationalLT(rho * top, bottom)


def jt_ramsay(model: RiskModel, order: int | None = None) -> RuinApprox:
    """JT-fit the equilibrium law and plug its transform into the PK formula."""
    _unperturbed(model, "jt_ramsay")
    fit = jt_fit3(model.claims.equilibrium_moments(3), order)
    r = pk_assemble(model, fit.rational_lt())
    psi = partial_fractions(r)
    return _from_psi("jt_ramsay", psi, {"fit": fit, "order": fit.order, "transform": r})


def jt_beekman(model: RiskModel, order: int | None = None) -> RuinApprox:
    """JT-fit the conditional law of ``L`` given ``L > 0``; ``Psi = rho S_fit``."""
    _unperturbed(model, "jt_beekman")
    agg = model.aggregate_loss_moments(3)
    raw = agg.raw() / model.rho
    fit = jt_fit3(raw, order)
    dens = fit.mixture().scaled(model.rho, atom0=1.0 - model.rho)
    return RuinApprox("jt_beekman", dens, None, {"fit": fit, "order": fit.order})


_DISPATCH = {
    "renyi": renyi,
    "devylder": devylder,
    "ramsay": ramsay_pade12,
    "two_point": two_point_ramsay,
    "perturbed_2m": perturbed_2m,
    "perturbed_1m": perturbed_1m,
    "jt_ramsay": jt_ramsay,
    "jt_beekman": jt_beekman,
}


def approximate(model: RiskModel, method: str) -> RuinApprox:
    try:
        fn = _DISPATCH[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}") from None
    return fn(model)
