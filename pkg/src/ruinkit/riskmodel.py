"""The (optionally Brownian-perturbed) Cramer-Lundberg risk model.

The surplus is ``u + c t + sigma W_t - (compound Poisson claims)`` with claim
intensity ``lambda``.  Its Laplace exponent is

    kappa(s) = s (c - lambda Fbar*(s) + sigma**2 s / 2),

and the ruin probability ``Psi(x)`` is the survival function of the maximal
aggregate loss ``L``, whose transform is ``phi(s) = p s / kappa(s)`` with
``p = c - lambda m_1`` the profit rate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .claims import ClaimDistribution, MomentsOnly, Uniform
from .errors import NoRoot, NotSupported, PerturbedNotSupported

MAX_SERIES_ORDER = 8


@dataclass(frozen=True)
class AggregateLossMoments:
    """Factorially reduced moments ``lam[k-1] = E[L**k] / k!`` of ``L``.

    ``rho`` is the probability that ``L > 0``.
    """

    lam: np.ndarray
    rho: float

    def raw(self) -> np.ndarray:
        """Raw moments ``E[L**k]``."""
        return np.array([factorial(k + 1) * v for k, v in enumerate(self.lam)])

    def ruin_moments(self) -> np.ndarray:
        """``int_0^oo x**(k-1)/(k-1)! Psi(x) dx`` for k = 1.., i.e. ``lam[k]`` shifted."""
        return self.lam.copy()


@dataclass(frozen=True)
class RiskModel:
    lam: float
    c: float
    claims: ClaimDistribution
    sigma: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("claim intensity must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not self.p > 0:
            raise ValueError(f"profit rate p = c - lambda*m1 = {self.p:.6g} must be positive")

    @classmethod
    def from_loading(cls, lam, theta, claims, sigma=0.0) -> "RiskModel":
        """Model whose premium is ``(1 + theta) lambda m_1``."""
        return cls(lam, (1.0 + theta) * lam * claims.mean, claims, sigma)

    @property
    def m1(self) -> float:
        return self.claims.mean

    @property
    def p(self) -> float:
        return self.c - self.lam * self.claims.mean

    @property
    def theta(self) -> float:
        return self.p / (self.lam * self.m1)

    @property
    def rho(self) -> float:
        return self.lam * self.m1 / self.c

    @property
    def kappa2(self) -> float:
        return self.lam * self.claims.raw_moment(2) + self.sigma**2

    @property
    def perturbed(self) -> bool:
        return self.sigma > 0

    # transforms -------------------------------------------------------

    def laplace_exponent(self, s):
        s_arr = np.asarray(s, dtype=complex)
        fb = self.claims.survival_laplace(s_arr)
        out = s_arr * (self.c - self.lam * fb + self.sigma**2 * s_arr / 2)
        return out if out.ndim else complex(out)

    def _kappa_over_s(self, s):
        return self.c - self.lam * self.claims.survival_laplace(s) + self.sigma**2 * s / 2

    def loss_transform(self, s):
        """``phi(s) = E[exp(-s L)] = p / (kappa(s)/s)``."""
        s_arr = np.asarray(s, dtype=complex)
        out = self.p / self._kappa_over_s(s_arr)
        return out if out.ndim else complex(out)

    def ruin_transform(self, s):
        """``Psi*(s) = (1 - phi(s)) / s``; near s = 0 a short series in the lam_k is used."""
        s_arr = np.asarray(s, dtype=complex)
        lam = self.aggregate_loss_moments(3).lam
        small = np.abs(s_arr) * lam[0] < 1e-5
        safe = np.where(small, 1.0, s_arr)
        out = (1.0 - self.p / self._kappa_over_s(safe)) / safe
        if np.any(small):
            out = np.where(small, lam[0] - lam[1] * s_arr + lam[2] * s_arr**2, out)
        return out if out.ndim else complex(out)

    # moments ------------------------------------------------------------

    def aggregate_loss_moments(self, K: int) -> AggregateLossMoments:
        if K < 1:
            raise ValueError("K must be >= 1")
        if self.sigma == 0:
            lam = _pk_recursion(self.claims.equilibrium_moments(K), self.theta)
        else:
            lam = _series_division_moments(self, K)
        return AggregateLossMoments(np.asarray(lam, dtype=float), self.rho)

    def adjustment_coefficient(self) -> float:
        return adjustment_coefficient(self)

    def ruin_derivatives_at_zero(self, f0, f1, f2) -> np.ndarray:
        return ruin_derivatives_at_zero(self, f0, f1, f2)


def _pk_recursion(eq_moments, theta):
    # theta lam_n = mu_n + sum_{k<n} mu_k lam_{n-k}, mu_k = mtilde_k / k!
    mu = [m / factorial(k + 1) for k, m in enumerate(eq_moments)]
    lam = []
    for n in range(1, len(mu) + 1):
        acc = mu[n - 1] + sum(mu[k - 1] * lam[n - k - 1] for k in range(1, n))
        lam.append(acc / theta)
    return lam


def _series_division_moments(model: RiskModel, K: int):
    """``(-1)**k lam_k`` are the Maclaurin coefficients of ``phi``.

    The denominator ``kappa(s)/(s p)`` is expanded with exact rational
    coefficients and inverted term by term.
    """
    if K > MAX_SERIES_ORDER:
        raise NotSupported(f"perturbed aggregate-loss moments limited to K <= {MAX_SERIES_ORDER}")
    m = model.claims.moments(K + 1)
    p = Fraction(model.p)
    lam_c = Fraction(model.lam)
    d = [Fraction(1)]
    for k in range(1, K + 1):
        coef = (-1) ** (k + 1) * lam_c * Fraction(m[k]) / factorial(k + 1)
        if k == 1:
            coef += Fraction(model.sigma) ** 2 / 2
        d.append(coef / p)
    q = [Fraction(1)]
    for k in range(1, K + 1):
        q.append(-sum(d[j] * q[k - j] for j in range(1, k + 1)))
    return [float((-1) ** k * q[k]) for k in range(1, K + 1)]


def aggregate_loss_moments(model: RiskModel, K: int) -> AggregateLossMoments:
    return model.aggregate_loss_moments(K)


def laplace_exponent(model: RiskModel, s):
    return model.laplace_exponent(s)


def ruin_transform(model: RiskModel, s):
    return model.ruin_transform(s)


def loss_transform(model: RiskModel, s):
    return model.loss_transform(s)


def _kappa_real(model: RiskModel, s: float) -> float:
    f = model.claims.laplace(s).real
    return model.lam * (f - 1.0) + model.c * s + model.sigma**2 * s * s / 2


def adjustment_coefficient(model: RiskModel, eps: float = 1e-8, max_iter: int = 200) -> float:
    """Largest negative root ``-gamma`` of ``kappa``; returns ``gamma > 0``.

    ``kappa(-g)`` is convex in ``g``, negative just left of zero and blows up
    (for rational or gamma claims) at the continuation boundary ``s_max``.
    The bracket is pushed toward the boundary by halving the remaining
    distance, then refined by bisection.
    """
    claims = model.claims
    if isinstance(claims, (MomentsOnly, Uniform)):
        raise NotSupported(f"adjustment coefficient not available for {type(claims).__name__} claims")
    s_max = claims.abscissa
    lo = eps * min(1.0, s_max)
    if _kappa_real(model, -lo) >= 0:
        raise NoRoot("kappa is not negative next to zero")
    hi = None
    step = lo
    for _ in range(200):
        cand = s_max - (s_max - step) / 2
        if cand >= s_max or s_max - cand <= 1e-15 * s_max:
            break
        if _kappa_real(model, -cand) > 0:
            hi = cand
            break
        lo = step = cand
    if hi is None:
        raise NoRoot("continuation boundary reached before kappa changed sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _kappa_real(model, -mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def ruin_derivatives_at_zero(model: RiskModel, f0: float, f1: float, f2: float) -> np.ndarray:
    """``Psi'(0), ..., Psi''''(0)`` for the unperturbed model.

    Obtained by differentiating the integro-differential equation
    ``c Psi' = lambda Psi - lambda (Psi * f) - lambda Fbar`` at zero;
    ``f0, f1, f2`` are the claim density and its first two derivatives at 0.
    """
    if model.sigma > 0:
        raise PerturbedNotSupported("derivatives at zero are only implemented for sigma = 0")
    a = model.lam / model.c
    d1 = -a * (1 - model.rho)
    d2 = -d1 * (f0 - a)
    d3 = -d1 * (f1 + 2 * a * f0 - a**2)
    d4 = -d1 * (f2 + 2 * a * f1 - a * f0**2 + 3 * a**2 * f0 - a**3)
    return np.array([d1, d2, d3, d4])
