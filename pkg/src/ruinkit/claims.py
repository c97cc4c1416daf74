"""Parametric claim-size distributions.

Each distribution exposes exact raw moments, its Laplace transform
``f*(s) = E[exp(-s Z)]``, the transform of the survival function, the moments
of the equilibrium (stationary excess) law with density ``F-bar(x) / m_1``,
and a sampler for that equilibrium law.  Rational-transform families also
return their transform as a :class:`~ruinkit.ratlap.RationalLT`.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial, prod

import numpy as np
import numpy.polynomial.polynomial as P
from scipy import stats

from .errors import (
    DomainError,
    MomentUnavailable,
    NotRational,
    SamplerUnavailable,
    TransformUnavailable,
)
from .ratlap import RationalLT

SMALL_S = 1e-8


def _as_complex(s):
    arr = np.asarray(s, dtype=complex)
    return arr, arr.ndim == 0


def _out(val, scalar):
    return complex(val) if scalar else val


class ClaimDistribution:
    """Common interface of the claim families below."""

    #: f* is analytic for Re(s) > -abscissa (``inf`` for entire transforms)
    abscissa: float = np.inf

    def raw_moment(self, k: int) -> float:
        raise NotImplementedError

    def moments(self, K: int) -> np.ndarray:
        return np.array([self.raw_moment(k) for k in range(1, K + 1)])

    @property
    def mean(self) -> float:
        return self.raw_moment(1)

    def _laplace(self, s):
        raise TransformUnavailable(f"{type(self).__name__} has no Laplace transform")

    def laplace(self, s):
        """Laplace transform ``E[exp(-s Z)]`` at real or complex ``s``."""
        arr, scalar = _as_complex(s)
        return _out(self._laplace(arr), scalar)

    def survival_laplace(self, s):
        """Transform of ``F-bar``, i.e. ``(1 - f*(s)) / s`` with the s = 0 gap filled."""
        arr, scalar = _as_complex(s)
        small = np.abs(arr) < SMALL_S
        safe = np.where(small, 1.0, arr)
        out = (1.0 - self._laplace(safe)) / safe
        if np.any(small):
            m1, m2, m3 = self.moments(3)
            out = np.where(small, m1 - m2 * arr / 2 + m3 * arr**2 / 6, out)
        return _out(out, scalar)

    def equilibrium_moments(self, K: int) -> np.ndarray:
        """Moments ``m_{k+1} / ((k+1) m_1)`` of the equilibrium law, k = 1..K."""
        m = self.moments(K + 1)
        if m[0] <= 0:
            raise MomentUnavailable("equilibrium law needs m_1 > 0")
        return np.array([m[k] / ((k + 1) * m[0]) for k in range(1, K + 1)])

    def rational_lt(self) -> RationalLT:
        raise NotRational(f"{type(self).__name__} has no rational Laplace transform")

    def density(self, x):
        raise NotImplementedError

    def sample_equilibrium(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draws from the equilibrium law as ``U * Zhat``, Zhat size-biased."""
        u = rng.random(size)
        return u * self._sample_size_biased(rng, size)

    def _sample_size_biased(self, rng, size):
        raise SamplerUnavailable(f"no equilibrium sampler for {type(self).__name__}")


@dataclass(frozen=True)
class Exponential(ClaimDistribution):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    @property
    def abscissa(self):
        return self.rate

    def raw_moment(self, k):
        return factorial(k) / self.rate**k

    def _laplace(self, s):
        if np.any(s == -self.rate):
            raise DomainError("s is a pole of the exponential transform")
        return self.rate / (self.rate + s)

    def rational_lt(self):
        return RationalLT([self.rate], [self.rate, 1.0])

    def equilibrium_moments(self, K):
        # the equilibrium law of an exponential is the same exponential
        return self.moments(K)

    def density(self, x):
        return stats.expon.pdf(x, scale=1 / self.rate)

    def _sample_size_biased(self, rng, size):
        return rng.gamma(2.0, 1 / self.rate, size)


@dataclass(frozen=True)
class HyperExponential(ClaimDistribution):
    weights: tuple
    rates: tuple

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        r = tuple(float(v) for v in self.rates)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rates", r)
        if len(w) != len(r) or not w:
            raise ValueError("weights and rates must be nonempty and of equal length")
        if min(w) < 0 or abs(sum(w) - 1) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        if min(r) <= 0:
            raise ValueError("rates must be positive")
        if len(set(r)) != len(r):
            raise ValueError("rates must be distinct; model repeated rates as Erlang components")

    @property
    def abscissa(self):
        return min(self.rates)

    def raw_moment(self, k):
        return factorial(k) * sum(w / r**k for w, r in zip(self.weights, self.rates))

    def _laplace(self, s):
        if np.any(np.isin(s, -np.asarray(self.rates))):
            raise DomainError("s is a pole of the hyperexponential transform")
        return sum(w * r / (r + s) for w, r in zip(self.weights, self.rates))

    def rational_lt(self):
        roots = [-r for r in self.rates]
        den = P.polyfromroots(roots)
        num = np.zeros(len(roots))
        for i, (w, r) in enumerate(zip(self.weights, self.rates)):
            others = roots[:i] + roots[i + 1 :]
            term = w * r * (P.polyfromroots(others) if others else np.array([1.0]))
            num[: len(term)] += term
        return RationalLT(num, den)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return sum(w * r * np.exp(-r * x) for w, r in zip(self.weights, self.rates))

    def _sample_size_biased(self, rng, size):
        w = np.array(self.weights) / np.array(self.rates)
        idx = rng.choice(len(w), size=size, p=w / w.sum())
        return rng.gamma(2.0, 1 / np.asarray(self.rates)[idx])


@dataclass(frozen=True)
class Gamma(ClaimDistribution):
    """Gamma law with shape ``alpha`` and scale ``beta`` (mean alpha*beta)."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("shape and scale must be positive")

    @property
    def abscissa(self):
        return 1.0 / self.scale

    def raw_moment(self, k):
        return self.scale**k * prod(self.shape + j for j in range(k))

    def _laplace(self, s):
        on_cut = (s.imag == 0) & (s.real <= -1.0 / self.scale)
        if np.any(on_cut):
            raise DomainError("gamma transform is not defined for real s <= -1/scale")
        return (1.0 + self.scale * s) ** (-self.shape)

    def density(self, x):
        return stats.gamma.pdf(x, self.shape, scale=self.scale)

    def _sample_size_biased(self, rng, size):
        return rng.gamma(self.shape + 1.0, self.scale, size)


@dataclass(frozen=True)
class Uniform(ClaimDistribution):
    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a < self.b):
            raise ValueError("need 0 <= a < b")

    def raw_moment(self, k):
        return (self.b ** (k + 1) - self.a ** (k + 1)) / ((k + 1) * (self.b - self.a))

    def _laplace(self, s):
        small = np.abs(s) * self.b < 1e-4
        safe = np.where(small, 1.0, s)
        out = (np.exp(-self.a * safe) - np.exp(-self.b * safe)) / (safe * (self.b - self.a))
        if np.any(small):
            m1, m2, m3 = self.moments(3)
            out = np.where(small, 1 - m1 * s + m2 * s**2 / 2 - m3 * s**3 / 6, out)
        return out

    def density(self, x):
        return stats.uniform.pdf(x, loc=self.a, scale=self.b - self.a)

    def _sample_size_biased(self, rng, size):
        u = rng.random(size)
        return np.sqrt(self.a**2 + u * (self.b**2 - self.a**2))


@dataclass(frozen=True)
class Erlang(ClaimDistribution):
    shape: int
    rate: float

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError("Erlang shape must be a positive integer")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        object.__setattr__(self, "shape", int(self.shape))

    @property
    def abscissa(self):
        return self.rate

    def raw_moment(self, k):
        return prod(self.shape + j for j in range(k)) / self.rate**k

    def _laplace(self, s):
        if np.any(s == -self.rate):
            raise DomainError("s is a pole of the Erlang transform")
        return (self.rate / (self.rate + s)) ** self.shape

    def rational_lt(self):
        return RationalLT([self.rate**self.shape], P.polyfromroots([-self.rate] * self.shape))

    def density(self, x):
        return stats.gamma.pdf(x, self.shape, scale=1 / self.rate)

    def _sample_size_biased(self, rng, size):
        return rng.gamma(self.shape + 1.0, 1 / self.rate, size)


@dataclass(frozen=True)
class MomentsOnly(ClaimDistribution):
    """Claims known only through raw moments ``m_1, m_2, ...``."""

    m: tuple

    def __post_init__(self):
        m = tuple(float(v) for v in self.m)
        object.__setattr__(self, "m", m)
        if not m or m[0] <= 0:
            raise ValueError("moment vector needs m_1 > 0")

    abscissa = None

    def raw_moment(self, k):
        if k < 1:
            raise ValueError("k must be >= 1")
        if k > len(self.m):
            raise MomentUnavailable(f"moment m_{k} not supplied (have {len(self.m)})")
        return self.m[k - 1]


def raw_moment(dist: ClaimDistribution, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return dist.raw_moment(k)


def laplace(dist: ClaimDistribution, s):
    return dist.laplace(s)


def survival_laplace(dist: ClaimDistribution, s):
    return dist.survival_laplace(s)


def equilibrium_moments(dist: ClaimDistribution, K: int) -> np.ndarray:
    return dist.equilibrium_moments(K)


def rational_lt(dist: ClaimDistribution) -> RationalLT:
    return dist.rational_lt()


def _floats(v):
    if isinstance(v, str):
        v = [x for x in v.replace(",", " ").split()]
    return [float(x) for x in v]


def claim_from_record(rec: dict) -> ClaimDistribution:
    """Build a claim model from a tagged record such as
    ``{"type": "gamma", "alpha": 0.01, "beta": 100}``."""
    rec = {k.lower(): v for k, v in rec.items()}
    kind = str(rec.get("type", "")).lower()
    try:
        if kind in ("exponential", "exp"):
            return Exponential(float(rec["rate"]))
        if kind in ("hyperexponential", "hyperexp", "mixed_exponential"):
            return HyperExponential(tuple(_floats(rec["weights"])), tuple(_floats(rec["rates"])))
        if kind == "gamma":
            return Gamma(float(rec["alpha"]), float(rec["beta"]))
        if kind == "uniform":
            return Uniform(float(rec.get("a", 0.0)), float(rec["b"]))
        if kind == "erlang":
            return Erlang(int(float(rec["shape"])), float(rec["rate"]))
        if kind in ("moments", "moments_only"):
            return MomentsOnly(tuple(_floats(rec["moments"])))
    except KeyError as exc:
        raise ValueError(f"claim type {kind!r} is missing field {exc.args[0]!r}") from None
    raise ValueError(f"unknown claim type {kind!r}")
