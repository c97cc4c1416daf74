"""Reference values for the ruin probability.

Three independent routes:

* exact inversion when the claim transform is rational,
* fixed-Talbot numerical inversion of ``Psi*``,
* Monte Carlo simulation of the ladder-height decomposition of ``L``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContourFailure
from .ratlap import ExpPolyMixture, RationalLT, partial_fractions
from .riskmodel import RiskModel

TALBOT_M = 24
MC_CHUNK = 250_000


def ruin_transform_rational(model: RiskModel) -> tuple[RationalLT, RationalLT]:
    """``(phi, Psi*)`` as rationals for claims with a rational transform.

    With ``f* = N/D`` the quotient ``G = (D - N)/s`` is formed by dropping the
    (zero) constant term, giving ``kappa(s)/s = (c D - lambda G + sigma^2 s D/2)/D``
    and ``phi = p D / K``.  ``Psi* = (K - p D)/(s K)`` is deflated the same way.
    """
    f = model.claims.rational_lt()
    D = np.asarray(f.den, dtype=float)
    N = np.zeros(len(D))
    N[: len(f.num)] = f.num
    G = (D - N)[1:]
    K = model.c * D
    K[: len(G)] -= model.lam * G
    if model.sigma > 0:
        K = np.concatenate([K, [0.0]])
        K[1:] += model.sigma**2 / 2 * D
    pD = np.zeros(len(K))
    pD[: len(D)] = model.p * D
    phi = RationalLT(pD, K)
    psi = RationalLT((K - pD)[1:], K)
    return phi, psi


def exact_ruin_rational(model: RiskModel) -> ExpPolyMixture:
    """Exact law of ``L`` (atom ``1 - rho`` when sigma = 0, none otherwise).

    ``.survival(x)`` of the result is ``Psi(x)`` and ``.tail()`` lists its
    exponential terms.
    """
    phi, _ = ruin_transform_rational(model)
    return partial_fractions(phi)


def _eval_transform(F, s):
    try:
        out = np.asarray(F(s), dtype=complex)
        if out.shape == s.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([complex(F(v)) for v in s])


def talbot_invert(F, t, M: int = TALBOT_M):
    """Fixed-Talbot inversion of the transform ``F`` at ``t > 0``.

    Nodes ``s_k = r theta_k (cot theta_k + i)``, ``theta_k = k pi / M``,
    ``r = 2M/(5t)``.  In double precision ``M`` around 20-30 is the sweet
    spot; larger values lose accuracy to cancellation.  Transforms with
    ``exp(-b s)`` factors (bounded claim sizes) converge slowly for ``t``
    near or below ``b`` and may overflow on the far left of the contour,
    which raises :class:`ContourFailure`.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    out = np.empty(len(ts))
    k = np.arange(1, M)
    th = k * np.pi / M
    cot = 1.0 / np.tan(th)
    sig = th + (th * cot - 1.0) * cot
    for i, tt in enumerate(ts):
        r = 2.0 * M / (5.0 * tt)
        s = r * th * (cot + 1j)
        vals = _eval_transform(F, np.concatenate([[r + 0j], s]))
        with np.errstate(over="ignore", invalid="ignore"):
            terms = np.exp(tt * s) * vals[1:] * (1 + 1j * sig)
            total = 0.5 * np.exp(r * tt) * vals[0].real + np.sum(terms.real)
        if not np.isfinite(total):
            raise ContourFailure(f"non-finite values on the Talbot contour at t = {tt}")
        out[i] = r / M * total
    return out if np.ndim(t) else float(out[0])


def talbot_ruin(model: RiskModel, x, M: int = TALBOT_M):
    """``Psi(x)`` by Talbot inversion of ``Psi*``; ``x = 0`` uses the known boundary value."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(len(xs))
    zero = xs == 0
    out[zero] = 1.0 if model.sigma > 0 else model.rho
    if np.any(~zero):
        out[~zero] = talbot_invert(model.ruin_transform, xs[~zero], M)
    return out if np.ndim(x) else float(out[0])


@dataclass(frozen=True)
class McEstimate:
    grid: np.ndarray
    psi_hat: np.ndarray
    half_width_95: np.ndarray
    n_samples: int
    seed: int

    def covers(self, values, k: float = 1.0) -> np.ndarray:
        return np.abs(np.asarray(values) - self.psi_hat) <= k * self.half_width_95


def _simulate_chunk(model: RiskModel, size: int, ss: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(ss)
    rho = model.rho
    N = rng.geometric(1.0 - rho, size) - 1
    total = int(N.sum())
    owner = np.repeat(np.arange(size), N)
    jumps = model.claims.sample_equilibrium(rng, total)
    if model.sigma > 0:
        a = 2 * model.c / model.sigma**2
        jumps = jumps + rng.exponential(1 / a, total)
        L = rng.exponential(1 / a, size)
    else:
        L = np.zeros(size)
    L += np.bincount(owner, weights=jumps, minlength=size)
    return L


def mc_aggregate_loss(
    model: RiskModel, grid, n: int, seed: int, workers: int = 1, chunk: int = MC_CHUNK
) -> McEstimate:
    """Monte Carlo estimate of ``Psi`` on ``grid`` from ``n`` draws of ``L``.

    ``L`` is a geometric(``rho``) sum of equilibrium draws; with sigma > 0 each
    ladder step and the initial segment add an exponential creep of rate
    ``2c/sigma^2``.  The sample is split into chunks with independent seed
    streams, so the result depends only on ``(n, seed, chunk)``, not on
    ``workers``.
    """
    grid = np.asarray(grid, dtype=float)
    sizes = [chunk] * (n // chunk) + ([n % chunk] if n % chunk else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def count(args):
        size, ss = args
        L = np.sort(_simulate_chunk(model, size, ss))
        return size - np.searchsorted(L, grid, side="right")

    jobs = list(zip(sizes, streams))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            counts = list(ex.map(count, jobs))
    else:
        counts = [count(j) for j in jobs]
    hits = np.sum(counts, axis=0)
    p = hits / n
    hw = 1.96 * np.sqrt(p * (1 - p) / n)
    return McEstimate(grid, p, hw, int(n), int(seed))
