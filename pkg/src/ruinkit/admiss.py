"""Admissibility checks: is an exponential mixture a genuine density?"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
from scipy import linalg, optimize

from .errors import InvalidSubgenerator, NotApplicable
from .ratlap import ExpPolyMixture

GRID_POINTS = 2000
HORIZON = 20.0


@dataclass(frozen=True)
class PhaseType:
    """Phase-type law ``PH(alpha, A)`` with density ``alpha exp(Ax) (-A 1)``."""

    alpha: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        A = np.asarray(self.A, dtype=float)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "A", A)
        n = len(alpha)
        if A.shape != (n, n):
            raise InvalidSubgenerator(f"A must be {n}x{n}, got {A.shape}")
        off = A - np.diag(np.diag(A))
        if np.any(off < 0):
            raise InvalidSubgenerator("off-diagonal entries must be nonnegative")
        if np.any(A.sum(axis=1) > 1e-12):
            raise InvalidSubgenerator("row sums must be nonpositive")
        if np.any(alpha < 0) or alpha.sum() > 1 + 1e-12:
            raise InvalidSubgenerator("alpha must be a sub-probability vector")

    @property
    def exit_rates(self) -> np.ndarray:
        return -self.A.sum(axis=1)


def ph_density(ph: PhaseType, x):
    """Density ``alpha exp(A x) (-A 1)`` via scaling-and-squaring ``expm``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0):
        raise ValueError("x must be nonnegative")
    out = np.array([ph.alpha @ linalg.expm(ph.A * xi) @ ph.exit_rates for xi in xs])
    return out if np.ndim(x) else float(out[0])


def three_exp_criterion(w) -> bool:
    """Nonnegativity test for ``w1 e^-x + w2 e^-2x + w3 e^-3x``.

    With ``y = e^-x`` the function is ``y (w1 + w2 y + w3 y^2)``, which is
    nonnegative whenever ``-w2 <= 2 sqrt(w1 w3)``.  Requires ``w1 > 0`` and
    ``w3 > 0``.
    """
    w1, w2, w3 = (float(v) for v in w)
    if w1 <= 0 or w3 <= 0:
        raise NotApplicable("criterion needs w1 > 0 and w3 > 0")
    return -w2 <= 2 * sqrt(w1 * w3)


@dataclass(frozen=True)
class AdmissibilityReport:
    density_nonneg: bool
    survival_monotone: bool
    min_density: float
    argmin: float


def numeric_admissibility(mix: ExpPolyMixture) -> AdmissibilityReport:
    """Sample the density on a geometric grid and refine the worst dip.

    The grid covers ``[0, 20 / min Re(rate)]``; beyond it the slowest-decaying
    term dominates, so the sign of its coefficient is checked directly.
    """
    if len(mix) == 0:
        return AdmissibilityReport(True, True, 0.0, 0.0)
    rmin = float(np.min(mix.rates.real))
    H = HORIZON / rmin
    grid = np.concatenate([[0.0], np.geomspace(H * 1e-8, H, GRID_POINTS - 1)])
    f = mix.density(grid)
    peak = float(np.max(np.abs(f)))
    i = int(np.argmin(f))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    fmin, xmin = float(f[i]), float(grid[i])
    if hi > lo:
        res = optimize.minimize_scalar(
            lambda t: float(mix.density(t)), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12 * max(hi, 1e-300)},
        )
        if res.fun < fmin:
            fmin, xmin = float(res.fun), float(res.x)
    tol = -1e-10 * max(peak, 1e-300)
    tail_ok = _tail_sign_ok(mix)
    dens_ok = fmin >= tol and tail_ok

    S = mix.survival(grid)
    rises = np.diff(S)
    scale = max(float(np.max(np.abs(S))), 1e-300)
    mono_ok = bool(np.all(rises <= 1e-10 * scale)) and tail_ok
    return AdmissibilityReport(bool(dens_ok), mono_ok, fmin, xmin)


def _tail_sign_ok(mix: ExpPolyMixture) -> bool:
    # slowest real decay, highest power: its weight decides the far tail
    re = mix.rates.real
    slow = np.isclose(re, re.min(), rtol=1e-9, atol=0)
    if np.any(slow & (np.abs(mix.rates.imag) > 1e-12 * np.abs(mix.rates))):
        # oscillating dominant term: the density changes sign eventually
        # unless a real term of the same decay dominates it polynomially
        real_slow = slow & (np.abs(mix.rates.imag) <= 1e-12 * np.abs(mix.rates))
        if not np.any(real_slow):
            return False
        osc = slow & ~real_slow
        kmax_c = mix.powers[osc].max()
        kmax_r = mix.powers[real_slow].max()
        if kmax_r < kmax_c:
            return False
        if kmax_r == kmax_c:
            # same order: the real weight must cover the summed amplitudes
            lead = mix.weights[real_slow & (mix.powers == kmax_r)].real.sum()
            amp = np.abs(mix.weights[osc & (mix.powers == kmax_c)]).sum()
            return bool(lead >= amp)
        slow = real_slow
    k = mix.powers[slow].max()
    lead = mix.weights[slow & (mix.powers == k)].real.sum()
    return lead >= 0
