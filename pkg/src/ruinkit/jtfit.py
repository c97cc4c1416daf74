"""Common-order Erlang mixture fitting by three-moment matching.

A mixture ``sum_i w_i Erlang(n, 1/x_i)`` has raw moments
``m_k = n_(k) sum_i w_i x_i**k`` with the rising factorial
``n_(k) = n (n+1) ... (n+k-1)``.  Dividing the targets by ``n_(k)`` (Erlang
reduction) turns the fit into a two-point moment problem for the stage means
``x_i``, solvable once the reduced moments are strictly Stieltjes feasible.
The smallest workable order is the JT index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from math import ceil, factorial, prod, sqrt

import numpy as np
import numpy.polynomial.polynomial as P

from .errors import InfeasibleMoments, NegativeWeight, OrderCap, SingularSystem
from .ratlap import ExpPolyMixture, RationalLT, _companion_roots, _lu_solve

ORDER_CAP = 100_000
REL_TOL = 1e-12


def rising(n: int, k: int) -> int:
    return prod(n + j for j in range(k))


@dataclass(frozen=True)
class ErlangMixtureFit:
    """Mixture of Erlang laws sharing the shape ``order``.

    ``components`` holds ``(weight, stage_mean)`` pairs; each component is an
    Erlang law with ``order`` stages of mean ``stage_mean`` each.
    """

    order: int
    components: tuple
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    @property
    def stage_means(self) -> np.ndarray:
        return np.array([x for _, x in self.components])

    def moments(self, K: int = 3) -> np.ndarray:
        w, x = self.weights, self.stage_means
        return np.array([rising(self.order, k) * np.sum(w * x**k) for k in range(1, K + 1)])

    def mixture(self) -> ExpPolyMixture:
        """Density as an exponential-polynomial mixture."""
        n = self.order
        terms = []
        for w, x in self.components:
            r = 1.0 / x
            terms.append((w * r**n / factorial(n - 1), r, n - 1))
        return ExpPolyMixture.from_terms(terms)

    def density(self, t):
        return self.mixture().density(t)

    def survival(self, t):
        return self.mixture().survival(t)

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        out = sum(w / (1 + x * s) ** self.order for w, x in self.components)
        return out if np.ndim(out) else complex(out)

    def rational_lt(self) -> RationalLT:
        """Transform as ``N/D`` with ``D = prod_i (1 + x_i s)**order``."""
        n = self.order
        facs = [P.polypow([1.0, x], n) for _, x in self.components]
        den = np.array([1.0])
        for f in facs:
            den = P.polymul(den, f)
        num = np.zeros(len(den))
        for i, (w, _) in enumerate(self.components):
            t = np.array([w])
            for j, f in enumerate(facs):
                if j != i:
                    t = P.polymul(t, f)
            num[: len(t)] += t
        return RationalLT(num, den)


def erlang_reduce(m, n: int) -> np.ndarray:
    """``mu_k = m_k / n_(k)``; for ``n = 1`` these are the factorially reduced moments."""
    if n < 1:
        raise ValueError("order must be >= 1")
    m = np.asarray(m, dtype=float)
    return np.array([mk / rising(n, k) for k, mk in enumerate(m, start=1)])


def _normalized(m):
    m1, m2, m3 = (Fraction(float(v)) for v in m[:3])
    if not m1 > 0:
        raise InfeasibleMoments("need m1 > 0")
    h2 = m2 / m1**2
    h3 = m3 / (m1 * m2)
    if not (h2 > 1 and h3 > h2):
        raise InfeasibleMoments(
            f"moments not Stieltjes feasible: m2/m1^2 = {float(h2):.6g}, "
            f"m3/(m1 m2) = {float(h3):.6g}"
        )
    return h2, h3


def _snap_ceil(v) -> int:
    r = round(v)
    if abs(v - r) <= 1e-9 * max(1, abs(v)):
        return int(r)
    return int(ceil(v))


def _snap_floor(v: float) -> int:
    r = round(v)
    if abs(v - r) <= 1e-9 * max(1.0, abs(v)):
        return int(r)
    return int(np.floor(v))


def jt_index_3(m) -> int:
    """Closed-form JT index for three moments.

    ``ceil(max(1/(h2 - 1), (2 h2 - h3)/(h3 - h2)))`` with ``h2 = m2/m1^2`` and
    ``h3 = m3/(m1 m2)``, evaluated exactly on the given floats.  Values within
    1e-9 of an integer are snapped to it before the ceiling, so boundary cases
    such as the uniform law are not pushed up by the rounding of the inputs.
    """
    h2, h3 = _normalized(m)
    v = max(1 / (h2 - 1), (2 * h2 - h3) / (h3 - h2))
    return max(1, _snap_ceil(v))


def _bcoeffs(mu):
    mu1, mu2, mu3 = mu[:3]
    return mu2 - mu1**2, mu3 - mu1 * mu2, mu3 * mu1 - mu2**2


def _dec(q: Fraction) -> Decimal:
    return Decimal(q.numerator) / Decimal(q.denominator)


def _try_order(m, n):
    # b0, b1, b2 cancel badly near the feasibility boundary, so they are formed
    # exactly from the input floats and the roots are taken to 50 digits
    mu = [Fraction(float(v)) / rising(n, k) for k, v in enumerate(m[:3], start=1)]
    mu1, mu2, mu3 = mu
    b0, b1, b2 = _bcoeffs(mu)
    disc = b1 * b1 - 4 * b0 * b2
    diag = {"b0": float(b0), "b1": float(b1), "b2": float(b2), "discriminant": float(disc)}
    t0, t1, t2 = REL_TOL * mu2, REL_TOL * mu3, REL_TOL * mu1 * mu3
    if abs(b0) <= t0 and abs(b1) <= t1 and abs(b2) <= t2:
        return ErlangMixtureFit(n, ((1.0, float(mu1)),), diag)
    if b0 > t0 and b2 > t2 and disc > 0:
        with localcontext() as ctx:
            ctx.prec = 50
            # stage means solve b0 x^2 - b1 x + b2 = 0; use the stable root pair
            q = (_dec(b1) + _dec(disc).sqrt()) / 2
            x2, x1 = q / _dec(b0), _dec(b2) / q
            w1 = (x2 - _dec(mu1)) / (x2 - x1)
            w2 = (_dec(mu1) - x1) / (x2 - x1)
        if w1 >= 0 and w2 >= 0 and x1 > 0:
            return ErlangMixtureFit(n, ((float(w1), float(x1)), (float(w2), float(x2))), diag)
    return None


def jt_fit3(m, order: int | None = None) -> ErlangMixtureFit:
    """Fit a common-order two-component Erlang mixture to ``m_1, m_2, m_3``.

    The search starts at ``order`` (or the JT index) and moves up until the
    reduced moments are strictly feasible: either a single atom (the targets
    are those of one Erlang law) or ``b0 > 0`` and ``b2 > 0``.  The closed-form
    index can sit exactly on the boundary ``b2 = 0``, in which case the next
    order is used.

    Raises
    ------
    InfeasibleMoments
        If the targets are not moments of a positive law.
    OrderCap
        If no order up to 1e5 works.
    """
    m = np.asarray(m, dtype=float)[:3]
    start = jt_index_3(m)
    n = start if order is None else max(int(order), 1)
    while n <= ORDER_CAP:
        fit = _try_order(m, n)
        if fit is not None:
            return fit
        n += 1
    raise OrderCap(f"no feasible Erlang order up to {ORDER_CAP}")


def _stieltjes_ok(mu_full, tol=REL_TOL) -> bool:
    mu = np.asarray(mu_full, dtype=float)
    # a single atom: mu_k = mu_1**k
    ratios = mu[1:] / mu[1] ** np.arange(1, len(mu))
    if np.all(np.abs(ratios - 1) <= 1e-10):
        return True
    K = len(mu) // 2  # number of support points allowed
    for shift in (0, 1):
        for size in range(1, K + 1):
            if shift == 0 and size == 1:
                continue
            if 2 * size - 2 + shift >= len(mu):
                continue
            H = np.array([[mu[i + l + shift] for l in range(size)] for i in range(size)])
            if np.linalg.det(H) / np.prod(np.diag(H)) <= tol:
                return False
    return True


def jt_index_degree(m, degree: int = 3) -> int:
    """Smallest Erlang order whose reduced moments form a Stieltjes sequence.

    Uses Hankel-determinant positivity of ``(1, mu_1, ..., mu_degree)``;
    feasibility is monotone in the order, so the search doubles and then
    bisects.
    """
    if degree not in (3, 5):
        raise ValueError("degree must be 3 or 5")
    m = np.asarray(m, dtype=float)
    if len(m) < degree:
        raise ValueError(f"need {degree} moments")
    m = m[:degree]
    _normalized(m)

    def ok(n):
        return _stieltjes_ok(np.concatenate([[1.0], erlang_reduce(m, n)]))

    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        lo = hi
        if hi >= ORDER_CAP:
            raise OrderCap(f"no feasible order up to {ORDER_CAP}")
        hi = min(2 * hi, ORDER_CAP)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def hankel_feasible_exact(m, n: int) -> bool:
    """Exact rational version of the Hankel test at order ``n`` (for cross-checks)."""
    mu = [Fraction(1)] + [Fraction(v) / rising(n, k) for k, v in enumerate(m, start=1)]
    if all(mu[k] == mu[1] ** k for k in range(len(mu))):
        return True
    K = len(mu) // 2
    for shift in (0, 1):
        for size in range(1, K + 1):
            if shift == 0 and size == 1:
                continue
            if 2 * size - 2 + shift >= len(mu):
                continue
            H = [[mu[i + l + shift] for l in range(size)] for i in range(size)]
            if _fdet(H) <= 0:
                return False
    return True


def _fdet(H):
    H = [row[:] for row in H]
    n = len(H)
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if H[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            H[i], H[piv] = H[piv], H[i]
            det = -det
        det *= H[i][i]
        for r in range(i + 1, n):
            f = H[r][i] / H[i][i]
            for c in range(i, n):
                H[r][c] -= f * H[i][c]
    return det


def prony_fit(mu, K: int):
    """``K``-point positive measure with moments ``1, mu_1, ..., mu_{2K-1}``.

    Returns a list of ``(weight, location)`` sorted by location.
    """
    mu = np.concatenate([[1.0], np.asarray(mu, dtype=float)[: 2 * K - 1]])
    if len(mu) < 2 * K:
        raise ValueError(f"need {2 * K - 1} moments")
    if K == 1:
        return [(1.0, float(mu[1]))]
    H = np.array([[mu[i + j] for j in range(K)] for i in range(K)])
    rhs = -np.array([mu[K + i] for i in range(K)])
    c = _lu_solve(H, rhs)
    roots = _companion_roots(np.concatenate([c, [1.0]]))
    if np.any(np.abs(roots.imag) > 1e-9 * np.abs(roots)):
        raise SingularSystem("support points are not real")
    x = np.sort(roots.real)
    V = np.vander(x, K, increasing=True).T
    w = np.linalg.solve(V, mu[:K])
    if np.any(w <= 0) or np.any(x <= 0):
        raise NegativeWeight("moments lie on the boundary of the feasible set")
    return [(float(wi), float(xi)) for wi, xi in zip(w, x)]


@dataclass(frozen=True)
class IndexReport:
    """JT indices for Ramsay-type (equilibrium) vs Beekman-Bowers-type (L) fits.

    ``partial_J_aggregate`` and ``nu_L`` use the closed form
    ``l3hat = 3 + x (1 + theta m3hat) / (2 + x)`` with ``x = theta m2hat``, on
    which the case analysis (``case_a`` threshold, ``case_b_thresholds``)
    is built.  The normalised third moment of the actual aggregate loss is
    ``3 + x (3 + theta m3hat) / (2 + x)``; the ``*_moments`` fields carry the
    index computed from it.
    """

    jt3_claims: int | None
    jt3_equilibrium: int
    partial_J_aggregate: float
    nu_L: float
    nu_Li: float
    J_Li: float
    l2hat: float
    l3hat: float
    m2hat_eq: float
    m3hat_eq: float
    case_a_threshold: float
    case_a_holds: bool
    case_b_n: int | None
    case_b_thresholds: tuple | None
    case_b_holds: bool | None
    case_c_bound: float
    partial_J_aggregate_moments: float
    nu_L_moments: float
    verdict: str = ""


def partial_j(theta, m2hat, m3hat, exact_moments=False):
    """``(J(L), nu(L), l2hat, l3hat)`` from equilibrium normalised moments."""
    x = theta * m2hat
    l2 = 2 + x
    l3 = 3 + x * ((3 if exact_moments else 1) + theta * m3hat) / (2 + x)
    return (2 * l2 - l3) / (l3 - l2), l3 / l2, l2, l3


def compare_indices(model) -> IndexReport:
    """Compare the JT index of the equilibrium law with the partial index of ``L``."""
    from .errors import PerturbedNotSupported

    if model.sigma > 0:
        raise PerturbedNotSupported("index comparison assumes sigma = 0")
    mt = model.claims.equilibrium_moments(3)
    theta = model.theta
    m2h = mt[1] / mt[0] ** 2
    m3h = mt[2] / (mt[0] * mt[1])
    J, nu, l2, l3 = partial_j(theta, m2h, m3h)
    Jm, num, _, _ = partial_j(theta, m2h, m3h, exact_moments=True)
    nu_i = m3h / m2h
    J_i = (2 * m2h - m3h) / (m3h - m2h)
    thr_a = (1.5 - nu_i) / (nu_i - 1)
    a_holds = theta * m2h < thr_a

    n_b = thr_b = b_holds = None
    if nu_i > 1:
        # unique n >= 2 with (n+2)/(n+1) <= nu_i <= (n+1)/n
        n = _snap_floor(1.0 / (nu_i - 1))
        if n >= 2:
            a = nu_i
            rad = n * n + n - a * (n * n - 1)
            denom = (n + 1) * a - (n + 2)
            if rad >= 0:
                # roots of denom x^2 - 4x + 2(n-1); product form for the small one
                sq = sqrt(2 * rad)
                x1 = 2 * (n - 1) / (2 + sq)
                x2 = (2 + sq) / denom if denom > 0 else float("inf")
                n_b, thr_b = n, (x1, x2)
                b_holds = bool(x1 < theta * m2h < x2)
    bound_c = m3h / (m3h - m2h)
    try:
        jt_claims = jt_index_3(model.claims.moments(3))
    except InfeasibleMoments:
        jt_claims = None
    jt_eq = jt_index_3(mt)

    if a_holds:
        verdict = "a: partial index of L is below the equilibrium index"
    elif b_holds:
        verdict = f"b: order-{n_b} Erlang mixture fits only the equilibrium law"
    else:
        verdict = f"c: an Erlang mixture of order >= {bound_c:.6g} fits L for any loading"
    return IndexReport(
        jt3_claims=jt_claims,
        jt3_equilibrium=jt_eq,
        partial_J_aggregate=J,
        nu_L=nu,
        nu_Li=nu_i,
        J_Li=J_i,
        l2hat=l2,
        l3hat=l3,
        m2hat_eq=m2h,
        m3hat_eq=m3h,
        case_a_threshold=thr_a,
        case_a_holds=bool(a_holds),
        case_b_n=n_b,
        case_b_thresholds=thr_b,
        case_b_holds=b_holds,
        case_c_bound=bound_c,
        partial_J_aggregate_moments=Jm,
        nu_L_moments=num,
        verdict=verdict,
    )
