"""Rational Laplace transforms and their exponential-polynomial inverses.

A :class:`RationalLT` is a ratio of two polynomials in the Laplace variable
``s`` stored with ascending coefficients and a monic denominator.  Inverting
one by partial fractions produces an :class:`ExpPolyMixture`, a finite sum of
terms ``w * x**k * exp(-r*x)`` plus an optional point mass at zero.

The Pade constructors work on Maclaurin coefficients ``c_0 + c_1 s + ...``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import numpy.polynomial.polynomial as P
from scipy import linalg

from .errors import (
    InconsistentConstraints,
    NumericalInconsistency,
    PoleAtZero,
    SingularSystem,
    UnstablePole,
)

PIVOT_TOL = 1e-12
CLUSTER_TOL = 1e-7
IMAG_TOL = 1e-10


def _trim(c):
    c = np.atleast_1d(np.asarray(c))
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        return c[:1] * 0
    return c[: nz[-1] + 1]


@dataclass(frozen=True, eq=False)
class RationalLT:
    """Ratio ``num(s) / den(s)`` with ascending coefficients.

    The denominator is normalised to be monic on construction, which makes
    two representations of the same function directly comparable.
    """

    num: np.ndarray
    den: np.ndarray

    def __post_init__(self):
        num = _trim(np.asarray(self.num, dtype=float))
        den = _trim(np.asarray(self.den, dtype=float))
        if not np.any(den):
            raise ValueError("denominator is identically zero")
        lead = den[-1]
        object.__setattr__(self, "num", num / lead)
        object.__setattr__(self, "den", den / lead)

    @property
    def deg_num(self) -> int:
        return 0 if not np.any(self.num) else len(self.num) - 1

    @property
    def deg_den(self) -> int:
        return len(self.den) - 1

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = P.polyval(s, self.num) / P.polyval(s, self.den)
        return out if out.ndim else complex(out)

    def poles(self) -> np.ndarray:
        return _companion_roots(self.den)

    def zeros(self) -> np.ndarray:
        return _companion_roots(self.num) if self.deg_num > 0 else np.array([])

    def series(self, N: int) -> np.ndarray:
        return series_of(self, N)

    def reduce(self, tol: float = 1e-9) -> "RationalLT":
        """Cancel numerator/denominator roots closer than ``tol`` (relative)."""
        zs = list(self.zeros())
        ps = list(self.poles())
        keep = []
        for p in ps:
            hit = None
            for i, z in enumerate(zs):
                if abs(z - p) <= tol * max(abs(p), abs(z), 1.0):
                    hit = i
                    break
            if hit is None:
                keep.append(p)
            else:
                zs.pop(hit)
        if len(keep) == len(ps):
            return self
        lead = self.num[-1]
        num = lead * P.polyfromroots(zs) if zs else np.array([lead])
        den = P.polyfromroots(keep) if keep else np.array([1.0])
        return RationalLT(np.real_if_close(num, tol=1e6).real, np.real_if_close(den, tol=1e6).real)

    def __repr__(self):
        return f"RationalLT(num={self.num.tolist()}, den={self.den.tolist()})"


def _companion_roots(c) -> np.ndarray:
    """Roots of the polynomial with ascending coefficients ``c``."""
    c = _trim(np.asarray(c))
    n = len(c) - 1
    if n < 1:
        return np.array([], dtype=complex)
    comp = np.zeros((n, n), dtype=c.dtype)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(comp).astype(complex)


def series_of(r: RationalLT, N: int) -> np.ndarray:
    """First ``N`` Maclaurin coefficients of ``r`` by long division."""
    b = r.den
    if b[0] == 0:
        raise PoleAtZero("denominator vanishes at s = 0")
    a = np.zeros(N)
    k = min(N, len(r.num))
    a[:k] = r.num[:k]
    c = np.zeros(N)
    for i in range(N):
        acc = a[i]
        for j in range(1, min(i, len(b) - 1) + 1):
            acc -= b[j] * c[i - j]
        c[i] = acc / b[0]
    return c


def _series_scale(c) -> float:
    # s -> tau * u brings the coefficients to comparable magnitude
    c = np.abs(np.asarray(c, dtype=float))
    nz = np.nonzero(c)[0]
    if len(nz) < 2:
        return 1.0
    i, j = nz[0], nz[-1]
    return float((c[i] / c[j]) ** (1.0 / (j - i)))


def _lu_solve(A, b):
    with warnings.catch_warnings():
        # a singular factor is reported below as SingularSystem
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(A, check_finite=True)
    scale = np.max(np.abs(A)) if A.size else 1.0
    if scale == 0 or np.min(np.abs(np.diag(lu))) < PIVOT_TOL * scale:
        raise SingularSystem("Pade system is singular (degenerate series data)")
    return linalg.lu_solve((lu, piv), b)


def pade(series, m: int, n: int) -> RationalLT:
    """Classic ``(m, n)`` Pade approximant of a power series at ``s = 0``.

    Parameters
    ----------
    series : array_like
        Coefficients ``c_0, c_1, ...``; at least ``m + n + 1`` are used.
    m, n : int
        Numerator and denominator degree bounds.

    Returns
    -------
    RationalLT
        ``P/Q`` whose expansion agrees with ``series`` through ``s**(m+n)``.

    Raises
    ------
    SingularSystem
        If the Toeplitz block for the denominator is singular.
    """
    if m < 0 or n < 0:
        raise ValueError("degrees must be nonnegative")
    c = np.asarray(series, dtype=float)
    if len(c) < m + n + 1:
        raise ValueError(f"need {m + n + 1} coefficients, got {len(c)}")
    c = c[: m + n + 1]
    tau = _series_scale(c)
    cs = c * tau ** np.arange(len(c))

    def coef(k):
        return cs[k] if k >= 0 else 0.0

    q = np.ones(n + 1)
    if n > 0:
        A = np.array([[coef(m + 1 + i - j) for j in range(1, n + 1)] for i in range(n)])
        rhs = -np.array([coef(m + 1 + i) for i in range(n)])
        q[1:] = _lu_solve(A, rhs)
    p = np.array([sum(q[j] * coef(k - j) for j in range(min(k, n) + 1)) for k in range(m + 1)])
    p = p / tau ** np.arange(m + 1)
    q = q / tau ** np.arange(n + 1)
    return RationalLT(p, q)


def two_point_pade(series0, k0: int, inf_values, m: int, n: int) -> RationalLT:
    """Rational ``(m, n)`` matching ``k0`` coefficients at 0 and some at infinity.

    ``inf_values`` are the leading coefficients ``e_0, e_1, ...`` of the
    expansion ``sum_j e_j s**(m - n - j)`` as ``s -> oo``.  For a ruin
    transform with ``m = n - 1`` these are ``(Psi(0), Psi'(0), ...)``.
    """
    e = np.asarray(inf_values, dtype=float)
    L = len(e)
    if k0 < 0 or k0 + L != m + n + 1:
        raise InconsistentConstraints(
            f"k0 + len(inf_values) = {k0 + L} but m + n + 1 = {m + n + 1}"
        )
    c = np.asarray(series0, dtype=float)
    if len(c) < k0:
        raise InconsistentConstraints(f"need {k0} series coefficients, got {len(c)}")
    c = c[:k0]
    tau = _series_scale(c) if k0 >= 2 else 1.0
    cs = c * tau ** np.arange(k0)
    es = e * tau ** (m - n - np.arange(L, dtype=float))

    nunk = m + n + 2
    rows = []
    for k in range(k0):
        row = np.zeros(nunk)
        row[k] = -1.0 if k <= m else 0.0
        for j in range(min(k, n) + 1):
            row[m + 1 + j] += cs[k - j]
        rows.append(row)
    for i in range(L):
        row = np.zeros(nunk)
        if m - i >= 0:
            row[m - i] = 1.0
        for l in range(min(i, n) + 1):
            row[m + 1 + n - l] -= es[i - l]
        rows.append(row)
    A = np.array(rows)
    norms = np.linalg.norm(A, axis=1)
    norms[norms == 0] = 1.0
    A = A / norms[:, None]
    _, sv, vh = np.linalg.svd(A)
    if len(sv) < m + n + 1 or sv[-1] < PIVOT_TOL * sv[0]:
        raise SingularSystem("two-point Pade system is rank deficient")
    z = vh[-1]
    p = z[: m + 1] / tau ** np.arange(m + 1)
    q = z[m + 1 :] / tau ** np.arange(n + 1)
    big = max(np.max(np.abs(p)), np.max(np.abs(q)))
    p[np.abs(p) < 1e-13 * big] = 0.0
    q[np.abs(q) < 1e-13 * big] = 0.0
    return RationalLT(p, q)


@dataclass(frozen=True, eq=False)
class ExpPolyMixture:
    """Finite sum ``sum_i w_i x**k_i exp(-r_i x)`` plus an atom at zero.

    Read as a (possibly defective or signed) law on ``[0, oo)``: the terms are
    the density of the continuous part and ``atom0`` is the mass at ``x = 0``.
    Complex rates and weights must come in conjugate pairs.
    """

    weights: np.ndarray
    rates: np.ndarray
    powers: np.ndarray
    atom0: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        r = np.atleast_1d(np.asarray(self.rates, dtype=complex))
        k = np.atleast_1d(np.asarray(self.powers, dtype=int))
        if not (w.shape == r.shape == k.shape):
            raise ValueError("weights, rates and powers must have equal length")
        if np.any(r.real <= 0):
            raise UnstablePole("all rates need a positive real part")
        if np.any(k < 0):
            raise ValueError("powers must be nonnegative")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rates", r)
        object.__setattr__(self, "powers", k)
        object.__setattr__(self, "atom0", float(self.atom0))

    @classmethod
    def from_terms(cls, terms, atom0: float = 0.0) -> "ExpPolyMixture":
        terms = list(terms)
        if not terms:
            return cls(np.zeros(0), np.zeros(0), np.zeros(0, dtype=int), atom0)
        w, r, k = zip(*terms)
        return cls(np.array(w), np.array(r), np.array(k), atom0)

    def __len__(self):
        return len(self.weights)

    def terms(self):
        return list(zip(self.weights, self.rates, self.powers))

    @staticmethod
    def _real(vals, mags, what):
        bad = np.abs(vals.imag) > IMAG_TOL * np.maximum(mags, 1e-300)
        bad &= np.abs(vals.imag) > 1e-300
        if np.any(bad):
            raise NumericalInconsistency(f"{what} has a non-negligible imaginary part")
        return vals.real

    def _eval(self, x, w, r, k, what):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("mixtures are evaluated on x >= 0")
        xs = x.reshape(-1, 1)
        with np.errstate(under="ignore", over="ignore", invalid="ignore"):
            t = w * xs**k * np.exp(-np.outer(x.ravel(), r))
        t = np.where(np.isfinite(t), t, 0.0)
        vals = self._real(t.sum(axis=1), np.abs(t).sum(axis=1), what)
        return vals.reshape(x.shape) if x.ndim else float(vals[0])

    def density(self, x):
        """Value of ``sum w x**k exp(-r x)`` (the atom is not included)."""
        return self._eval(x, self.weights, self.rates, self.powers, "density")

    __call__ = density

    def tail(self) -> "ExpPolyMixture":
        """Mixture representing ``x -> integral_x^oo density``."""
        key = "tail"
        if key not in self._cache:
            terms = []
            for w, r, k in self.terms():
                base = w * factorial(k) / r ** (k + 1)
                for j in range(k + 1):
                    terms.append((base * r**j / factorial(j), r, j))
            self._cache[key] = ExpPolyMixture.from_terms(_combine(terms))
        return self._cache[key]

    def survival(self, x):
        """Mass strictly above ``x``; the atom at zero never contributes."""
        return self.tail().density(x)

    def derivative(self) -> "ExpPolyMixture":
        terms = []
        for w, r, k in self.terms():
            terms.append((-w * r, r, k))
            if k > 0:
                terms.append((w * k, r, k - 1))
        return ExpPolyMixture.from_terms(_combine(terms))

    def scaled(self, a: float, atom0: float | None = None) -> "ExpPolyMixture":
        return ExpPolyMixture(
            self.weights * a, self.rates, self.powers, self.atom0 * a if atom0 is None else atom0
        )

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        ss = s.reshape(-1, 1)
        fact = np.array([factorial(int(k)) for k in self.powers], dtype=float)
        t = self.weights * fact / (ss + self.rates) ** (self.powers + 1)
        out = self.atom0 + t.sum(axis=1)
        return out.reshape(s.shape) if s.ndim else complex(out[0])

    def mass(self) -> float:
        """Total mass ``atom0 + integral of the density``."""
        fact = np.array([factorial(int(k)) for k in self.powers], dtype=float)
        tot = np.sum(self.weights * fact / self.rates ** (self.powers + 1))
        return self.atom0 + float(tot.real)

    def __repr__(self):
        return f"ExpPolyMixture({len(self)} terms, atom0={self.atom0:.6g})"


def _combine(terms, tol=1e-14):
    # merge terms sharing (rate, power)
    out = {}
    order = []
    for w, r, k in terms:
        key = (complex(r), int(k))
        if key in out:
            out[key] += w
        else:
            out[key] = w
            order.append(key)
    big = max((abs(v) for v in out.values()), default=0.0)
    return [(out[key], key[0], key[1]) for key in order if abs(out[key]) > tol * big or big == 0]


def _merge_radius(m, tol):
    # an m-fold root comes back from the eigensolver spread by a few eps**(1/m),
    # more when other roots are close
    return max(tol, 20.0 * np.finfo(float).eps ** (1.0 / m))


def _cluster(roots, tol):
    """Group nearly equal roots; returns ``(centre, multiplicity)`` pairs.

    Each root is grouped with its ``m - 1`` nearest neighbours for the largest
    ``m`` whose spread fits the radius expected for an ``m``-fold root.
    """
    left = [complex(z) for z in roots]
    out = []
    while left:
        z = left[0]
        order = np.argsort([abs(v - z) for v in left])
        take = [0]
        for m in range(len(left), 1, -1):
            pts = np.array([left[i] for i in order[:m]])
            c = pts.mean()
            if np.max(np.abs(pts - c)) <= _merge_radius(m, tol) * max(abs(c), 1e-300):
                take = list(order[:m])
                break
        group = [left[i] for i in take]
        left = [v for i, v in enumerate(left) if i not in set(take)]
        c = complex(np.mean(group))
        if len(group) > 1 and abs(c.imag) <= _merge_radius(len(group), tol) * abs(c):
            c = complex(c.real, 0.0)
        out.append((c, len(group)))
    return sorted(out, key=lambda t: (t[0].real, t[0].imag))


def _taylor_at(c, p, order):
    """Taylor coefficients of polynomial ``c`` at ``p`` up to ``order``."""
    out = []
    d = np.asarray(c, dtype=complex)
    for i in range(order + 1):
        out.append(P.polyval(p, d) / factorial(i) if len(d) else 0.0)
        d = P.polyder(d) if len(d) > 1 else np.zeros(1, dtype=complex)
    return np.array(out, dtype=complex)


def partial_fractions(r: RationalLT, cluster_tol: float = CLUSTER_TOL) -> ExpPolyMixture:
    """Invert a rational transform into an exponential-polynomial mixture.

    Poles come from the eigenvalues of the companion matrix of the
    denominator.  Groups of ``m`` poles within ``max(cluster_tol, 20 eps**(1/m))``
    (relative) are merged into one pole of multiplicity ``m``, producing
    ``x**k`` terms instead of large cancelling residues.  A constant part (equal degrees) becomes ``atom0``.
    """
    num = np.asarray(r.num, dtype=float)
    den = r.den
    n = r.deg_den
    if r.deg_num > n:
        raise ValueError("improper rational: numerator degree exceeds denominator degree")
    atom = 0.0
    if len(num) == n + 1:
        atom = num[n]
        num = (num - atom * den)[:n]
    if n == 0:
        return ExpPolyMixture.from_terms([], atom0=atom)

    roots = r.poles()
    scale = max(np.max(np.abs(roots)), 1e-300)
    roots = np.where(np.abs(roots.imag) <= 1e-12 * scale, roots.real + 0j, roots)
    clusters = _cluster(roots, cluster_tol)
    for p, _ in clusters:
        if p.real >= 0:
            raise UnstablePole(f"pole at {p} has nonnegative real part")

    terms = []
    for idx, (p, mult) in enumerate(clusters):
        others = [q for j, (q, mu) in enumerate(clusters) if j != idx for _ in range(mu)]
        rest = P.polyfromroots(others) if others else np.array([1.0 + 0j])
        a = _taylor_at(num, p, mult - 1)
        b = _taylor_at(rest, p, mult - 1)
        g = np.zeros(mult, dtype=complex)
        for i in range(mult):
            g[i] = (a[i] - sum(b[j] * g[i - j] for j in range(1, i + 1))) / b[0]
        for i in range(mult):
            j = mult - i
            w = g[i] / factorial(j - 1)
            if p.imag == 0:
                w = complex(w.real, 0.0)
            terms.append((w, -p, j - 1))
    return ExpPolyMixture.from_terms(_combine(terms), atom0=atom)


def mixture_eval(mix: ExpPolyMixture, x, kind: str = "density"):
    """Evaluate ``mix`` as a density or as its survival (tail mass above x)."""
    if kind == "density":
        return mix.density(x)
    if kind == "survival":
        return mix.survival(x)
    raise ValueError(f"unknown kind {kind!r}; expected 'density' or 'survival'")
