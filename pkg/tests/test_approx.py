import numpy as np
import numpy.polynomial.polynomial as P
import pytest

from ruinkit.approx import (
    METHODS,
    _perturbed,
    approximate,
    devylder,
    jt_beekman,
    jt_ramsay,
    law_from_psi,
    perturbed_1m,
    perturbed_2m,
    ramsay_pade12,
    renyi,
    two_point_ramsay,
)
from ruinkit.errors import NotPerturbed, PerturbedNotSupported
from ruinkit.jtfit import jt_index_3
from ruinkit.oracle import exact_ruin_rational, talbot_ruin
from ruinkit.ratlap import ExpPolyMixture

from conftest import (
    exp_model,
    exp_psi,
    exp_psi_perturbed,
    gamma1_model,
    gamma2_model,
    mixexp_model,
    random_models,
)
from reference_tables import GAMMA1_RUIN, GAMMA2_RUIN, MIXEXP_PSI

UNPERTURBED = ("renyi", "devylder", "ramsay", "two_point", "jt_ramsay", "jt_beekman")
PERTURBED = ("perturbed_2m", "perturbed_1m")
EXP_CASES = [(1.0, 1.0, 1.1), (2.0, 0.5, 0.4), (0.3, 3.0, 12.0)]


def mixexp_psi(x):
    x = np.asarray(x, dtype=float)
    return sum(w * np.exp(-r * x) for w, r in MIXEXP_PSI)


class TestTableEntries:
    @pytest.mark.parametrize(
        "fn, x, value",
        [(renyi, 300.0, 0.529743), (devylder, 0.0, 0.882867), (ramsay_pade12, 300.0, 0.521107),
         (two_point_ramsay, 300.0, 0.522526)],
        ids=["renyi", "devylder", "ramsay", "two_point"],
    )
    def test_gamma1(self, fn, x, value):
        assert fn(gamma1_model())(x) == pytest.approx(value, rel=5e-6)

    @pytest.mark.parametrize(
        "fn, x, value",
        [(renyi, 5.0, 0.0331929), (devylder, 2.0, 0.117834), (ramsay_pade12, 3.0, 0.0778418),
         (two_point_ramsay, 0.5, 0.228126)],
        ids=["renyi", "devylder", "ramsay", "two_point"],
    )
    def test_gamma2(self, fn, x, value):
        assert fn(gamma2_model())(x) == pytest.approx(value, rel=5e-6)

    @pytest.mark.parametrize("col, name", list(enumerate(["renyi", "devylder", "ramsay", "two_point"], start=2)))
    @pytest.mark.parametrize("table, model", [(GAMMA1_RUIN, gamma1_model), (GAMMA2_RUIN, gamma2_model)],
                             ids=["gamma1", "gamma2"])
    def test_columns(self, table, model, col, name):
        got = approximate(model(), name)(table[:, 0])
        assert got == pytest.approx(table[:, col], rel=5e-6)


class TestExactness:
    @pytest.mark.parametrize("case", EXP_CASES)
    @pytest.mark.parametrize("method", UNPERTURBED)
    def test_unperturbed(self, method, case):
        m = exp_model(*case)
        x = np.linspace(0, 30 / (case[0] - case[1] / case[2]), 100)
        assert np.max(np.abs(approximate(m, method)(x) - exp_psi(m, x))) <= 1e-10

    @pytest.mark.parametrize("sigma", [0.3, 1.0, 3.0])
    @pytest.mark.parametrize("case", EXP_CASES)
    @pytest.mark.parametrize("method", PERTURBED)
    def test_perturbed(self, method, case, sigma):
        m = exp_model(*case, sigma=sigma)
        x = np.linspace(0, 30 / case[0], 100)
        a = approximate(m, method)
        assert np.max(np.abs(a(x) - exp_psi_perturbed(m, x))) <= 1e-10

    def test_perturbed_coefficients(self):
        m = exp_model(mu=2.0, lam=1.0, c=1.0, sigma=0.5)
        meta = perturbed_2m(m).meta
        assert meta["a_d"] == pytest.approx(2.0, rel=1e-14)
        assert meta["a_j"] == pytest.approx(2 * 1.0 * 0.5 / 0.25, rel=1e-14)
        assert perturbed_1m(m).meta["a_d"] == pytest.approx(2.0, rel=1e-14)


class TestShape:
    @pytest.mark.parametrize("method", UNPERTURBED)
    @pytest.mark.parametrize("model", [gamma1_model, gamma2_model, mixexp_model], ids=["g1", "g2", "mixexp"])
    def test_monotone_bounded(self, model, method):
        m = model()
        a = approximate(m, method)
        grid = np.concatenate([[0.0], np.geomspace(1e-4, 1e4, 999) * m.claims.mean])
        v = a(grid)
        assert np.all(v >= -1e-12) and np.all(v <= 1 + 1e-12)
        assert np.all(np.diff(v) <= 1e-12)
        assert v[-1] < 1e-3

    def test_monotone_uniform(self, uniform_model):
        for method in UNPERTURBED:
            v = approximate(uniform_model, method)(np.geomspace(1e-3, 1e3, 1000))
            assert np.all(np.diff(v) <= 1e-12) and v[0] <= 1

    @pytest.mark.parametrize("method", ["ramsay", "two_point"])
    def test_psi_at_zero_is_rho(self, method):
        for m in (gamma1_model(), gamma2_model(), mixexp_model()):
            assert approximate(m, method)(0.0) == pytest.approx(m.rho, rel=1e-12)

    def test_law_masses(self):
        for method in UNPERTURBED:
            law = approximate(gamma2_model(), method).survival
            assert law.mass() == pytest.approx(1.0, rel=1e-10)


class TestTwoPoint:
    @pytest.mark.parametrize("model", [gamma1_model, gamma2_model, mixexp_model], ids=["g1", "g2", "mixexp"])
    def test_infinity_constraints(self, model):
        m = model()
        r = two_point_ramsay(m).meta["transform"]
        d1 = -m.rho * (1 - m.rho) / m.m1
        # exact limits from the leading coefficients
        assert r.num[-1] == pytest.approx(m.rho, rel=1e-12)
        top = P.polysub(P.polymulx(r.num), m.rho * r.den)
        assert len(top) == 2 and top[-1] == pytest.approx(d1, rel=1e-12)
        # at a large finite s the expansion rho + Psi'(0)/s holds to rounding
        s = 1e8
        val = s * P.polyval(s, r.num) / P.polyval(s, r.den)
        assert abs(val - m.rho - d1 / s) <= 8 * np.finfo(float).eps * m.rho

    def test_slope_at_zero(self):
        m = gamma2_model()
        law = two_point_ramsay(m).survival
        # the density of L at 0 is -Psi'(0)
        assert law.density(0.0) == pytest.approx(m.rho * (1 - m.rho) / m.m1, rel=1e-10)

    def test_degenerate_falls_back(self):
        a = two_point_ramsay(exp_model())
        assert a.meta["degenerate"] is True and a.method == "two_point"


class TestPerturbed:
    def test_root_ordering_random(self, rng):
        for m in random_models(rng, 100, sigma=True):
            a = perturbed_2m(m)
            meta = a.meta
            assert meta["mu1"] < meta["a_d"] < meta["mu2"]
            assert a.psi_d(0.0) == pytest.approx(1.0, rel=1e-12)
            assert a.psi_j(0.0) == pytest.approx(0.0, abs=1e-12)
            grid = np.linspace(0, 30 / meta["mu1"], 1000)
            assert np.all(np.diff(a(grid)) <= 1e-12)

    def test_components_sum(self):
        a = perturbed_2m(mixexp_model(0.5))
        x = np.linspace(0, 10, 41)
        assert a(x) == pytest.approx(a.psi_d(x) + a.psi_j(x), rel=1e-12, abs=1e-15)
        assert a(0.0) == pytest.approx(1.0, rel=1e-12)

    def test_sigma_half_against_talbot(self):
        m = mixexp_model(0.5)
        x = np.linspace(0.5, 10, 20)
        ref = talbot_ruin(m, x)
        rel = np.abs(perturbed_2m(m)(x) - ref) / ref
        assert np.max(rel) <= 0.10

    def test_one_vs_two_moments(self):
        m = mixexp_model(2.0)
        x = np.linspace(0, 10, 201)
        assert np.max(np.abs(perturbed_1m(m)(x) - perturbed_2m(m)(x))) < 0.01

    def test_confluent_limit(self):
        m = exp_model(sigma=1.0)
        q = 2 * m.p / m.sigma**2
        a = _perturbed(m, q, 0.0, "perturbed_2m")
        assert a.meta["confluent"] is True
        assert a.meta["admissibility"].density_nonneg
        x = np.linspace(0, 10, 21)
        assert a(x) == pytest.approx(np.exp(-q * x), rel=1e-12)

    @pytest.mark.parametrize("fn", [perturbed_2m, perturbed_1m])
    def test_needs_sigma(self, fn):
        with pytest.raises(NotPerturbed):
            fn(mixexp_model())


class TestJohnsonTaaffe:
    @pytest.mark.parametrize("fn", [jt_ramsay, jt_beekman])
    def test_mixexp_sup_norm(self, fn):
        x = np.linspace(0, 10, 201)
        assert np.max(np.abs(fn(mixexp_model())(x) - mixexp_psi(x))) <= 2e-2

    def test_uniform_orders(self, uniform_model):
        # equilibrium index 4 is bumped to 5 because b_2 = 0 there
        assert jt_ramsay(uniform_model).meta["order"] == 5
        raw = uniform_model.aggregate_loss_moments(3).raw() / uniform_model.rho
        assert jt_beekman(uniform_model).meta["order"] == jt_index_3(raw) == 2

    def test_explicit_order(self, uniform_model):
        a = jt_ramsay(uniform_model, order=8)
        assert a.meta["order"] == 8
        assert a(0.0) == pytest.approx(uniform_model.rho, rel=1e-9)

    def test_beekman_atom(self):
        m = gamma2_model()
        a = jt_beekman(m)
        assert a.survival.atom0 == pytest.approx(1 - m.rho, rel=1e-14)
        assert a(0.0) == pytest.approx(m.rho, rel=1e-12)

    def test_beekman_matches_loss_moments(self):
        m = mixexp_model()
        a = jt_beekman(m)
        raw = m.aggregate_loss_moments(3).raw()
        assert m.rho * a.meta["fit"].moments() == pytest.approx(raw, rel=1e-10)
        assert a.survival.mass() == pytest.approx(1.0, rel=1e-12)


class TestErrors:
    @pytest.mark.parametrize("method", UNPERTURBED)
    def test_sigma_refused(self, method):
        with pytest.raises(PerturbedNotSupported):
            approximate(mixexp_model(0.5), method)

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="unknown method"):
            approximate(mixexp_model(), "tijms")

    def test_method_list(self):
        assert set(METHODS) == set(UNPERTURBED) | set(PERTURBED)


def test_law_from_psi():
    psi = ExpPolyMixture.from_terms([(0.5, 2.0, 0)])
    law = law_from_psi(psi)
    assert law.atom0 == pytest.approx(0.5)
    assert law.survival(0.3) == pytest.approx(psi.density(0.3))
    assert law.mass() == pytest.approx(1.0)


def test_exact_oracle_agrees_with_table_formula():
    law = exact_ruin_rational(mixexp_model())
    x = np.linspace(0, 10, 11)
    assert law.survival(x) == pytest.approx(mixexp_psi(x), rel=1e-12)
