import numpy as np
import pytest
from scipy.integrate import quad

from ruinkit.admiss import PhaseType, numeric_admissibility, ph_density, three_exp_criterion
from ruinkit.errors import InvalidSubgenerator, NotApplicable
from ruinkit.ratlap import ExpPolyMixture

HARRIS_A = np.array([[-1.0, 1, 0, 0], [0, -2, 2, 0], [0, 0, -3, 3], [0, 0, 0, -4]])
HARRIS_ALPHA = np.array([0.5, 0, 0, 0.5])
HARRIS = ExpPolyMixture.from_terms([(2.0, 1.0, 0), (-6.0, 2.0, 0), (6.0, 3.0, 0)])


def three_exp_density(w):
    # survival sum_i w_i e^{-i x} differentiated: density sum_i i w_i e^{-i x}
    return ExpPolyMixture.from_terms([(i * wi, float(i), 0) for i, wi in enumerate(w, start=1)])


class TestThreeExp:
    @pytest.mark.parametrize("w, ok", [((2, -3, 2), True), ((1, -3, 1), False), ((1, 0, 1), True),
                                       ((1, -2, 1), True), ((4, -8.01, 4), False)])
    def test_examples(self, w, ok):
        assert three_exp_criterion(w) is ok

    @pytest.mark.parametrize("w", [(0, 1, 1), (1, 1, 0), (-1, 3, 1)])
    def test_not_applicable(self, w):
        with pytest.raises(NotApplicable):
            three_exp_criterion(w)

    def test_implies_numeric_nonnegativity(self, rng):
        accepted = 0
        while accepted < 200:
            w1, w3 = rng.uniform(0.1, 5, 2)
            w2 = -rng.uniform(0, 2 * np.sqrt(w1 * w3))
            w = (w1, w2, w3)
            assert three_exp_criterion(w)
            rep = numeric_admissibility(ExpPolyMixture.from_terms(
                [(wi, float(i), 0) for i, wi in enumerate(w, start=1)]))
            assert rep.density_nonneg
            accepted += 1

    def test_boundary_is_tight(self):
        # on the boundary -w2 = 2 sqrt(w1 w3) the combination touches zero
        w1, w3 = 1.0, 4.0
        g = ExpPolyMixture.from_terms([(w1, 1.0, 0), (-2 * np.sqrt(w1 * w3), 2.0, 0), (w3, 3.0, 0)])
        x = -np.log(np.sqrt(w1 / w3))
        assert g.density(x) == pytest.approx(0.0, abs=1e-15)


class TestNumeric:
    def test_harris(self):
        rep = numeric_admissibility(HARRIS)
        assert rep.density_nonneg and rep.survival_monotone
        assert rep.min_density >= 0

    def test_negative_near_zero(self):
        mix = ExpPolyMixture.from_terms([(1.0, 1.0, 0), (-2.4, 2.0, 0)])
        rep = numeric_admissibility(mix)
        assert not rep.density_nonneg
        assert rep.min_density == pytest.approx(-1.4)
        assert rep.argmin == 0.0

    def test_interior_dip_found(self):
        # y (0.3 - 1.1 y + y^2) with y = e^{-x} is negative for y in (0.5, 0.6)
        mix = ExpPolyMixture.from_terms([(0.3, 1.0, 0), (-1.1, 2.0, 0), (1.0, 3.0, 0)])
        rep = numeric_admissibility(mix)
        assert not rep.density_nonneg
        ystar = (2.2 + np.sqrt(2.2**2 - 3.6)) / 6
        assert rep.argmin == pytest.approx(-np.log(ystar), rel=1e-6)
        assert rep.min_density == pytest.approx(ystar * (0.3 - 1.1 * ystar + ystar**2), rel=1e-9)

    def test_single_term(self):
        rep = numeric_admissibility(ExpPolyMixture.from_terms([(0.3, 2.0, 0)]))
        assert rep.density_nonneg and rep.survival_monotone

    def test_negative_tail(self):
        mix = ExpPolyMixture.from_terms([(-1e-3, 0.1, 0), (5.0, 1.0, 0)])
        assert not numeric_admissibility(mix).density_nonneg

    def test_oscillating_tail(self):
        mix = ExpPolyMixture.from_terms([(1.0, 1.0, 0), (0.1j, 1 + 1j, 0), (-0.1j, 1 - 1j, 0)])
        assert numeric_admissibility(mix).density_nonneg
        slow = ExpPolyMixture.from_terms([(1.0, 2.0, 0), (0.1j, 1 + 1j, 0), (-0.1j, 1 - 1j, 0)])
        assert not numeric_admissibility(slow).density_nonneg

    def test_empty(self):
        rep = numeric_admissibility(ExpPolyMixture.from_terms([], atom0=1.0))
        assert rep.density_nonneg and rep.survival_monotone


class TestPhaseType:
    def test_harris_order_four(self):
        ph = PhaseType(HARRIS_ALPHA, HARRIS_A)
        x = np.linspace(0, 10, 100)
        assert ph_density(ph, x) == pytest.approx(HARRIS.density(x), rel=1e-9)
        assert ph_density(ph, 1.0) == pytest.approx(2 / np.e - 6 / np.e**2 + 6 / np.e**3, rel=1e-12)

    def test_harris_survival_coordinates(self):
        tail = HARRIS.tail()
        got = np.array(sorted((t[1].real, t[0].real) for t in tail.terms()))
        assert got[:, 1] == pytest.approx([2.0, -3.0, 2.0], rel=1e-12)
        assert three_exp_criterion(got[:, 1])

    def test_exponential(self):
        ph = PhaseType([1.0], [[-1.7]])
        x = np.array([0.0, 0.5, 3.0])
        assert ph_density(ph, x) == pytest.approx(1.7 * np.exp(-1.7 * x), rel=1e-13)

    def test_erlang2_at_zero(self):
        ph = PhaseType([1.0, 0.0], [[-2.0, 2.0], [0.0, -2.0]])
        assert ph_density(ph, 0.0) == 0.0
        assert quad(lambda t: ph_density(ph, t), 0, np.inf)[0] == pytest.approx(1.0, rel=1e-8)

    def test_exit_rates(self):
        assert PhaseType(HARRIS_ALPHA, HARRIS_A).exit_rates.tolist() == [0, 0, 0, 4]

    @pytest.mark.parametrize(
        "alpha, A",
        [([1.0], [[1.0]]),
         ([0.5, 0.5], [[-1.0, -0.5], [0.0, -1.0]]),
         ([0.5, 0.5], [[-1.0, 2.0], [0.0, -1.0]]),
         ([0.7, 0.7], [[-1.0, 0.0], [0.0, -1.0]]),
         ([-0.1, 1.0], [[-1.0, 0.0], [0.0, -1.0]]),
         ([1.0], [[-1.0, 0.0], [0.0, -1.0]])],
    )
    def test_invalid(self, alpha, A):
        with pytest.raises(InvalidSubgenerator):
            PhaseType(alpha, A)

    def test_negative_x(self):
        with pytest.raises(ValueError):
            ph_density(PhaseType([1.0], [[-1.0]]), -1.0)
