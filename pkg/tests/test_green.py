import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qspec.errors import DomainError
from qspec.green import (
    green_entry,
    green_truncation,
    green_xi1_estimate,
    hs_norm_sq_closed,
    hs_norm_sq_series,
    inverse_residual,
    power_iteration_max,
    quadratic_form,
    quadratic_form_entrywise,
    xi1_lower_bound_sq,
)
from qspec.params import QNuParams
from qspec.spectra import friedrichs_spectrum, semibound


class TestEntries:
    def test_origin(self, p_half_one):
        assert green_entry(p_half_one, 0, 0) == pytest.approx(1.0, rel=1e-15)

    def test_symmetry(self):
        p = QNuParams(0.6, 0.3)
        rng = np.random.default_rng(3)
        for j, k in rng.integers(0, 40, size=(20, 2)):
            assert green_entry(p, int(j), int(k)) == green_entry(p, int(k), int(j))

    def test_plug_in(self, p_half_one):
        # Q1(1) = (1 - q^2)/(1 - q) = 1.5 and Q2(3) = q^3 at q = 0.5, nu = 1
        assert green_entry(p_half_one, 1, 3) == pytest.approx(1.5 * 0.125, rel=1e-15)

    def test_negative_index(self, p_half_one):
        with pytest.raises(DomainError):
            green_entry(p_half_one, -1, 2)

    def test_truncation_positive_symmetric(self):
        G = green_truncation(QNuParams(0.5, 0.8), 30).G
        assert np.array_equal(G, G.T)
        assert np.all(G > 0)


class TestHilbertSchmidt:
    def test_closed_form_value(self, p_half_one):
        assert hs_norm_sq_closed(p_half_one) == pytest.approx(64.0 / 21.0, rel=1e-15)

    def test_truncated_double_sum(self, p_half_one):
        G = green_truncation(p_half_one, 80).G
        brute = sum(float(G[j, k]) ** 2 for j in range(80) for k in range(80))
        assert brute == pytest.approx(hs_norm_sq_closed(p_half_one), rel=1e-12)

    def test_series_matches_closed(self):
        for q, nu in [(0.3, 0.5), (0.5, 1.0), (0.9, 2.0)]:
            p = QNuParams(q, nu)
            assert hs_norm_sq_series(p) == pytest.approx(hs_norm_sq_closed(p), rel=1e-12)

    def test_decreasing_in_nu(self):
        vals = [hs_norm_sq_closed(QNuParams(0.5, nu)) for nu in np.linspace(0.1, 4, 25)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_truncations_increase(self):
        p = QNuParams(0.7, 0.5)
        vals = [green_truncation(p, N).frobenius_sq() for N in (5, 10, 20, 40)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < hs_norm_sq_closed(p)

    def test_needs_positive_nu(self):
        with pytest.raises(DomainError):
            hs_norm_sq_closed(QNuParams(0.5, 0.0))

    def test_lower_bound_relation(self):
        for q, nu in [(0.3, 0.5), (0.5, 2.0), (0.5, 0.0)]:
            p = QNuParams(q, nu)
            if nu > 0:
                assert xi1_lower_bound_sq(p) == pytest.approx(semibound(p), rel=1e-14)
            xi1 = friedrichs_spectrum(p, 1).eigenvalues[0]
            assert xi1 * xi1 > xi1_lower_bound_sq(p)


class TestQuadraticForm:
    def test_first_basis_vector(self):
        p = QNuParams(0.5, 1.5)
        assert quadratic_form(p, [1.0]) == pytest.approx(1.0, rel=1e-13)
        assert quadratic_form_entrywise(p, [1.0]) == pytest.approx(1.0, rel=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, 11, elements=st.floats(-2, 2)))
    def test_routes_agree_and_positive(self, f):
        p = QNuParams(0.5, 0.7)
        a = quadratic_form(p, f)
        b = quadratic_form_entrywise(p, f)
        assert a >= 0.0
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12 * float(f @ f))


class TestInverse:
    @pytest.mark.parametrize("f", [[1.0], [0, 0, 0, 1.0, 0, -2.0]])
    def test_residual_small(self, f):
        assert inverse_residual(QNuParams(0.5, 1.5), f, 60) < 1e-10

    def test_boundary_row_defect_shrinks(self):
        p = QNuParams(0.5, 1.5)
        r30 = inverse_residual(p, [1.0], 30, boundary_rows=0)
        r60 = inverse_residual(p, [1.0], 60, boundary_rows=0)
        assert r30 > r60

    def test_support_check(self):
        with pytest.raises(DomainError):
            inverse_residual(QNuParams(0.5, 1.5), np.ones(10), 5)


class TestLargestEigenvalue:
    def test_power_iteration_matches_eigh(self):
        G = np.asarray(green_truncation(QNuParams(0.5, 1.0), 40).G)
        assert power_iteration_max(G) == pytest.approx(np.linalg.eigvalsh(G)[-1], rel=1e-12)

    def test_below_hs_norm(self):
        p = QNuParams(0.5, 1.0)
        lam = power_iteration_max(np.asarray(green_truncation(p, 100).G))
        assert lam <= np.sqrt(hs_norm_sq_closed(p))

    def test_reciprocal_tends_to_xi1(self):
        p = QNuParams(0.5, 1.0)
        xi1 = friedrichs_spectrum(p, 1).eigenvalues[0]
        errs = [abs(green_xi1_estimate(p, N) - xi1) for N in (3, 6, 200)]
        assert errs[0] > errs[1]
        assert errs[2] < 1e-8 * xi1
