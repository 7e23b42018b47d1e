"""Two-mode Gaussian linear algebra against closed forms and the dense
eigen-oracle."""

import math

import numpy as np
import pytest

from spatialent import (
    CovarianceMatrix4,
    MalformedCovarianceError,
    NonFiniteInputError,
    UnphysicalStateError,
    ValidationError,
    Verdict,
    eigen_oracle,
    invariants,
    is_physical,
    partial_transpose,
    purity,
    purity_threshold,
    random_physical_cm,
    separability_test,
    symplectic_eigenvalues,
    two_mode_squeezed,
)
from spatialent.symplectic import literal_separability_expression


def identity_cm():
    return CovarianceMatrix4(1.0, 1.0, 1.0, 1.0, 0.0, 0.0)


def thermal_cm(n):
    return CovarianceMatrix4(n, n, n, n, 0.0, 0.0)


class TestInvariants:
    def test_identity(self):
        inv = invariants(identity_cm())
        assert (inv.det_a, inv.det_b, inv.det_c, inv.det_gamma) == (1, 1, 0, 1)

    def test_product_thermal(self):
        inv = invariants(thermal_cm(2.0))
        assert (inv.det_a, inv.det_b, inv.det_c, inv.det_gamma) == (4, 4, 0, 16)

    def test_two_mode_squeezed_against_dense_determinant(self):
        cm = two_mode_squeezed(1.0)
        inv = invariants(cm)
        ch2, sh2 = math.cosh(2.0) ** 2, math.sinh(2.0) ** 2
        assert inv.det_a == pytest.approx(ch2, rel=1e-14)
        assert inv.det_b == pytest.approx(ch2, rel=1e-14)
        assert inv.det_c == pytest.approx(-sh2, rel=1e-14)
        # oracle: determinant of the assembled 4x4 matrix
        assert inv.det_gamma == pytest.approx(np.linalg.det(cm.matrix()),
                                              rel=1e-12, abs=1e-12)

    def test_det_gamma_matches_dense_determinant_randomly(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            cm = random_physical_cm(rng)
            dg = invariants(cm).det_gamma
            dense = np.linalg.det(cm.matrix())
            assert abs(dense - dg) <= 1e-12 * max(1.0, abs(dg))

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteInputError):
            CovarianceMatrix4(math.nan, 1, 1, 1, 0, 0)
        with pytest.raises(NonFiniteInputError):
            CovarianceMatrix4(1, math.inf, 1, 1, 0, 0)

    def test_nonpositive_diagonal_rejected(self):
        with pytest.raises(ValidationError):
            CovarianceMatrix4(0.0, 1, 1, 1, 0, 0)


class TestSymplecticEigenvalues:
    def test_identity_is_vacuum(self):
        assert symplectic_eigenvalues(invariants(identity_cm())) == (1.0, 1.0)

    def test_uncorrelated_thermal(self):
        nu_p, nu_m = symplectic_eigenvalues(invariants(thermal_cm(3.0)))
        assert nu_p == pytest.approx(3.0, rel=1e-14)
        assert nu_m == pytest.approx(3.0, rel=1e-14)

    def test_two_mode_squeezed_is_pure(self):
        cm = two_mode_squeezed(1.0)
        nu_p, nu_m = symplectic_eigenvalues(invariants(cm))
        assert nu_m == pytest.approx(1.0, abs=1e-9)
        assert nu_p == pytest.approx(1.0, abs=1e-9)
        # independent route
        or_p, or_m = eigen_oracle(cm)
        assert or_m == pytest.approx(nu_m, abs=1e-9)
        assert or_p == pytest.approx(nu_p, abs=1e-9)

    def test_malformed_discriminant_raises(self):
        from spatialent.symplectic import SymplecticInvariants, _nu_pair_from

        inv = SymplecticInvariants(det_a=1.0, det_b=1.0, det_c=0.0,
                                   det_gamma=400.0)
        with pytest.raises(MalformedCovarianceError):
            symplectic_eigenvalues(inv)
        # a tiny negative discriminant is clamped, not fatal
        nu_p, nu_m = _nu_pair_from(2.0, 1.0 + 1e-12)
        assert nu_p == pytest.approx(nu_m, abs=1e-6)


class TestEigenOracle:
    def test_identity(self):
        nu_p, nu_m = eigen_oracle(identity_cm())
        assert nu_p == pytest.approx(1.0, abs=1e-12)
        assert nu_m == pytest.approx(1.0, abs=1e-12)

    def test_block_diagonal_modes(self):
        cm = CovarianceMatrix4(2.0, 2.0, 3.0, 3.0, 0.0, 0.0)
        nu_p, nu_m = eigen_oracle(cm)
        assert (nu_p, nu_m) == (pytest.approx(3.0), pytest.approx(2.0))

    def test_agrees_with_invariant_route_on_random_cms(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            cm = random_physical_cm(rng)
            nu_p, nu_m = symplectic_eigenvalues(invariants(cm))
            or_p, or_m = eigen_oracle(cm)
            assert abs(nu_p - or_p) <= 1e-9 * max(1.0, or_p)
            assert abs(nu_m - or_m) <= 1e-9 * max(1.0, or_m)


class TestPhysicality:
    def test_identity_physical(self):
        assert is_physical(identity_cm())

    def test_below_vacuum_uncertainty(self):
        assert not is_physical(CovarianceMatrix4(0.5, 0.5, 0.5, 0.5, 0, 0))

    def test_pure_states_sit_on_the_boundary(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            cm = random_physical_cm(rng, nu_bounds=(1.0, 1.0))
            inv = invariants(cm)
            assert abs(inv.det_gamma - 1.0) <= 1e-9 * max(1.0, inv.det_gamma)
            _, nu_m = symplectic_eigenvalues(inv)
            assert abs(nu_m - 1.0) <= 1e-6


class TestPartialTranspose:
    def test_definition(self):
        cm = CovarianceMatrix4(1, 1, 1, 1, 0.3, 0.2)
        pt = partial_transpose(cm)
        assert pt.c_uu == 0.3
        assert pt.c_pp == -0.2

    def test_fixed_point_without_momentum_correlation(self):
        cm = CovarianceMatrix4(1.2, 1.1, 1.3, 1.4, 0.2, 0.0)
        assert partial_transpose(cm) == cm

    def test_involution_and_det_preservation(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            cm = random_physical_cm(rng)
            assert partial_transpose(partial_transpose(cm)) == cm
            assert invariants(partial_transpose(cm)).det_gamma == \
                invariants(cm).det_gamma

    def test_two_mode_squeezed_transposed_eigenvalue(self):
        # eigen-oracle on the transposed matrix is the independent route
        _, nu_m = eigen_oracle(partial_transpose(two_mode_squeezed(1.0)))
        assert nu_m == pytest.approx(math.exp(-2.0), rel=1e-9)


class TestSeparabilityTest:
    def test_identity_separable(self):
        sv = separability_test(identity_cm())
        assert sv.verdict is Verdict.SEPARABLE
        assert sv.log_negativity == 0.0

    def test_two_mode_squeezed_entangled(self):
        sv = separability_test(two_mode_squeezed(1.0))
        assert sv.verdict is Verdict.ENTANGLED
        assert sv.nu_minus_pt == pytest.approx(math.exp(-2.0), rel=1e-9)
        assert sv.log_negativity == pytest.approx(2.0 / math.log(2.0), rel=1e-9)

    def test_product_thermal_separable(self):
        sv = separability_test(thermal_cm(5.0))
        assert sv.verdict is Verdict.SEPARABLE

    def test_unphysical_flagged_with_invalid_fields(self):
        sv = separability_test(CovarianceMatrix4(0.5, 0.5, 0.5, 0.5, 0, 0))
        assert sv.verdict is Verdict.PHYSICALITY_VIOLATED
        assert math.isnan(sv.nu_minus_pt)
        assert math.isnan(sv.log_negativity)
        assert math.isnan(sv.eq13_value)

    def test_block_diagonal_cms_are_never_entangled(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            a, c = rng.uniform(1.0, 4.0, size=2)
            b, d = 1.0 / a + rng.uniform(0, 2), 1.0 / c + rng.uniform(0, 2)
            sv = separability_test(CovarianceMatrix4(a, b, c, d, 0.0, 0.0))
            assert sv.verdict is Verdict.SEPARABLE
            assert sv.log_negativity == 0.0

    def test_negativity_positive_iff_entangled(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            sv = separability_test(random_physical_cm(rng))
            assert (sv.log_negativity > 0) == (sv.verdict is Verdict.ENTANGLED)


class TestPurity:
    def test_identity_pure(self):
        assert purity(identity_cm()) == pytest.approx(1.0)

    def test_product_thermal(self):
        assert purity(thermal_cm(2.0)) == pytest.approx(0.25, rel=1e-14)

    def test_two_mode_squeezed_pure_any_squeezing(self):
        for r in (0.1, 0.7, 1.5):
            assert purity(two_mode_squeezed(r)) == pytest.approx(1.0, abs=1e-9)

    def test_unphysical_rejected(self):
        with pytest.raises(UnphysicalStateError):
            purity(CovarianceMatrix4(0.5, 0.5, 0.5, 0.5, 0, 0))


class TestPurityThreshold:
    def test_identity_consistent_with_separable(self):
        cm = identity_cm()
        assert purity_threshold(cm) == pytest.approx(1.0)
        assert not purity(cm) > purity_threshold(cm)

    def test_two_mode_squeezed_crosses_threshold(self):
        cm = two_mode_squeezed(1.0)
        # direct evaluation of 1/sqrt(AB + CD - 2EF - 1)
        expected = 1.0 / math.sqrt(2.0 * math.cosh(4.0) - 1.0)
        assert purity_threshold(cm) == pytest.approx(expected, rel=1e-12)
        assert purity(cm) > purity_threshold(cm)

    def test_product_thermal_stays_below_threshold(self):
        cm = thermal_cm(2.0)
        assert purity_threshold(cm) == pytest.approx(1.0 / math.sqrt(7.0))
        assert not purity(cm) > purity_threshold(cm)

    def test_degenerate_radicand_returns_sentinel(self):
        cm = CovarianceMatrix4(0.5, 0.5, 0.5, 0.5, 0.45, -0.45)
        assert purity_threshold(cm) == math.inf

    def test_matches_transposed_eigenvalue_verdict(self):
        # the purity route and the PPT route decide identically
        rng = np.random.default_rng(17)
        for _ in range(300):
            cm = random_physical_cm(rng)
            sv = separability_test(cm)
            if abs(sv.nu_minus_pt - 1.0) <= 2e-9:
                continue  # boundary band
            by_purity = purity(cm) > purity_threshold(cm)
            assert by_purity == (sv.verdict is Verdict.ENTANGLED)


class TestLiteralExpression:
    def test_differs_from_determinant_arrangement_when_asymmetric(self):
        cm = CovarianceMatrix4(1.5, 2.0, 1.5, 2.0, 0.3, -0.7)
        a, b, c, d, e, f = cm.as_tuple()
        det_form = 1 + (a * c - e * e) * (b * d - f * f) - a * b - c * d \
            + 2 * e * f
        assert literal_separability_expression(cm) != pytest.approx(det_form)

    def test_agrees_when_cross_entries_have_equal_magnitude(self):
        cm = two_mode_squeezed(0.5)
        a, b, c, d, e, f = cm.as_tuple()
        det_form = 1 + (a * c - e * e) * (b * d - f * f) - a * b - c * d \
            + 2 * e * f
        assert literal_separability_expression(cm) == pytest.approx(det_form)
