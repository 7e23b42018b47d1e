"""Probe-pair extraction: perturbative state, entanglement condition,
qubit PPT oracle and the Wick/Monte-Carlo cross-check."""

import math

import numpy as np
import pytest

from spatialent import (
    CovarianceMatrix4,
    ProbeCoupling,
    ProbePairState,
    UnphysicalStateError,
    ValidationError,
    extraction_test,
    monte_carlo_fourth_moment,
    ppt_probe_oracle,
    probe_state,
    random_physical_cm,
    two_mode_squeezed,
    wick_fourth_moment,
)
from spatialent.extraction import random_probe_state


def identity_cm():
    return CovarianceMatrix4(1.0, 1.0, 1.0, 1.0, 0.0, 0.0)


# probe_frequency 2 with unit mass and hbar makes kappa = gamma^2 and the
# fourth-order weight exactly kappa^2
UNIT_COUPLING = ProbeCoupling(gamma_eff=0.099999999, probe_frequency=2.0)


class TestProbeCoupling:
    def test_kappa_prefactor(self):
        coupling = ProbeCoupling(gamma_eff=0.05, probe_frequency=8.0,
                                 probe_mass=1.0, hbar=1.0)
        assert coupling.kappa == pytest.approx(0.05 ** 2 * 8.0 / 2.0)
        assert coupling.kappa4 == pytest.approx(0.05 ** 4)

    def test_perturbative_gate(self):
        with pytest.raises(ValidationError):
            ProbeCoupling(gamma_eff=0.1)
        with pytest.raises(ValidationError):
            ProbeCoupling(gamma_eff=0.0)
        with pytest.raises(ValidationError):
            ProbeCoupling(gamma_eff=-0.01)


class TestProbeState:
    def test_vacuum_moments(self):
        state = probe_state(identity_cm(), UNIT_COUPLING)
        assert state.x == pytest.approx(0.005, rel=1e-6)
        assert state.z == pytest.approx(0.005, rel=1e-6)
        assert state.y == 0.0
        assert state.delta == pytest.approx(2.5e-5, rel=1e-6)
        assert not state.entangled

    def test_uncorrelated_regions_cannot_extract(self):
        cm = CovarianceMatrix4(2.0, 2.0, 3.0, 3.0, 0.0, 0.0)
        state = probe_state(cm, UNIT_COUPLING)
        assert state.y == 0.0
        kappa = UNIT_COUPLING.kappa
        assert state.delta == pytest.approx(kappa ** 2 * (2.0 / 2) * (3.0 / 2),
                                            rel=1e-9)
        assert not extraction_test(state)

    def test_unphysical_cm_rejected(self):
        with pytest.raises(UnphysicalStateError):
            probe_state(CovarianceMatrix4(0.5, 0.5, 0.5, 0.5, 0, 0),
                        UNIT_COUPLING)

    def test_second_moments_read_off_the_matrix(self):
        cm = two_mode_squeezed(0.6)
        state = probe_state(cm, UNIT_COUPLING)
        kappa = UNIT_COUPLING.kappa
        assert state.x == pytest.approx(kappa * cm.a_uu / 2.0)
        assert state.y == pytest.approx(kappa * cm.c_uu / 2.0)

    def test_coherence_respects_cauchy_schwarz(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            cm = random_physical_cm(rng)
            state = probe_state(cm, UNIT_COUPLING)
            assert state.y ** 2 <= state.x * state.z * (1 + 1e-9)

    def test_scaling_in_pulse_strength(self):
        cm = two_mode_squeezed(0.8)
        weak = probe_state(cm, ProbeCoupling(0.02, probe_frequency=2.0))
        strong = probe_state(cm, ProbeCoupling(0.04, probe_frequency=2.0))
        assert strong.x == pytest.approx(4.0 * weak.x, rel=1e-12)
        assert strong.y == pytest.approx(4.0 * weak.y, rel=1e-12)
        assert strong.delta == pytest.approx(16.0 * weak.delta, rel=1e-12)
        # the verdict is invariant under pulse rescaling
        assert extraction_test(weak) == extraction_test(strong)


class TestExtractionTest:
    def test_zero_coherence_is_never_entangled(self):
        assert not extraction_test(ProbePairState(0.3, 0.0, 0.2, 1e-6))

    def test_spec_point_above_threshold(self):
        state = ProbePairState(x=0.2, y=0.01, z=0.2, delta=1e-8)
        assert state.threshold == pytest.approx(5.0000000025e-5, rel=1e-9)
        assert extraction_test(state)

    def test_exactly_at_threshold_is_not_entangled(self):
        delta = 0.01
        threshold = 0.5 * math.sqrt(delta * (delta + 1.0))
        state = ProbePairState(x=1.0, y=threshold, z=1.0, delta=delta)
        assert state.condition_margin == 0.0
        assert not extraction_test(state)


class TestPptProbeOracle:
    def test_diagonal_matrix_is_positive(self):
        assert ppt_probe_oracle(ProbePairState(0.3, 0.0, 0.2, 1e-4)) >= 0.0

    def test_strong_coherence_goes_negative(self):
        assert ppt_probe_oracle(ProbePairState(0.2, 0.01, 0.2, 1e-8)) < 0.0

    def test_matches_closed_form_block_eigenvalue(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            state = random_probe_state(rng)
            # transposed coherence couples the corner block [[1, y], [y, d]]
            closed = (1.0 + state.delta) / 2.0 - math.sqrt(
                (1.0 - state.delta) ** 2 / 4.0 + state.y ** 2
            )
            assert ppt_probe_oracle(state) == pytest.approx(
                min(closed, state.x, state.z), abs=1e-12
            )

    def test_sign_agreement_away_from_threshold_band(self):
        rng = np.random.default_rng(8)
        checked = 0
        while checked < 100:
            state = random_probe_state(rng)
            lower = 0.9 * state.threshold
            upper = 1.1 * math.sqrt(state.delta) if state.delta > 0 else 0.0
            if lower <= state.y <= upper:
                continue  # inside the band the two conditions may differ
            assert extraction_test(state) == (ppt_probe_oracle(state) < 0.0)
            checked += 1


class TestProbePairStateValidation:
    def test_negative_population_rejected(self):
        with pytest.raises(ValidationError):
            ProbePairState(-0.1, 0.0, 0.2, 0.0)
        with pytest.raises(ValidationError):
            ProbePairState(0.1, 0.0, 0.2, -1e-9)

    def test_oversized_coherence_rejected(self):
        with pytest.raises(ValidationError):
            ProbePairState(0.1, 0.5, 0.1, 0.0)


class TestWickFourthMoment:
    def test_factorization_on_squeezed_state(self):
        cm = two_mode_squeezed(0.5)
        expected = (cm.a_uu / 2) * (cm.b_uu / 2) + 2 * (cm.c_uu / 2) ** 2
        assert wick_fourth_moment(cm) == pytest.approx(expected, rel=1e-14)

    def test_monte_carlo_agrees_within_three_sigma(self):
        cm = two_mode_squeezed(0.5)
        rng = np.random.default_rng(123)
        estimate, stderr = monte_carlo_fourth_moment(cm, 200_000, rng)
        assert abs(estimate - wick_fourth_moment(cm)) <= 3.0 * stderr

    def test_monte_carlo_agrees_on_thermal_correlated_state(self):
        cm = CovarianceMatrix4(2.0, 2.5, 1.8, 2.2, 0.9, -0.4)
        rng = np.random.default_rng(7)
        estimate, stderr = monte_carlo_fourth_moment(cm, 200_000, rng)
        assert abs(estimate - wick_fourth_moment(cm)) <= 3.0 * stderr

    def test_sample_count_validated(self):
        with pytest.raises(ValidationError):
            monte_carlo_fourth_moment(identity_cm(), 1,
                                      np.random.default_rng(0))
