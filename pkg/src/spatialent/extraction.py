"""Transfer of field entanglement onto a pair of localized probes.

A short position-momentum pulse populates the probes' first excited
momentum states with weights read off the field's covariance matrix.  In
the two-level basis the unnormalized probe matrix is

    [[1, 0, 0, 0],
     [0, x, y, 0],
     [0, y, z, 0],
     [0, 0, 0, delta]]

and the pair is declared entangled when y > sqrt(delta*(delta+1))/2.
Second-order weights carry the pulse prefactor kappa = gamma^2 * hbar * m
* omega / 2; the doubly-excited weight delta carries the bare gamma^4 of
the fourth-order term, which coincides with kappa^2 when
hbar * m * omega = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, UnphysicalStateError, ValidationError
from .symplectic import CovarianceMatrix4, is_physical

__all__ = [
    "ProbeCoupling",
    "ProbePairState",
    "probe_state",
    "extraction_test",
    "ppt_probe_oracle",
    "wick_fourth_moment",
    "monte_carlo_fourth_moment",
    "random_probe_state",
]


@dataclass(frozen=True)
class ProbeCoupling:
    """Integrated pulse strength and the probes' oscillator parameters.

    The perturbative treatment is only trusted for gamma_eff well below
    one; construction enforces gamma_eff < 0.1.
    """

    gamma_eff: float
    probe_frequency: float = 2.0
    probe_mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.gamma_eff < 0.1:
            raise ValidationError(
                f"gamma_eff must lie in (0, 0.1), got {self.gamma_eff}"
            )
        for name in ("probe_frequency", "probe_mass", "hbar"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")

    @property
    def kappa(self) -> float:
        """Second-order weight gamma^2 * hbar * m * omega / 2."""
        return (
            self.gamma_eff ** 2
            * self.hbar
            * self.probe_mass
            * self.probe_frequency
            / 2.0
        )

    @property
    def kappa4(self) -> float:
        """Fourth-order weight, the bare gamma^4 of the expansion."""
        return self.gamma_eff ** 4


@dataclass(frozen=True)
class ProbePairState:
    """Entries of the unnormalized two-probe matrix and its verdict."""

    x: float
    y: float
    z: float
    delta: float

    def __post_init__(self):
        if not (self.x >= 0 and self.z >= 0 and self.delta >= 0):
            raise ValidationError("populations x, z, delta must be >= 0")
        # Cauchy-Schwarz on the Gaussian moments behind the entries
        if self.y ** 2 > self.x * self.z * (1.0 + 1e-9) + 1e-300:
            raise ValidationError(
                f"coherence block not positive semidefinite: "
                f"y^2 = {self.y ** 2} > x z = {self.x * self.z}"
            )

    @property
    def threshold(self) -> float:
        return 0.5 * math.sqrt(self.delta * (self.delta + 1.0))

    @property
    def condition_margin(self) -> float:
        return self.y - self.threshold

    @property
    def entangled(self) -> bool:
        return extraction_test(self)

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, self.x, self.y, 0.0],
                [0.0, self.y, self.z, 0.0],
                [0.0, 0.0, 0.0, self.delta],
            ]
        )


def wick_fourth_moment(cm: CovarianceMatrix4) -> float:
    """<u_R^2 u_Q^2> of the zero-mean Gaussian state.

    Moment factorization of a zero-mean Gaussian: <u^2 v^2> =
    <u^2><v^2> + 2<u v>^2.  Exact, and certified independently by the
    Monte-Carlo estimator below.
    """
    m_r = cm.a_uu / 2.0
    m_q = cm.b_uu / 2.0
    m_rq = cm.c_uu / 2.0
    return m_r * m_q + 2.0 * m_rq ** 2


def probe_state(cm: CovarianceMatrix4, coupling: ProbeCoupling) -> ProbePairState:
    """Perturbative probe-pair state from a physical covariance matrix.

    x, z and y are kappa times the second moments <u_R^2>, <u_Q^2> and
    <u_R u_Q> (half the covariance entries, which store doubled moments);
    delta is gamma^4 times the Wick fourth moment.
    """
    if not is_physical(cm):
        raise UnphysicalStateError(
            "covariance matrix violates the uncertainty relation; no "
            "probe state can be extracted from it"
        )
    kappa = coupling.kappa
    return ProbePairState(
        x=kappa * cm.a_uu / 2.0,
        z=kappa * cm.b_uu / 2.0,
        y=kappa * cm.c_uu / 2.0,
        delta=coupling.kappa4 * wick_fourth_moment(cm),
    )


def extraction_test(state: ProbePairState) -> bool:
    """Probe-pair entanglement condition y > sqrt(delta*(delta+1))/2.

    Strict inequality: a state exactly at threshold is not entangled.
    For delta far below one this approaches the simple reading y > 0.
    """
    return state.y > state.threshold


def ppt_probe_oracle(state: ProbePairState) -> float:
    """Minimal eigenvalue of the partially transposed probe matrix.

    Builds the explicit 4x4 matrix, transposes the second qubit (which
    moves the coherence onto the |00><11| corner) and diagonalizes; a
    negative value certifies entanglement.
    """
    m = state.matrix()
    pt = m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    try:
        eigs = np.linalg.eigvalsh(pt)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigen-solver failed: {exc}") from exc
    return float(eigs[0])


def monte_carlo_fourth_moment(
    cm: CovarianceMatrix4, n_samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Sample estimate of <u_R^2 u_Q^2> with its standard error.

    Draws (u_R, u_Q) from the Gaussian marginal implied by the covariance
    matrix.  Independent check of the Wick factorization.
    """
    if n_samples < 2:
        raise ValidationError("need at least 2 samples")
    cov = 0.5 * np.array([[cm.a_uu, cm.c_uu], [cm.c_uu, cm.b_uu]])
    samples = rng.multivariate_normal([0.0, 0.0], cov, size=n_samples,
                                      method="cholesky")
    products = samples[:, 0] ** 2 * samples[:, 1] ** 2
    mean = float(products.mean())
    stderr = float(products.std(ddof=1) / math.sqrt(n_samples))
    return mean, stderr


def random_probe_state(rng: np.random.Generator) -> ProbePairState:
    """Random valid probe state (non-negative entries, PSD coherence block)."""
    x = rng.uniform(0.0, 0.5)
    z = rng.uniform(0.0, 0.5)
    y = rng.uniform(0.0, 1.0) * math.sqrt(x * z)
    delta = rng.uniform(0.0, 0.05)
    return ProbePairState(x=x, y=y, z=z, delta=delta)
