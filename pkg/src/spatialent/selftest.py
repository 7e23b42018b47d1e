"""Built-in oracle suite behind the ``selftest`` subcommand.

Each check exercises one independent route against the implementation it
certifies: the dense eigen-oracle against the closed-form symplectic
eigenvalues, Monte-Carlo sampling against the Wick fourth moment,
numerical quadrature against mode orthonormality, and synthetic exact
data against the power-law fitter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .analysis import fit_power_law
from .config import RunConfig
from .extraction import monte_carlo_fourth_moment, wick_fourth_moment
from .field import ThermalFieldConfig, mode_function
from .symplectic import (
    eigen_oracle,
    invariants,
    random_physical_cm,
    symplectic_eigenvalues,
    two_mode_squeezed,
)

__all__ = ["CheckResult", "run_selftest"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_symplectic_oracle(config: RunConfig, rng) -> CheckResult:
    n = config.get("selftest", "cm_samples")
    tol = config.get("selftest", "eigen_tol")
    worst = 0.0
    for _ in range(n):
        cm = random_physical_cm(rng)
        nu_p, nu_m = symplectic_eigenvalues(invariants(cm))
        or_p, or_m = eigen_oracle(cm)
        worst = max(
            worst,
            abs(nu_p - or_p) / max(abs(or_p), 1.0),
            abs(nu_m - or_m) / max(abs(or_m), 1.0),
        )
    return CheckResult(
        name="symplectic-oracle",
        passed=worst <= tol,
        detail=f"max relative deviation {worst:.3e} over {n} matrices "
               f"(tol {tol:.1e})",
    )


def _check_wick_monte_carlo(config: RunConfig, rng) -> CheckResult:
    n = config.get("selftest", "mc_samples")
    sigma = config.get("selftest", "mc_sigma")
    cm = two_mode_squeezed(0.5)
    exact = wick_fourth_moment(cm)
    estimate, stderr = monte_carlo_fourth_moment(cm, n, rng)
    deviation = abs(estimate - exact)
    return CheckResult(
        name="wick-monte-carlo",
        passed=deviation <= sigma * stderr,
        detail=f"|MC - Wick| = {deviation:.3e} vs {sigma:g} sigma = "
               f"{sigma * stderr:.3e} ({n} samples)",
    )


def _check_mode_orthonormality(config: RunConfig, rng) -> CheckResult:
    del rng
    n_modes = config.get("selftest", "quad_modes")
    tol = config.get("selftest", "quad_tol")
    cfg = ThermalFieldConfig()
    worst = 0.0
    for l in range(1, n_modes + 1):
        for m in range(l, n_modes + 1):
            phi_l = cfg.mode(l)
            phi_m = cfg.mode(m)
            value, _ = quad(
                lambda x: mode_function(phi_l, x) * mode_function(phi_m, x),
                0.0,
                cfg.box_length,
                limit=200,
            )
            expected = 1.0 if l == m else 0.0
            worst = max(worst, abs(value - expected))
    return CheckResult(
        name="mode-orthonormality",
        passed=worst <= tol,
        detail=f"max quadrature deviation {worst:.3e} for l,m <= {n_modes} "
               f"(tol {tol:.1e})",
    )


def _check_power_law_fit(config: RunConfig, rng) -> CheckResult:
    del rng
    tol = config.get("selftest", "fit_tol")
    widths = np.geomspace(0.05, 0.5, 8)
    points = [(w, 2.0 * w ** -0.75) for w in widths]
    exponent, amplitude, _ = fit_power_law(points)
    err = max(abs(exponent + 0.75), abs(amplitude - 2.0))
    return CheckResult(
        name="power-law-fit",
        passed=err <= tol,
        detail=f"exact-data recovery error {err:.3e} (tol {tol:.1e})",
    )


_CHECKS = (
    _check_symplectic_oracle,
    _check_wick_monte_carlo,
    _check_mode_orthonormality,
    _check_power_law_fit,
)


def run_selftest(config: RunConfig) -> list[CheckResult]:
    """Run every oracle check with the configured seed and tolerances."""
    rng = np.random.default_rng(config.get("run", "seed"))
    return [check(config, rng) for check in _CHECKS]
