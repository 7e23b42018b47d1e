"""Thermal free Bose gas in a 1D box: modes, dispersion, occupation factors.

The default configuration uses natural units (hbar = k_B = 1, m = 1/2,
L = 1) so that the wavenumber of mode l is pi*l and its energy is
(pi*l)**2.  In these units the covariance-matrix prefactors used by
:mod:`spatialent.modes` read exactly 1/(pi*l)**2 for position entries and
(pi*l)**2 for momentum entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChemicalPotentialError, ValidationError

__all__ = [
    "ThermalFieldConfig",
    "FieldMode",
    "mode_function",
    "thermal_factor",
    "thermal_factors",
]


@dataclass(frozen=True)
class ThermalFieldConfig:
    """Physical parameters of the box and the thermal state.

    ``chemical_potential`` must lie strictly below the lowest mode energy
    so every occupation factor is finite and positive.
    """

    box_length: float = 1.0
    mass: float = 0.5
    hbar: float = 1.0
    boltzmann: float = 1.0
    temperature: float = 0.0
    chemical_potential: float = 0.0

    def __post_init__(self):
        for name in ("box_length", "mass", "hbar", "boltzmann"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if not self.temperature >= 0:
            raise ValidationError("temperature must be non-negative")
        if not np.isfinite(
            [self.box_length, self.mass, self.hbar, self.boltzmann,
             self.temperature, self.chemical_potential]
        ).all():
            raise ValidationError("field configuration entries must be finite")
        if self.chemical_potential >= self.first_mode_energy:
            raise ChemicalPotentialError(
                f"chemical potential {self.chemical_potential} must be "
                f"strictly below the lowest mode energy "
                f"{self.first_mode_energy}"
            )

    @property
    def first_mode_energy(self) -> float:
        return self.mode_energy(1)

    def wavenumber(self, index: int) -> float:
        return math.pi * index / self.box_length

    def mode_energy(self, index) -> float:
        k = np.pi * np.asarray(index, dtype=float) / self.box_length
        out = (self.hbar * k) ** 2 / (2.0 * self.mass)
        return float(out) if out.ndim == 0 else out

    def mode(self, index: int) -> "FieldMode":
        if index < 1 or index != int(index):
            raise ValidationError(f"mode index must be a positive integer, got {index}")
        return FieldMode(
            index=int(index),
            wavenumber=self.wavenumber(index),
            energy=self.mode_energy(index),
            box_length=self.box_length,
        )

    def with_temperature(self, temperature: float) -> "ThermalFieldConfig":
        return ThermalFieldConfig(
            box_length=self.box_length,
            mass=self.mass,
            hbar=self.hbar,
            boltzmann=self.boltzmann,
            temperature=temperature,
            chemical_potential=self.chemical_potential,
        )


@dataclass(frozen=True)
class FieldMode:
    """One standing-wave mode of the box."""

    index: int
    wavenumber: float
    energy: float
    box_length: float

    def __post_init__(self):
        if self.index < 1:
            raise ValidationError("mode index must be >= 1")


def mode_function(mode: FieldMode, x: float) -> float:
    """Normalized standing wave sqrt(2/L) sin(k x); vanishes at both walls."""
    if not 0.0 <= x <= mode.box_length:
        raise ValidationError(
            f"position {x} outside the box [0, {mode.box_length}]"
        )
    return math.sqrt(2.0 / mode.box_length) * math.sin(mode.wavenumber * x)


def thermal_factor(mode: FieldMode, cfg: ThermalFieldConfig) -> float:
    """Occupation factor coth((E - mu) beta / 2) of one mode.

    Returns exactly 1 at zero temperature (the limit, never evaluated as
    coth of infinity).
    """
    return float(thermal_factors(cfg, np.array([mode.index]))[0])


def thermal_factors(cfg: ThermalFieldConfig, indices: np.ndarray) -> np.ndarray:
    """Vectorized occupation factors for an array of mode indices."""
    indices = np.asarray(indices)
    energies = cfg.mode_energy(indices)
    gaps = np.atleast_1d(energies - cfg.chemical_potential)
    if np.any(gaps <= 0):
        bad = np.atleast_1d(indices)[gaps <= 0][0]
        raise ChemicalPotentialError(
            f"chemical potential {cfg.chemical_potential} is not strictly "
            f"below the energy of mode l={bad}"
        )
    if cfg.temperature == 0.0:
        return np.ones_like(gaps, dtype=float)
    args = gaps / (2.0 * cfg.boltzmann * cfg.temperature)
    # tanh saturates to 1.0 well before overflow, so coth is safe for any l
    return 1.0 / np.tanh(args)
