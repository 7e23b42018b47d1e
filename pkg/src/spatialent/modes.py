"""Spatial-mode construction and covariance-matrix assembly.

A spatial mode is a unit vector of overlap coefficients of a detector
profile against the box modes.  Two profile families are supported: the
flat top hat, integrated in closed form, and the Gaussian-modulated
variant that suppresses coefficients by exp(-k^2 w^2).  Assembly of the
two-mode covariance matrix tracks per-entry series tails so divergent
momentum sums are detected instead of silently truncated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np

from .errors import (
    DegenerateModeError,
    DivergentSeriesError,
    OrthogonalizationError,
    TruncationMismatchError,
    ValidationError,
)
from .field import ThermalFieldConfig, thermal_factors
from .symplectic import CovarianceMatrix4

__all__ = [
    "ProfileKind",
    "DetectorProfile",
    "Region",
    "TruncationSpec",
    "ModeVector",
    "CmAssemblyReport",
    "overlap_coefficients",
    "cross_commutator_residual",
    "orthogonalize_pair",
    "assemble_cm",
    "prepare_mode_pair",
    "symmetric_regions",
    "DEFAULT_RESIDUAL_GATE",
]

# Cross-commutator residual above which a pair must be orthogonalized
# before its covariance matrix can carry a verdict.
DEFAULT_RESIDUAL_GATE = 1e-6

_MOMENTUM_ENTRIES = ("a_pp", "b_pp", "c_pp")


class ProfileKind(Enum):
    TOP_HAT = "top_hat"
    GAUSSIAN_MODULATED = "gaussian"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DetectorProfile:
    """Detector profile drawn over a region.

    ``width`` is the Gaussian modulation scale w; None means "use the
    region width".  ``inverse_k_weighting`` restores the top hat's 1/k
    factor inside the modulated coefficients, a sensitivity variant that
    is off by default.
    """

    kind: ProfileKind = ProfileKind.GAUSSIAN_MODULATED
    width: float | None = None
    inverse_k_weighting: bool = False

    def __post_init__(self):
        if self.width is not None and not self.width > 0:
            raise ValidationError("profile width must be positive")


@dataclass(frozen=True)
class Region:
    """Interval [x1, x2] inside the box."""

    x1: float
    x2: float

    def __post_init__(self):
        if not (np.isfinite(self.x1) and np.isfinite(self.x2)):
            raise ValidationError("region edges must be finite")
        if not self.x1 >= 0:
            raise ValidationError(f"region start {self.x1} must be >= 0")
        if not self.x2 > self.x1:
            raise ValidationError(
                f"region [{self.x1}, {self.x2}] must have positive width"
            )

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    def overlaps(self, other: "Region") -> bool:
        return self.x1 < other.x2 and other.x1 < self.x2


@dataclass(frozen=True)
class TruncationSpec:
    """Which mode indices enter the sums and how tails are judged.

    ``prepared`` marks the truncation as state preparation: the retained
    window is the whole state, the sums terminate exactly and no tail
    check applies.  Without it, l_max is a numerical stand-in for an
    infinite sum and tails are estimated over the last decade of terms.
    """

    l_min: int = 1
    l_max: int = 256
    convergence_tol: float = 1e-8
    hard_cap: int = 100_000
    prepared: bool = False

    def __post_init__(self):
        if not 1 <= self.l_min <= self.l_max <= self.hard_cap:
            raise ValidationError(
                f"need 1 <= l_min <= l_max <= hard_cap, got "
                f"({self.l_min}, {self.l_max}, {self.hard_cap})"
            )
        if not self.convergence_tol > 0:
            raise ValidationError("convergence_tol must be positive")


@dataclass(frozen=True)
class ModeVector:
    """Normalized overlap coefficients of one region's profile.

    ``coefficients[i]`` belongs to mode index l = i + 1; entries outside
    [l_min, l_max] are zero.  ``normalization_constant`` is the factor the
    raw integrals were multiplied by to enforce sum(I^2) = 1.
    """

    region: Region
    profile: DetectorProfile
    l_min: int
    l_max: int
    coefficients: np.ndarray
    normalization_constant: float

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        if coeffs.shape != (self.l_max,):
            raise ValidationError(
                f"expected {self.l_max} coefficients, got {coeffs.shape}"
            )

    def norm_defect(self) -> float:
        return abs(float(self.coefficients @ self.coefficients) - 1.0)

    def replace_coefficients(self, coefficients: np.ndarray) -> "ModeVector":
        return ModeVector(
            region=self.region,
            profile=self.profile,
            l_min=self.l_min,
            l_max=self.l_max,
            coefficients=coefficients,
            normalization_constant=self.normalization_constant,
        )

    def to_dict(self) -> dict:
        return {
            "region": [self.region.x1, self.region.x2],
            "profile": {
                "kind": self.profile.kind.value,
                "width": self.profile.width,
                "inverse_k_weighting": self.profile.inverse_k_weighting,
            },
            "l_min": self.l_min,
            "l_max": self.l_max,
            "normalization_constant": self.normalization_constant,
            "coefficients": self.coefficients.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModeVector":
        prof = data["profile"]
        return cls(
            region=Region(*data["region"]),
            profile=DetectorProfile(
                kind=ProfileKind(prof["kind"]),
                width=prof["width"],
                inverse_k_weighting=prof["inverse_k_weighting"],
            ),
            l_min=data["l_min"],
            l_max=data["l_max"],
            coefficients=np.array(data["coefficients"], dtype=float),
            normalization_constant=data["normalization_constant"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ModeVector":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CmAssemblyReport:
    """Assembled covariance matrix plus convergence bookkeeping.

    ``series_converged`` and ``tail_estimates`` are keyed by covariance
    entry name.  A matrix whose momentum entries (a_pp, b_pp, c_pp) fail
    convergence must not carry separability verdicts.
    """

    cm: CovarianceMatrix4
    series_converged: dict = dc_field(default_factory=dict)
    series_diverging: dict = dc_field(default_factory=dict)
    tail_estimates: dict = dc_field(default_factory=dict)
    cross_commutator_residual: float = 0.0

    @property
    def usable_for_verdicts(self) -> bool:
        return all(self.series_converged[k] for k in _MOMENTUM_ENTRIES)

    def require_verdict_grade(self):
        """Raise if any momentum-entry series failed its tail check."""
        if not self.usable_for_verdicts:
            bad = [k for k in _MOMENTUM_ENTRIES if not self.series_converged[k]]
            raise DivergentSeriesError(
                "momentum-variance series did not converge for entries "
                f"{bad}; an untruncated top-hat profile has no finite "
                "momentum variance.  Truncate the mode window (prepared "
                "state) or use the gaussian profile.",
                report=self,
            )


def _raw_coefficients(
    region: Region,
    profile: DetectorProfile,
    trunc: TruncationSpec,
    cfg: ThermalFieldConfig,
) -> np.ndarray:
    length = cfg.box_length
    if region.x2 > length:
        raise ValidationError(
            f"region [{region.x1}, {region.x2}] extends beyond the box "
            f"length {length}"
        )
    ls = np.arange(1, trunc.l_max + 1, dtype=float)
    k = np.pi * ls / length
    cos_diff = np.cos(k * region.x1) - np.cos(k * region.x2)
    if profile.kind is ProfileKind.TOP_HAT:
        # exact integral of a constant profile against sqrt(2/L) sin(kx)
        raw = math.sqrt(2.0 / length) * cos_diff / k
    else:
        w = profile.width if profile.width is not None else region.width
        raw = cos_diff * np.exp(-(k ** 2) * (w ** 2))
        if profile.inverse_k_weighting:
            raw = raw / k
    if trunc.l_min > 1:
        raw[: trunc.l_min - 1] = 0.0
    return raw


def overlap_coefficients(
    region: Region,
    profile: DetectorProfile,
    trunc: TruncationSpec,
    cfg: ThermalFieldConfig,
) -> ModeVector:
    """Build the normalized coefficient vector of one spatial mode.

    Normalization enforces the canonical commutator of the region's
    position/momentum pair, sum(I_l^2) = 1.
    """
    raw = _raw_coefficients(region, profile, trunc, cfg)
    norm_sq = float(raw @ raw)
    if norm_sq <= 0.0 or not np.isfinite(norm_sq):
        raise DegenerateModeError(
            f"all overlap coefficients vanish for region "
            f"[{region.x1}, {region.x2}] with l in "
            f"[{trunc.l_min}, {trunc.l_max}]"
        )
    norm = math.sqrt(norm_sq)
    return ModeVector(
        region=region,
        profile=profile,
        l_min=trunc.l_min,
        l_max=trunc.l_max,
        coefficients=raw / norm,
        normalization_constant=1.0 / norm,
    )


def _check_same_truncation(mv_r: ModeVector, mv_q: ModeVector):
    if mv_r.l_min != mv_q.l_min or mv_r.l_max != mv_q.l_max:
        raise TruncationMismatchError(
            f"mode vectors carry different truncations: "
            f"[{mv_r.l_min}, {mv_r.l_max}] vs [{mv_q.l_min}, {mv_q.l_max}]"
        )


def cross_commutator_residual(mv_r: ModeVector, mv_q: ModeVector) -> float:
    """Residual commutator sum(I_l^R I_l^Q) between the two modes.

    Exactly canonical pairs have zero residual; disjoint untruncated
    top-hat regions approach it through mode completeness.
    """
    _check_same_truncation(mv_r, mv_q)
    return float(mv_r.coefficients @ mv_q.coefficients)


def orthogonalize_pair(
    mv_r: ModeVector, mv_q: ModeVector
) -> tuple[ModeVector, ModeVector]:
    """Symmetric orthogonalization of two coefficient vectors.

    The pair is mixed by the inverse square root of its overlap matrix,
    the least-squares-minimal displacement that zeroes the cross
    commutator, then renormalized.
    """
    _check_same_truncation(mv_r, mv_q)
    u = mv_r.coefficients
    v = mv_q.coefficients
    s = float(u @ v)
    if abs(s) >= 1.0 - 1e-12:
        raise OrthogonalizationError(
            f"mode vectors are parallel (overlap {s}); cannot orthogonalize"
        )
    # closed form of the 2-vector symmetric orthogonalizer
    plus = 1.0 / math.sqrt(1.0 + s)
    minus = 1.0 / math.sqrt(1.0 - s)
    a = 0.5 * (plus + minus)
    b = 0.5 * (plus - minus)
    new_u = a * u + b * v
    new_v = b * u + a * v
    new_u = new_u / np.linalg.norm(new_u)
    new_v = new_v / np.linalg.norm(new_v)
    return mv_r.replace_coefficients(new_u), mv_q.replace_coefficients(new_v)


def _tail_stats(terms: np.ndarray, total: float, trunc: TruncationSpec):
    """Tail estimate from the last decade of terms plus a Cauchy check."""
    if trunc.prepared:
        # the window is the whole state: the series terminates at l_max
        return 0.0, True, False
    n = len(terms)
    last_start = max(n // 10, 1)
    prev_start = max(n // 100, 0)
    tail = float(np.abs(terms[last_start:]).sum())
    prev = float(np.abs(terms[prev_start:last_start]).sum())
    converged = tail <= trunc.convergence_tol * max(abs(total), 1.0)
    diverging = (not converged) and tail >= 0.5 * prev
    return tail, converged, diverging


def assemble_cm(
    mv_r: ModeVector,
    mv_q: ModeVector,
    cfg: ThermalFieldConfig,
    trunc: TruncationSpec,
    residual_gate: float | None = DEFAULT_RESIDUAL_GATE,
) -> CmAssemblyReport:
    """Sum the six covariance entries over the retained modes.

    Position entries weight each mode by 1/k^2, momentum entries by k^2,
    both multiplied by the mode's thermal factor.  ``residual_gate`` caps
    the allowed cross-commutator residual; pass None to assemble without
    the gate (raw, paper-literal construction).
    """
    _check_same_truncation(mv_r, mv_q)
    if mv_r.norm_defect() > 1e-10 or mv_q.norm_defect() > 1e-10:
        raise ValidationError("mode vectors must be normalized")
    residual = cross_commutator_residual(mv_r, mv_q)
    if residual_gate is not None and abs(residual) > residual_gate:
        raise ValidationError(
            f"cross-commutator residual {residual:.3e} exceeds the gate "
            f"{residual_gate:.1e}; orthogonalize the pair first"
        )
    ls = np.arange(1, mv_r.l_max + 1)
    k = np.pi * ls.astype(float) / cfg.box_length
    coth = thermal_factors(cfg, ls)
    wu = coth / k ** 2
    wp = coth * k ** 2
    i_r = mv_r.coefficients
    i_q = mv_q.coefficients
    term_sets = {
        "a_uu": wu * i_r * i_r,
        "a_pp": wp * i_r * i_r,
        "b_uu": wu * i_q * i_q,
        "b_pp": wp * i_q * i_q,
        "c_uu": wu * i_r * i_q,
        "c_pp": wp * i_r * i_q,
    }
    totals = {}
    tails = {}
    converged = {}
    diverging = {}
    for name, terms in term_sets.items():
        total = float(terms.sum())
        totals[name] = total
        tails[name], converged[name], diverging[name] = _tail_stats(
            terms, total, trunc
        )
    cm = CovarianceMatrix4(**totals)
    return CmAssemblyReport(
        cm=cm,
        series_converged=converged,
        series_diverging=diverging,
        tail_estimates=tails,
        cross_commutator_residual=residual,
    )


def symmetric_regions(
    width: float, separation: float, cfg: ThermalFieldConfig,
    center: float | None = None,
) -> tuple[Region, Region]:
    """Two equal regions placed symmetrically about the box center.

    ``separation`` is the gap between the inner edges; zero means the
    regions touch.  Overlapping placements are rejected.
    """
    if separation < 0:
        raise ValidationError("regions must not overlap (separation >= 0)")
    if center is None:
        center = cfg.box_length / 2.0
    r = Region(center - separation / 2.0 - width, center - separation / 2.0)
    q = Region(center + separation / 2.0, center + separation / 2.0 + width)
    if q.x2 > cfg.box_length:
        raise ValidationError(
            f"regions of width {width} separated by {separation} do not fit "
            f"inside the box of length {cfg.box_length}"
        )
    return r, q


def prepare_mode_pair(
    region_r: Region,
    region_q: Region,
    profile: DetectorProfile,
    trunc: TruncationSpec,
    cfg: ThermalFieldConfig,
    orthogonalize: bool = True,
    residual_gate: float = DEFAULT_RESIDUAL_GATE,
) -> tuple[ModeVector, ModeVector, float, float]:
    """Build both mode vectors and repair their cross commutator.

    Returns (mode_R, mode_Q, residual_before, residual_after).  With
    ``orthogonalize`` off the raw vectors are returned and the gate is not
    enforced.
    """
    if region_r.overlaps(region_q):
        raise ValidationError("regions overlap; verdicts need disjoint regions")
    mv_r = overlap_coefficients(region_r, profile, trunc, cfg)
    mv_q = overlap_coefficients(region_q, profile, trunc, cfg)
    before = cross_commutator_residual(mv_r, mv_q)
    after = before
    if orthogonalize and abs(before) > residual_gate:
        mv_r, mv_q = orthogonalize_pair(mv_r, mv_q)
        after = cross_commutator_residual(mv_r, mv_q)
    return mv_r, mv_q, before, after
