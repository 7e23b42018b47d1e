"""Entanglement phenomenology: separation/temperature sweeps, momentum
windows, critical temperatures and the power-law fit of their scaling.

Two preparation routes appear throughout.  The gaussian-profile route
repairs the finite cross commutator by orthogonalization and yields
always-physical matrices, so its verdicts are plain separable/entangled.
The truncated top-hat route keeps the raw, paper-literal construction:
there the physicality gate is the whole point, because a window of modes
too narrow for the region size fails the uncertainty relation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import NumericalError, ValidationError
from .field import ThermalFieldConfig, thermal_factors
from .modes import (
    DEFAULT_RESIDUAL_GATE,
    DetectorProfile,
    ProfileKind,
    TruncationSpec,
    assemble_cm,
    prepare_mode_pair,
    symmetric_regions,
)
from .symplectic import (
    NU_TOLERANCE,
    Verdict,
    purity,
    purity_threshold,
    separability_test,
)

__all__ = [
    "SweepSpec",
    "SweepPoint",
    "SweepResult",
    "run_sweep",
    "WindowScanResult",
    "momentum_window_scan",
    "TcResult",
    "critical_temperature",
    "fit_power_law",
    "CriticalTemperatureCurve",
    "critical_temperature_curve",
]


@dataclass(frozen=True)
class SweepSpec:
    """Grid of separations and temperatures at fixed region width."""

    profile: DetectorProfile
    width: float
    separations: tuple
    temperatures: tuple
    trunc: TruncationSpec = TruncationSpec()
    center: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "separations", tuple(self.separations))
        object.__setattr__(self, "temperatures", tuple(self.temperatures))
        if not self.separations or not self.temperatures:
            raise ValidationError("sweep grids must be non-empty")
        if any(t < 0 for t in self.temperatures):
            raise ValidationError("temperatures must be non-negative")

    def validate_geometry(self, cfg: ThermalFieldConfig):
        for sep in self.separations:
            symmetric_regions(self.width, sep, cfg, self.center)


@dataclass
class SweepPoint:
    """One grid point's verdict and everything needed to recompute it."""

    separation: float
    temperature: float
    entries: tuple | None = None
    nu_minus: float = math.nan
    nu_minus_pt: float = math.nan
    eq13_value: float = math.nan
    log_negativity: float = math.nan
    purity: float = math.nan
    purity_threshold: float = math.nan
    verdict: str = ""
    purity_consistent: bool | None = None
    residual_before: float = math.nan
    residual_after: float = math.nan
    series_converged: bool = False
    max_tail: float = math.nan
    error: str = ""


@dataclass
class SweepResult:
    """Row-major grid of sweep points (separation outer, temperature inner)."""

    spec: SweepSpec
    points: list = dc_field(default_factory=list)

    def point(self, i_sep: int, i_temp: int) -> SweepPoint:
        return self.points[i_sep * len(self.spec.temperatures) + i_temp]

    def negativity_grid(self) -> np.ndarray:
        grid = np.full(
            (len(self.spec.separations), len(self.spec.temperatures)), np.nan
        )
        for i in range(grid.shape[0]):
            for j in range(grid.shape[1]):
                p = self.point(i, j)
                if not p.error and p.verdict != str(Verdict.PHYSICALITY_VIOLATED):
                    grid[i, j] = p.log_negativity
        return grid

    def purity_mismatches(self) -> list:
        return [
            p for p in self.points
            if p.purity_consistent is False and not p.error
        ]


def _purity_consistency(verdict_obj, pur, thr) -> bool | None:
    if verdict_obj.verdict is Verdict.PHYSICALITY_VIOLATED:
        return None
    if abs(verdict_obj.nu_minus_pt - 1.0) <= 2.0 * NU_TOLERANCE:
        return True  # boundary band: both readings are defensible
    return (pur > thr) == (verdict_obj.verdict is Verdict.ENTANGLED)


def _sweep_row(spec, cfg, separation):
    points = []
    try:
        region_r, region_q = symmetric_regions(
            spec.width, separation, cfg, spec.center
        )
        mv_r, mv_q, before, after = prepare_mode_pair(
            region_r, region_q, spec.profile, spec.trunc, cfg
        )
    except ValidationError as exc:
        for temp in spec.temperatures:
            points.append(
                SweepPoint(separation=separation, temperature=temp,
                           error=str(exc))
            )
        return points
    for temp in spec.temperatures:
        point = SweepPoint(
            separation=separation,
            temperature=temp,
            residual_before=before,
            residual_after=after,
        )
        try:
            report = assemble_cm(
                mv_r, mv_q, cfg.with_temperature(temp), spec.trunc
            )
            report.require_verdict_grade()
            cm = report.cm
            sv = separability_test(cm)
            point.entries = cm.as_tuple()
            point.nu_minus = sv.nu_minus
            point.nu_minus_pt = sv.nu_minus_pt
            point.eq13_value = sv.eq13_value
            point.log_negativity = sv.log_negativity
            point.verdict = str(sv.verdict)
            point.series_converged = report.usable_for_verdicts
            point.max_tail = max(report.tail_estimates.values())
            if sv.verdict is not Verdict.PHYSICALITY_VIOLATED:
                point.purity = purity(cm)
                point.purity_threshold = purity_threshold(cm)
            point.purity_consistent = _purity_consistency(
                sv, point.purity, point.purity_threshold
            )
        except (ValidationError, NumericalError) as exc:
            point.error = str(exc)
        points.append(point)
    return points


def run_sweep(
    spec: SweepSpec, cfg: ThermalFieldConfig, threads: int = 1
) -> SweepResult:
    """Evaluate the separability verdict on every grid point.

    Per-point failures are recorded in the point's ``error`` field; the
    sweep itself never aborts.  Output ordering is row-major over
    separations then temperatures regardless of ``threads``.
    """
    spec.validate_geometry(cfg)
    result = SweepResult(spec=spec)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(lambda s: _sweep_row(spec, cfg, s), spec.separations)
            )
    else:
        rows = [_sweep_row(spec, cfg, s) for s in spec.separations]
    for row in rows:
        result.points.extend(row)
    return result


@dataclass(frozen=True)
class WindowScanResult:
    """Momentum window [dk_min, dk_max] that yields entangled verdicts."""

    width: float
    temperature: float
    found: bool
    dk_min: int | None
    dk_max: int | None
    open_window: bool

    @property
    def product(self) -> float:
        return self.dk_min * self.width if self.found else math.nan


def _truncated_tophat_indicators(width, cfg, cap):
    """Vectorized physical/entangled flags for every l_max up to cap.

    Uses cumulative raw sums so the whole scan costs one pass.  The state
    preparation keeps modes 1..l_max with a top-hat profile over regions
    touching at the box center.
    """
    region_r, region_q = symmetric_regions(width, 0.0, cfg)
    ls = np.arange(1, cap + 1)
    k = np.pi * ls.astype(float) / cfg.box_length
    pref = math.sqrt(2.0 / cfg.box_length)
    raw_r = pref * (np.cos(k * region_r.x1) - np.cos(k * region_r.x2)) / k
    raw_q = pref * (np.cos(k * region_q.x1) - np.cos(k * region_q.x2)) / k
    coth = thermal_factors(cfg, ls)
    wu = coth / k ** 2
    wp = coth * k ** 2
    norm_r = np.cumsum(raw_r ** 2)
    norm_q = np.cumsum(raw_q ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.cumsum(wu * raw_r ** 2) / norm_r
        b = np.cumsum(wp * raw_r ** 2) / norm_r
        c = np.cumsum(wu * raw_q ** 2) / norm_q
        d = np.cumsum(wp * raw_q ** 2) / norm_q
        cross = np.sqrt(norm_r * norm_q)
        e = np.cumsum(wu * raw_r * raw_q) / cross
        f = np.cumsum(wp * raw_r * raw_q) / cross
        det_a, det_b = a * b, c * d
        det_g = (a * c - e * e) * (b * d - f * f)
        delta = det_a + det_b + 2.0 * e * f
        nu_minus = np.sqrt(
            np.clip((delta - np.sqrt(np.clip(delta ** 2 - 4 * det_g, 0, None)))
                    / 2.0, 0, None)
        )
        delta_pt = det_a + det_b - 2.0 * e * f
        nu_minus_pt = np.sqrt(
            np.clip((delta_pt
                     - np.sqrt(np.clip(delta_pt ** 2 - 4 * det_g, 0, None)))
                    / 2.0, 0, None)
        )
    physical = np.nan_to_num(nu_minus, nan=-1.0) >= 1.0 - NU_TOLERANCE
    violating = np.nan_to_num(nu_minus_pt, nan=1.0) < 1.0 - NU_TOLERANCE
    return physical, physical & violating


def momentum_window_scan(
    width: float,
    cfg: ThermalFieldConfig,
    temperature: float | None = None,
    cap: int = 4096,
) -> WindowScanResult:
    """Scan l_max = 1, 2, ... for entangled truncated-top-hat states.

    dk_min is the first mode count whose prepared state is both physical
    and entangled; dk_max the last one before entanglement disappears.
    Entanglement still present at the cap raises the open-window flag,
    which is an answer, not an error.
    """
    if temperature is None:
        temperature = cfg.temperature
    cfg_t = cfg.with_temperature(temperature)
    _, entangled = _truncated_tophat_indicators(width, cfg_t, cap)
    hits = np.nonzero(entangled)[0]
    if len(hits) == 0:
        return WindowScanResult(
            width=width, temperature=temperature, found=False,
            dk_min=None, dk_max=None, open_window=False,
        )
    first = int(hits[0])
    gaps = np.nonzero(~entangled[first:])[0]
    if len(gaps) == 0:
        return WindowScanResult(
            width=width, temperature=temperature, found=True,
            dk_min=first + 1, dk_max=cap, open_window=True,
        )
    return WindowScanResult(
        width=width, temperature=temperature, found=True,
        dk_min=first + 1, dk_max=first + int(gaps[0]), open_window=False,
    )


@dataclass(frozen=True)
class TcResult:
    """Critical temperature of one geometry.

    ``status`` is "ok", "not-entangled-at-zero" (t_c is 0) or "unbounded"
    (entanglement survives past the temperature cap; t_c is inf).
    """

    width: float
    route: str
    t_c: float
    status: str


def _gaussian_entangled_at(width, cfg, temperature, trunc, gate):
    region_r, region_q = symmetric_regions(width, 0.0, cfg)
    profile = DetectorProfile(kind=ProfileKind.GAUSSIAN_MODULATED)
    mv_r, mv_q, _, _ = prepare_mode_pair(
        region_r, region_q, profile, trunc, cfg, residual_gate=gate
    )
    report = assemble_cm(
        mv_r, mv_q, cfg.with_temperature(temperature), trunc,
        residual_gate=gate,
    )
    report.require_verdict_grade()
    return separability_test(report.cm).verdict is Verdict.ENTANGLED


def critical_temperature(
    width: float,
    cfg: ThermalFieldConfig,
    route: str = "top_hat",
    trunc: TruncationSpec | None = None,
    cap: int = 4096,
    rel_width: float = 1e-3,
    t_cap: float = 1e6,
) -> TcResult:
    """Bisection on temperature of the entanglement indicator.

    The top-hat route re-optimizes the momentum window at every
    temperature (entangled means any l_max up to ``cap`` works); the
    gaussian route uses the orthogonalized pipeline at fixed truncation.
    """
    if route == "top_hat":
        def indicator(temp):
            return momentum_window_scan(width, cfg, temp, cap).found
    elif route == "gaussian":
        trunc_eff = trunc if trunc is not None else TruncationSpec()

        def indicator(temp):
            return _gaussian_entangled_at(
                width, cfg, temp, trunc_eff, DEFAULT_RESIDUAL_GATE
            )
    else:
        raise ValidationError(f"unknown critical-temperature route {route!r}")

    if not indicator(0.0):
        return TcResult(width=width, route=route, t_c=0.0,
                        status="not-entangled-at-zero")
    lo, hi = 0.0, 1.0
    while indicator(hi):
        lo = hi
        hi *= 2.0
        if hi > t_cap:
            return TcResult(width=width, route=route, t_c=math.inf,
                            status="unbounded")
    # one sample above the bracket guards against a non-monotone indicator
    if 2.0 * hi <= t_cap and indicator(2.0 * hi):
        raise NumericalError(
            f"entanglement indicator is non-monotone around the bracket "
            f"[{lo}, {hi}] (re-entrant at {2.0 * hi}); refusing to bisect"
        )
    while (hi - lo) > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if indicator(mid):
            lo = mid
        else:
            hi = mid
    return TcResult(width=width, route=route, t_c=0.5 * (lo + hi), status="ok")


def fit_power_law(points) -> tuple[float, float, float]:
    """Least-squares line in log-log coordinates.

    Returns (exponent, amplitude, rms log residual) for y = amplitude *
    x**exponent.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValidationError(f"power-law fit needs >= 3 points, got {len(pts)}")
    if any(x <= 0 or y <= 0 or not np.isfinite([x, y]).all() for x, y in pts):
        raise ValidationError("power-law fit needs positive finite data")
    log_x = np.log([x for x, _ in pts])
    log_y = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(log_x, log_y, 1)
    resid = log_y - (slope * log_x + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return float(slope), float(math.exp(intercept)), rms


@dataclass(frozen=True)
class CriticalTemperatureCurve:
    """T_C against region width with its fitted power law."""

    route: str
    results: tuple
    exponent: float
    amplitude: float
    fit_residual: float

    @property
    def points(self):
        return [(r.width, r.t_c) for r in self.results]


def critical_temperature_curve(
    widths,
    cfg: ThermalFieldConfig,
    route: str = "top_hat",
    **kwargs,
) -> CriticalTemperatureCurve:
    """Critical temperature over a set of widths plus the power-law fit."""
    results = tuple(
        critical_temperature(w, cfg, route=route, **kwargs) for w in widths
    )
    usable = [(r.width, r.t_c) for r in results
              if r.status == "ok" and r.t_c > 0]
    if len(usable) < 6:
        raise ValidationError(
            f"critical-temperature curve needs >= 6 usable points, "
            f"got {len(usable)}"
        )
    exponent, amplitude, resid = fit_power_law(usable)
    return CriticalTemperatureCurve(
        route=route,
        results=results,
        exponent=exponent,
        amplitude=amplitude,
        fit_residual=resid,
    )
