"""The two radial correlation experiments and their rate predictions.

Layout conventions: mode 1 passes the polarizer, reflects at the mirror
radius x_m and returns to detector 1; mode 2 reflects at the polarizer
radius x_p and returns to detector 2. All radii, times and phases are in
meters with c = 1.

Phase differences and the decorrelation offset are computed in reduced
forms with the large radii cancelled analytically, so they are free of
catastrophic cancellation and independent of the arbitrary initial time.
By default the far-field idealization is applied, as in the source
analysis of the problem: detectors on the satellite layout are treated as
exactly at-rest far-field points, giving delta = 2 M ln(x_p / x_m) for
the satellite layout and M ln(x_p / x_m) for the split ground/orbit one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.optimize import brentq

from . import formalism as fm
from .errors import ConvergenceError, DomainError
from .geometry import (
    RadialInterval,
    SchwarzschildBackground,
    proper_time_excess,
    proper_time_radial,
)
from .spectra import EventSmearing, GaussianSpectrum, Spectrum, overlap_alpha, overlap_chi, smearing_factor

VARIANT_FIG3 = "satellite_both"
VARIANT_FIG4 = "split_ground_orbit"

DEFAULT_K0 = 8.0e6  # m^-1, near-infrared carrier
DEFAULT_SIGMA_K = 1.0e4  # m^-1

PLACEMENT_RESIDUAL_TOL = 1e-9  # meters


@dataclass(frozen=True)
class ExperimentLayout:
    variant: str
    x_m: float
    x_p: float
    x_d1: float
    x_d2: float
    t_d1: float
    t_d2: float
    source_radius: float

    def __post_init__(self):
        if self.variant not in (VARIANT_FIG3, VARIANT_FIG4):
            raise DomainError(f"unknown variant {self.variant!r}")
        for name in ("x_m", "x_p", "x_d1", "x_d2", "source_radius"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive")
        if self.x_m > self.x_p:
            raise DomainError(f"need x_m <= x_p, got {self.x_m} > {self.x_p}")
        if self.variant == VARIANT_FIG3 and self.x_p > min(self.x_d1, self.x_d2):
            raise DomainError("satellite layout needs x_p <= both detector radii")


@dataclass(frozen=True)
class BoundaryPhases:
    phi1_minus: float
    phi2_minus: float
    phi1_plus: float
    phi2_plus: float


@dataclass(frozen=True)
class GeodesicTrace:
    t_i: float
    x_i1: float
    x_i2: float
    tau_1: float
    tau_2: float
    tau_1_approx: float
    tau_2_approx: float


@dataclass(frozen=True)
class CorrelationReport:
    n1: float
    n2: float
    C: float
    delta: float
    smearing_factor: float
    formalism: str
    truncation_note: str

    def to_dict(self) -> dict:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "C": self.C,
            "delta": self.delta,
            "smearing_factor": self.smearing_factor,
            "formalism": self.formalism,
            "truncation_note": self.truncation_note,
        }


def _check_radii(layout: ExperimentLayout, bg: SchwarzschildBackground):
    horizon = bg.horizon_radius
    for name in ("x_m", "x_p", "x_d1", "x_d2", "source_radius"):
        r = getattr(layout, name)
        if r <= horizon:
            raise DomainError(f"{name} = {r} is at or inside the horizon 2M = {horizon}")


def boundary_phases(layout: ExperimentLayout, bg: SchwarzschildBackground) -> BoundaryPhases:
    """Return-path phase constants from continuity at detectors and reflectors."""
    _check_radii(layout, bg)
    m = bg.mass_length

    def ln(r):
        return math.log(r) if m > 0.0 else 0.0

    phi1_plus = layout.t_d1 - layout.x_d1 - 2.0 * m * ln(layout.x_d1)
    phi2_plus = layout.t_d2 - layout.x_d2 - 2.0 * m * ln(layout.x_d2)
    phi1_minus = 2.0 * layout.x_m + 4.0 * m * ln(layout.x_m) + phi1_plus
    phi2_minus = 2.0 * layout.x_p + 4.0 * m * ln(layout.x_p) + phi2_plus
    return BoundaryPhases(phi1_minus, phi2_minus, phi1_plus, phi2_plus)


def modal_phase_mismatch(
    layout: ExperimentLayout, bg: SchwarzschildBackground, far_field: bool = True
) -> float:
    """phi1_minus - phi2_minus, computed without large-radius cancellation.

    Under the far-field idealization the detector curvature term
    2M ln(x_d2 / x_d1) is dropped for the satellite layout, where both
    detectors sit far from the body; the split layout keeps it since its
    detectors are at the reflector heights.
    """
    _check_radii(layout, bg)
    m = bg.mass_length
    delta = (
        2.0 * (layout.x_m - layout.x_p)
        + (layout.x_d2 - layout.x_d1)
        + (layout.t_d1 - layout.t_d2)
        + 4.0 * m * math.log(layout.x_m / layout.x_p)
    )
    if not (far_field and layout.variant == VARIANT_FIG3):
        delta += 2.0 * m * math.log(layout.x_d2 / layout.x_d1)
    return delta


def _initial_points(layout: ExperimentLayout, bg: SchwarzschildBackground, t_i: float):
    bp = boundary_phases(layout, bg)
    x_i1 = -t_i + bp.phi1_minus
    x_i2 = -t_i + bp.phi2_minus
    return x_i1, x_i2


def geodesic_trace(
    layout: ExperimentLayout, bg: SchwarzschildBackground, t_i: float
) -> GeodesicTrace:
    """Back-propagated initial points and shell-frame propagation times."""
    x_i1, x_i2 = _initial_points(layout, bg, t_i)
    if x_i1 < layout.x_m or x_i2 < layout.x_p:
        raise DomainError(
            f"t_i = {t_i} places an initial point inside a reflector "
            f"(x_i1 = {x_i1}, x_i2 = {x_i2})"
        )
    m = bg.mass_length
    tau_1 = proper_time_radial(RadialInterval(layout.x_m, layout.x_d1), bg) + proper_time_radial(
        RadialInterval(layout.x_m, x_i1), bg
    )
    tau_2 = proper_time_radial(RadialInterval(layout.x_p, layout.x_d2), bg) + proper_time_radial(
        RadialInterval(layout.x_p, x_i2), bg
    )
    tau_1_approx = -t_i + layout.t_d1 - m * math.log(layout.x_d1 * x_i1 / layout.x_m**2)
    tau_2_approx = -t_i + layout.t_d2 - m * math.log(layout.x_d2 * x_i2 / layout.x_p**2)
    return GeodesicTrace(t_i, x_i1, x_i2, tau_1, tau_2, tau_1_approx, tau_2_approx)


def _reference_t_i(layout: ExperimentLayout) -> float:
    span = 8.0 * max(layout.x_d1, layout.x_d2, layout.x_p)
    return min(layout.t_d1, layout.t_d2) - span


def delta_offset(
    layout: ExperimentLayout,
    bg: SchwarzschildBackground,
    mode: str = "far_field",
) -> float:
    """Difference of event phases (t_d1 - tau_1) - (t_d2 - tau_2).

    ``mode`` selects the evaluation route: "far_field" (default, the
    source analysis's idealization), "exact_log" (the full weak-field log
    expression), or "quadrature" (exact shell-frame integrals in reduced,
    cancellation-safe form).
    """
    _check_radii(layout, bg)
    m = bg.mass_length
    if m == 0.0:
        return 0.0
    if mode == "far_field":
        coeff = 2.0 if layout.variant == VARIANT_FIG3 else 1.0
        return coeff * m * math.log(layout.x_p / layout.x_m)

    t_i = _reference_t_i(layout)
    x_i1, x_i2 = _initial_points(layout, bg, t_i)
    gap = modal_phase_mismatch(layout, bg, far_field=False)  # x_i1 - x_i2, reduced form
    if mode == "exact_log":
        return m * (
            math.log(layout.x_d1 / layout.x_d2)
            + math.log1p(gap / x_i2)
            + 2.0 * math.log(layout.x_p / layout.x_m)
        )
    if mode == "quadrature":
        linear = (layout.x_d1 - layout.x_d2) + gap + 2.0 * (layout.x_p - layout.x_m)
        excess = (
            proper_time_excess(layout.x_d1, bg)
            + proper_time_excess(x_i1, bg)
            - 2.0 * proper_time_excess(layout.x_m, bg)
            - proper_time_excess(layout.x_d2, bg)
            - proper_time_excess(x_i2, bg)
            + 2.0 * proper_time_excess(layout.x_p, bg)
        )
        return (layout.t_d1 - layout.t_d2) - (linear + excess)
    raise DomainError(f"unknown delta mode {mode!r}")


def _matching_residual_sep(
    layout: ExperimentLayout,
    bg: SchwarzschildBackground,
    entangled: bool,
    sep: float,
    far_field: bool = True,
) -> float:
    """Detector-placement matching condition for separation x_d2 - x_d1 = sep.

    Kept in terms of the separation itself (log1p of the ratio) so the
    residual is meaningful well below the float spacing of the radii.
    Under the far-field idealization the detector-curvature term drops and
    the classical and entangled conditions coincide.
    """
    m = bg.mass_length
    base = 2.0 * (layout.x_p - layout.x_m)
    correction = 4.0 * m * math.log(layout.x_p / layout.x_m)
    if not entangled and not far_field:
        correction -= 2.0 * m * math.log1p(sep / layout.x_d1)
    return base + correction - sep


def matching_residual(
    layout: ExperimentLayout,
    bg: SchwarzschildBackground,
    entangled: bool,
    far_field: bool = True,
) -> float:
    """Matching-condition residual of an already placed layout, in meters."""
    return _matching_residual_sep(
        layout, bg, entangled, layout.x_d2 - layout.x_d1, far_field
    )


def place_detectors(
    layout: ExperimentLayout,
    bg: SchwarzschildBackground,
    source: fm.SourceModel,
    far_field: bool = True,
) -> ExperimentLayout:
    """Solve the modal matching condition for the free detector coordinate.

    Satellite layout: simultaneous detection, solve for the detector
    separation x_d2 - x_d1. Split layout: detectors fixed at the
    reflector radii, solve for the detection-time offset t_d2 - t_d1.

    With far_field=True (the default, satellite layout only) the
    detector-curvature log is neglected, so the classical and
    entangled conditions coincide; far_field=False keeps the exact
    classical condition for coherent-state sources. The same flag
    must be passed to predict() so the placement and the reported
    modal mismatch stay consistent.
    """
    _check_radii(layout, bg)
    entangled = source.kind == "parametric"
    m = bg.mass_length

    if layout.variant == VARIANT_FIG3:
        if layout.t_d1 != layout.t_d2:
            raise DomainError("satellite layout placement assumes t_d1 = t_d2")
        flat = 2.0 * (layout.x_p - layout.x_m)

        def residual(sep):
            return _matching_residual_sep(layout, bg, entangled, sep, far_field)

        lo = flat - 1.0
        hi = flat + max(1.0, 1.0e4 * m)
        if residual(lo) * residual(hi) > 0.0:
            raise ConvergenceError("placement bracket does not straddle the matching condition")
        sep = brentq(residual, lo, hi, xtol=1e-12, maxiter=200)
        if abs(residual(sep)) > PLACEMENT_RESIDUAL_TOL:
            raise ConvergenceError("placement residual exceeds 1e-9 m")
        return replace(layout, x_d2=layout.x_d1 + sep)

    # Split layout: modal matching fixes the detection-time offset.
    def residual_t(offset):
        return modal_phase_mismatch(replace(layout, t_d2=layout.t_d1 + offset), bg, far_field=False)

    span = 2.0 * (layout.x_p - layout.x_m) + 1.0
    lo, hi = -span, span
    if residual_t(lo) * residual_t(hi) > 0.0:
        raise ConvergenceError("time-offset bracket does not straddle the matching condition")
    offset = brentq(residual_t, lo, hi, xtol=1e-12, maxiter=200)
    placed = replace(layout, t_d2=layout.t_d1 + offset)
    if abs(residual_t(offset)) > PLACEMENT_RESIDUAL_TOL:
        raise ConvergenceError("placement residual exceeds 1e-9 m")
    return placed


def predict(
    layout: ExperimentLayout,
    bg: SchwarzschildBackground,
    source: fm.SourceModel,
    smearing: EventSmearing,
    formalism: str,
    *,
    spectrum: Spectrum | None = None,
    far_field: bool = True,
    swap_paths: bool = False,
    weak: bool = False,
    delta_mode: str | None = None,
) -> CorrelationReport:
    """End-to-end singles and coincidence rates for the given layout.

    ``swap_paths`` applies the reversal step: each mode is resent along
    the other's path before detection, which symmetrizes the accumulated
    local times and restores the flat-space correlations. The coincidence
    reported is the leading-order pair amplitude squared; for parametric
    sources the O(chi^4) accidental term is dropped and noted.
    """
    if formalism not in (fm.MODE, fm.EVENT):
        raise DomainError(f"unknown formalism {formalism!r}")
    _check_radii(layout, bg)
    g = spectrum if spectrum is not None else GaussianSpectrum(DEFAULT_K0, DEFAULT_SIGMA_K)
    pump = source.pump if source.pump is not None else g

    if delta_mode is None:
        delta_mode = "far_field" if far_field else "quadrature"
    delta = delta_offset(layout, bg, mode=delta_mode)
    gap = modal_phase_mismatch(layout, bg, far_field=far_field)
    if swap_paths:
        delta = 0.0
        gap = 0.0

    # Phases relative to the pump: a matched pump (phi_c None) locks onto
    # arm 1's return phase.
    if source.phi_c is None:
        p1, p2 = 0.0, -gap
    else:
        bp = boundary_phases(layout, bg)
        p1 = bp.phi1_minus - source.phi_c
        p2 = bp.phi2_minus - source.phi_c
        if swap_paths:
            p1 = p2 = 0.5 * (p1 + p2)

    theta1, theta2 = delta, 0.0
    ctx = fm.ContractionContext.from_spectra(g, smearing, formalism)
    x1 = fm.detector_mode(1, p1, theta1, formalism)
    x2 = fm.detector_mode(2, p2, theta2, formalism)

    if source.kind == "identity":
        note = "vacuum input"
    elif source.kind == "displacement":
        src0 = replace(source, phi_c=0.0)
        x1 = fm.apply_displacement(x1, src0, g, p1)
        x2 = fm.apply_displacement(x2, src0, g, p2)
        note = "exact for displacement sources"
    elif source.kind == "parametric":
        chi_1 = overlap_chi(g, pump, p1, source.chi_max)
        chi_2 = overlap_chi(g, pump, p2, source.chi_max)
        x1, x2 = fm.apply_parametric(x1, x2, source, (chi_1, chi_2), pump_phase=0.0, weak=weak)
        note = "leading order in chi; O(chi^4) accidentals dropped"
    else:  # pragma: no cover - guarded by SourceModel
        raise DomainError(f"unknown source kind {source.kind!r}")

    n1 = fm.vacuum_singles(x1, ctx)
    n2 = fm.vacuum_singles(x2, ctx)
    coincidence = fm.vacuum_coincidence(x1, x2, ctx, order="leading")
    smear = smearing_factor(smearing, delta) if formalism == fm.EVENT else 1.0
    return CorrelationReport(
        n1=n1,
        n2=n2,
        C=coincidence,
        delta=delta,
        smearing_factor=smear,
        formalism=formalism,
        truncation_note=note,
    )


def threshold_height(
    bg: SchwarzschildBackground,
    smearing: EventSmearing,
    variant: str,
    r_base: float,
) -> float:
    """Polarizer height h at which delta(h) = 2 d_t (significant decorrelation)."""
    m = bg.mass_length
    if m <= 0.0:
        raise DomainError("threshold is undefined in flat space")
    if r_base <= bg.horizon_radius:
        raise DomainError(f"r_base = {r_base} is at or inside the horizon")
    coeff = 2.0 if variant == VARIANT_FIG3 else 1.0
    if variant not in (VARIANT_FIG3, VARIANT_FIG4):
        raise DomainError(f"unknown variant {variant!r}")
    target = 2.0 * smearing.d_t

    def residual(h):
        return coeff * m * math.log1p(h / r_base) - target

    h_guess = r_base * math.expm1(target / (coeff * m))
    lo, hi = 0.0, 4.0 * h_guess + 1.0
    if residual(hi) <= 0.0:
        raise ConvergenceError("threshold bracket failed")
    return brentq(residual, lo, hi, xtol=1e-9, rtol=1e-14, maxiter=200)


def alpha_for_layout(
    layout: ExperimentLayout,
    bg: SchwarzschildBackground,
    source: fm.SourceModel,
    spectrum: Spectrum | None = None,
    far_field: bool = True,
) -> tuple[complex, complex]:
    """Displacement amplitudes (alpha_1, alpha_2) seen by the two arms."""
    g = spectrum if spectrum is not None else GaussianSpectrum(DEFAULT_K0, DEFAULT_SIGMA_K)
    pump = source.pump if source.pump is not None else g
    gap = modal_phase_mismatch(layout, bg, far_field=far_field)
    if source.phi_c is None:
        p1, p2 = 0.0, -gap
    else:
        bp = boundary_phases(layout, bg)
        p1 = bp.phi1_minus - source.phi_c
        p2 = bp.phi2_minus - source.phi_c
    return (
        overlap_alpha(g, pump, p1, source.alpha_max),
        overlap_alpha(g, pump, p2, source.alpha_max),
    )
