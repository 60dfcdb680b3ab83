"""Heisenberg-picture detector expansions and vacuum expectation values.

Detector operators are kept in affine form: a complex displacement plus a
sum of labeled annihilation/creation terms, each carrying a modal phase
(the exp(i k phase) argument) and an event phase (the exp(i Omega phase)
argument). One contraction engine serves both formalisms: under the mode
formalism the Omega overlap is identically 1, under the event formalism it
is the smearing characteristic function of the event-phase difference.
Expectation values over the vacuum follow from Wick contractions, which
are exact for this affine class.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import RegimeError, UnsupportedError
from .spectra import EventSmearing, GaussianSpectrum, Spectrum, overlap_alpha, same_time_commutator

MODE = "mode"
EVENT = "event"
WEAK_CHI_CAP = 0.2

ANNIHILATION = "a"
CREATION = "adag"


@dataclass(frozen=True)
class InputLabel:
    """Identity of an input line: polarization mode id plus formalism tag."""

    mode_id: int
    formalism: str = MODE


@dataclass(frozen=True)
class Term:
    label: InputLabel
    kind: str  # ANNIHILATION or CREATION
    spectral_phase: float
    event_phase: float
    coefficient: complex

    def dagger(self) -> "Term":
        return replace(
            self,
            kind=CREATION if self.kind == ANNIHILATION else ANNIHILATION,
            coefficient=self.coefficient.conjugate(),
        )


@dataclass(frozen=True)
class HeisenbergExpansion:
    """Affine expansion of a detector operator over labeled inputs."""

    terms: tuple[Term, ...] = ()
    displacement: complex = 0j

    def dagger(self) -> "HeisenbergExpansion":
        return HeisenbergExpansion(
            terms=tuple(t.dagger() for t in self.terms),
            displacement=self.displacement.conjugate(),
        )

    def scaled(self, factor: complex) -> "HeisenbergExpansion":
        return HeisenbergExpansion(
            terms=tuple(replace(t, coefficient=t.coefficient * factor) for t in self.terms),
            displacement=self.displacement * factor,
        )


def detector_mode(
    mode_id: int,
    spectral_phase: float,
    event_phase: float = 0.0,
    formalism: str = MODE,
) -> HeisenbergExpansion:
    """Plain detector annihilation operator for one input mode."""
    label = InputLabel(mode_id=mode_id, formalism=formalism)
    return HeisenbergExpansion(
        terms=(Term(label, ANNIHILATION, spectral_phase, event_phase, 1.0 + 0j),)
    )


@dataclass(frozen=True)
class SourceModel:
    """Source unitary acting at the input: identity, displacement, or parametric."""

    kind: str  # "identity" | "displacement" | "parametric"
    alpha_max: complex = 0j
    chi_max: float = 0.0
    phi_c: float | None = None  # None: pump locked to the matched phase
    pump: Spectrum | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "displacement", "parametric"):
            raise UnsupportedError(f"unknown source kind {self.kind!r}")
        if self.kind == "parametric" and abs(self.chi_max) > WEAK_CHI_CAP:
            raise RegimeError(
                f"chi_max = {self.chi_max} exceeds the weak-regime cap {WEAK_CHI_CAP}"
            )


@dataclass(frozen=True)
class ContractionContext:
    """Overlap kernels used to contract pairs of input operators.

    ``k_overlap(dphi)`` is the same-time commutator of the shared spectral
    shape at modal phase difference ``dphi``; ``omega_overlap(dtheta)`` is
    the characteristic function of the smearing density at event-phase
    difference ``dtheta`` (ignored under the mode formalism).
    """

    formalism: str
    k_overlap: Callable[[float], complex]
    omega_overlap: Callable[[float], complex] = field(default=lambda _d: 1.0 + 0j)

    @classmethod
    def from_spectra(
        cls,
        g: Spectrum,
        smearing: EventSmearing | None,
        formalism: str,
    ) -> "ContractionContext":
        if formalism == EVENT:
            if smearing is None:
                raise UnsupportedError("event formalism requires an EventSmearing")
            return cls(
                formalism=EVENT,
                k_overlap=lambda d: same_time_commutator(g, d),
                omega_overlap=lambda d: complex(smearing.characteristic(d)),
            )
        return cls(formalism=MODE, k_overlap=lambda d: same_time_commutator(g, d))

    @classmethod
    def from_grids(
        cls,
        k_values: Sequence[float],
        k_weights: Sequence[complex],
        omega_values: Sequence[float],
        omega_weights: Sequence[complex],
        formalism: str,
    ) -> "ContractionContext":
        """Discrete-sum kernels matching a binned (k, Omega) model."""
        kv = np.asarray(k_values, dtype=float)
        kw = np.asarray(k_weights, dtype=complex)
        ov = np.asarray(omega_values, dtype=float)
        ow = np.asarray(omega_weights, dtype=complex)

        def k_overlap(d: float) -> complex:
            return complex(np.sum(np.abs(kw) ** 2 * np.exp(1j * kv * d)))

        if formalism == EVENT:

            def omega_overlap(d: float) -> complex:
                return complex(np.sum(np.abs(ow) ** 2 * np.exp(1j * ov * d)))

            return cls(formalism=EVENT, k_overlap=k_overlap, omega_overlap=omega_overlap)
        return cls(formalism=MODE, k_overlap=k_overlap)


def _contract(a: Term, b: Term, ctx: ContractionContext) -> complex:
    """Ordered two-point function <0| a b |0> including both coefficients."""
    if a.kind != ANNIHILATION or b.kind != CREATION:
        return 0j
    if a.label.mode_id != b.label.mode_id:
        return 0j
    value = ctx.k_overlap(a.spectral_phase - b.spectral_phase)
    if ctx.formalism == EVENT:
        value *= ctx.omega_overlap(a.event_phase - b.event_phase)
    return a.coefficient * b.coefficient * value


def _vacuum_product(factors: list[HeisenbergExpansion], ctx: ContractionContext) -> complex:
    """<0| f_1 f_2 ... f_n |0> for affine factors, by Wick recursion."""
    if not factors:
        return 1.0 + 0j
    head, rest = factors[0], factors[1:]
    total = head.displacement * _vacuum_product(rest, ctx)
    for j, other in enumerate(rest):
        pair = 0j
        for ta in head.terms:
            for tb in other.terms:
                pair += _contract(ta, tb, ctx)
        if pair != 0j:
            total += pair * _vacuum_product(rest[:j] + rest[j + 1 :], ctx)
    return total


def vacuum_singles(x: HeisenbergExpansion, ctx: ContractionContext) -> float:
    """<0| x^dag x |0>."""
    return float(_vacuum_product([x.dagger(), x], ctx).real)


def vacuum_coincidence(
    x1: HeisenbergExpansion,
    x2: HeisenbergExpansion,
    ctx: ContractionContext,
    order: str = "full",
) -> float:
    """<0| x1^dag x2^dag x2 x1 |0>.

    ``order="full"`` evaluates the exact affine expectation. ``order="leading"``
    returns |<0| x2 x1 |0>|^2, the pair-amplitude contribution alone (it
    drops the O(chi^4) accidental-coincidence pairing for parametric sources
    and is exact for pure displacements).
    """
    if order == "leading":
        amp = _vacuum_product([x2, x1], ctx)
        return float(abs(amp) ** 2)
    if order != "full":
        raise UnsupportedError(f"unknown order {order!r}")
    return float(_vacuum_product([x1.dagger(), x2.dagger(), x2, x1], ctx).real)


def apply_displacement(
    x: HeisenbergExpansion,
    src: SourceModel,
    g: Spectrum,
    phase_plus: float,
) -> HeisenbergExpansion:
    """Add the matched displacement amplitude; operator content is untouched."""
    if src.kind != "displacement":
        raise UnsupportedError(f"apply_displacement needs a displacement source, got {src.kind!r}")
    pump = src.pump if src.pump is not None else g
    phi_c = 0.0 if src.phi_c is None else src.phi_c
    alpha = overlap_alpha(g, pump, phase_plus - phi_c, src.alpha_max)
    return replace(x, displacement=x.displacement + alpha)


def _shared_event_phase(x: HeisenbergExpansion) -> float:
    phases = {t.event_phase for t in x.terms}
    if len(phases) != 1:
        raise UnsupportedError("parametric source needs a single detection event phase per arm")
    return phases.pop()


def _partner_mode(x: HeisenbergExpansion, other: HeisenbergExpansion) -> int:
    modes = {t.label.mode_id for t in other.terms}
    if len(modes) != 1:
        raise UnsupportedError("parametric source couples exactly two labeled modes")
    return modes.pop()


def apply_parametric(
    x1: HeisenbergExpansion,
    x2: HeisenbergExpansion,
    src: SourceModel,
    overlaps: tuple[complex, complex],
    pump_phase: float | None = None,
    weak: bool = False,
) -> tuple[HeisenbergExpansion, HeisenbergExpansion]:
    """Two-mode squeezing evolution with mode-mismatched gains.

    Each arm picks up cosh(chi_max) on its own operator plus a creation
    term on the partner mode carrying the pump phase and the arm's own
    detection event phase. With ``weak`` the coefficients are truncated to
    (1, chi_j).
    """
    if src.kind != "parametric":
        raise UnsupportedError(f"apply_parametric needs a parametric source, got {src.kind!r}")
    chi_1, chi_2 = overlaps
    if pump_phase is not None:
        phi_c = pump_phase
    else:
        phi_c = 0.0 if src.phi_c is None else src.phi_c
    cosh = 1.0 if weak else math.cosh(src.chi_max)

    def evolve(x, partner, chi_j):
        # The phase of the effective gain rides on the pair-creation
        # coefficient; only its magnitude enters the hyperbolic gain.
        if weak:
            sinh_j = chi_j
        else:
            mag = abs(chi_j)
            unit = chi_j / mag if mag > 0.0 else 1.0
            sinh_j = unit * math.sinh(mag)
        partner_label = InputLabel(
            mode_id=_partner_mode(x, partner),
            formalism=partner.terms[0].label.formalism,
        )
        new_terms = tuple(replace(t, coefficient=t.coefficient * cosh) for t in x.terms)
        partner_term = Term(
            label=partner_label,
            kind=CREATION,
            spectral_phase=phi_c,
            event_phase=_shared_event_phase(x),
            coefficient=complex(sinh_j),
        )
        return HeisenbergExpansion(
            terms=new_terms + (partner_term,), displacement=x.displacement
        )

    return evolve(x1, x2, chi_1), evolve(x2, x1, chi_2)


def matched_gaussian_context(
    k0: float,
    sigma_k: float,
    smearing: EventSmearing | None,
    formalism: str,
) -> ContractionContext:
    """Convenience wrapper for the common Gaussian-spectrum setup."""
    return ContractionContext.from_spectra(GaussianSpectrum(k0, sigma_k), smearing, formalism)
