"""Spectral distributions over wave number k and the detection-event smearing.

A spectrum holds a normalized amplitude G(k) with unit integral of |G|^2.
Gaussian spectra take the analytic path for every overlap; grid spectra
integrate by the trapezoidal rule on their sample points. The event
smearing J(Omega) is Gaussian with temporal scale d_t (meters, c = 1);
its normalized density has the characteristic function exp(-delta^2 / (8 d_t^2)),
so the squared modulus entering coincidence rates is exp(-delta^2 / (4 d_t^2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

NORMALIZATION_TOL = 1e-9
NEGATIVE_K_TOL = 1e-12
_GAUSS_GRID_HALF_WIDTH = 8.0  # sigmas
_GAUSS_GRID_POINTS = 4001


class Spectrum:
    """Base class for normalized spectral mode distributions."""

    def amplitude(self, k: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_grid(self) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianSpectrum(Spectrum):
    """G(k) = (2 pi sigma_k^2)^(-1/4) exp(-(k - k0)^2 / (4 sigma_k^2))."""

    k0: float
    sigma_k: float

    def __post_init__(self):
        if self.sigma_k <= 0.0:
            raise DomainError(f"sigma_k must be positive, got {self.sigma_k}")
        if self.k0 < 6.0 * self.sigma_k:
            raise DomainError(
                f"k0 = {self.k0} must be >= 6 sigma_k = {6.0 * self.sigma_k} so the "
                "negative-k mass is negligible"
            )

    def amplitude(self, k: np.ndarray) -> np.ndarray:
        norm = (2.0 * math.pi * self.sigma_k**2) ** -0.25
        return norm * np.exp(-((k - self.k0) ** 2) / (4.0 * self.sigma_k**2))

    def sample_grid(self) -> np.ndarray:
        half = _GAUSS_GRID_HALF_WIDTH * self.sigma_k
        return np.linspace(self.k0 - half, self.k0 + half, _GAUSS_GRID_POINTS)


@dataclass(frozen=True)
class GridSpectrum(Spectrum):
    """Tabulated complex amplitude on an ascending k grid, renormalized on build."""

    k_samples: np.ndarray
    amplitudes: np.ndarray
    normalization_factor: float = field(init=False, default=1.0)

    def __post_init__(self):
        k = np.asarray(self.k_samples, dtype=float)
        amp = np.asarray(self.amplitudes, dtype=complex)
        if k.ndim != 1 or k.size < 3:
            raise DomainError("grid spectrum needs at least 3 samples")
        if amp.shape != k.shape:
            raise DomainError("k_samples and amplitudes must have matching shapes")
        if np.any(np.diff(k) <= 0.0):
            raise DomainError("k_samples must be strictly ascending")
        total = float(np.trapezoid(np.abs(amp) ** 2, k))
        if total <= 0.0:
            raise DomainError("grid spectrum has zero power")
        neg = k < 0.0
        if np.any(neg):
            neg_mass = float(np.trapezoid(np.where(neg, np.abs(amp) ** 2, 0.0), k))
            if neg_mass > NEGATIVE_K_TOL * total:
                raise DomainError(
                    f"negative-k mass fraction {neg_mass / total:.3e} exceeds {NEGATIVE_K_TOL}"
                )
        factor = 1.0 / math.sqrt(total)
        object.__setattr__(self, "k_samples", k)
        object.__setattr__(self, "amplitudes", amp * factor)
        object.__setattr__(self, "normalization_factor", factor)

    def amplitude(self, k: np.ndarray) -> np.ndarray:
        re = np.interp(k, self.k_samples, self.amplitudes.real, left=0.0, right=0.0)
        im = np.interp(k, self.k_samples, self.amplitudes.imag, left=0.0, right=0.0)
        return re + 1j * im

    def sample_grid(self) -> np.ndarray:
        return self.k_samples


def load_grid_spectrum(path) -> GridSpectrum:
    """Read a grid spectrum from text: one sample per line, ``k re im``.

    The imaginary column may be omitted (taken as zero) and ``re,im`` with a
    comma is accepted. Lines starting with ``#`` are ignored.
    """
    ks, amps = [], []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].replace(",", " ").strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise DomainError(f"bad spectrum line: {raw.rstrip()!r}")
            ks.append(float(parts[0]))
            re = float(parts[1])
            im = float(parts[2]) if len(parts) == 3 else 0.0
            amps.append(complex(re, im))
    return GridSpectrum(np.array(ks), np.array(amps))


@dataclass(frozen=True)
class SinglePhotonProfile:
    """Amplitude nu(k) of a one-photon state, normalized as a spectrum."""

    nu: Spectrum


@dataclass(frozen=True)
class EventSmearing:
    """Gaussian temporal smearing with scale d_t (meters, c = 1)."""

    d_t: float

    def __post_init__(self):
        if self.d_t <= 0.0:
            raise DomainError(f"d_t must be positive, got {self.d_t}")

    def characteristic(self, delta: float) -> float:
        """Characteristic function of the normalized density |J|^2."""
        return math.exp(-(delta**2) / (8.0 * self.d_t**2))


def _merged_grid(g: Spectrum, h: Spectrum) -> np.ndarray:
    grid = np.union1d(g.sample_grid(), h.sample_grid())
    return grid


def _mode_overlap(g: Spectrum, h: Spectrum, mismatch: float) -> complex:
    """integral dk G(k) H(k)* exp(i k mismatch)."""
    if isinstance(g, GaussianSpectrum) and isinstance(h, GaussianSpectrum):
        # Product of two Gaussian amplitudes integrates in closed form; the
        # k > 0 truncation is negligible under the k0 >= 6 sigma invariant.
        a = 1.0 / (4.0 * g.sigma_k**2) + 1.0 / (4.0 * h.sigma_k**2)
        b = g.k0 / (2.0 * g.sigma_k**2) + h.k0 / (2.0 * h.sigma_k**2) + 1j * mismatch
        c = -(g.k0**2) / (4.0 * g.sigma_k**2) - h.k0**2 / (4.0 * h.sigma_k**2)
        norm = (2.0 * math.pi * g.sigma_k**2) ** -0.25 * (2.0 * math.pi * h.sigma_k**2) ** -0.25
        return complex(norm * math.sqrt(math.pi / a) * np.exp(b * b / (4.0 * a) + c))
    grid = _merged_grid(g, h)
    integrand = g.amplitude(grid) * np.conj(h.amplitude(grid)) * np.exp(1j * grid * mismatch)
    return complex(np.trapezoid(integrand, grid))


def same_time_commutator(g: Spectrum, dx: float) -> complex:
    """integral dk |G(k)|^2 exp(i k dx); equals 1 at dx = 0."""
    if isinstance(g, GaussianSpectrum):
        return complex(np.exp(1j * g.k0 * dx - 0.5 * (g.sigma_k * dx) ** 2))
    return _mode_overlap(g, g, dx)


def overlap_alpha(g: Spectrum, h: Spectrum, phase_mismatch: float, alpha_max: complex) -> complex:
    """Displacement amplitude seen by detector mode g from classical pulse h."""
    return _mode_overlap(g, h, phase_mismatch) * alpha_max


def overlap_chi(g: Spectrum, h: Spectrum, phase_mismatch: float, chi_max: float) -> complex:
    """Effective parametric gain for a detector mode against the pump."""
    return _mode_overlap(g, h, phase_mismatch) * chi_max


def detect_single_photon(g: Spectrum, profile: SinglePhotonProfile, u: float) -> float:
    """Click probability of the mode-g detector on a one-photon state at t - x = u."""
    return abs(_mode_overlap(g, profile.nu, u)) ** 2


def smearing_factor(j: EventSmearing, delta: float) -> float:
    """Squared modulus of the Omega integral: exp(-delta^2 / (4 d_t^2))."""
    return j.characteristic(delta) ** 2
