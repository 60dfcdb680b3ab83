"""Schwarzschild radial geometry in geometric units (c = 1, mass as length).

All quantities are in meters; coordinate times are lengths. The radial
metric factor is 1 - 2M/r and the horizon r = 2M is rejected rather than
analytically continued. The tortoise coordinate uses the weak-field form
r + 2M ln(r) (logarithm of the radius in meters); pass ``textbook=True``
for the conventional r + 2M ln(r/2M - 1) when comparing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import ConvergenceError, DomainError

QUAD_REL_TOL = 1e-12


@dataclass(frozen=True)
class SchwarzschildBackground:
    """Non-spinning massive body; ``mass_length`` is G*m/c^2 in meters."""

    mass_length: float

    def __post_init__(self):
        if self.mass_length < 0.0:
            raise DomainError(f"mass_length must be >= 0, got {self.mass_length}")

    @property
    def horizon_radius(self) -> float:
        return 2.0 * self.mass_length


MINKOWSKI = SchwarzschildBackground(0.0)


@dataclass(frozen=True)
class RadialInterval:
    r_lo: float
    r_hi: float

    def __post_init__(self):
        if not self.r_lo <= self.r_hi:
            raise DomainError(f"require r_lo <= r_hi, got ({self.r_lo}, {self.r_hi})")


def metric_factor(r: float, bg: SchwarzschildBackground) -> float:
    """g_tt factor 1 - 2M/r, in (0, 1] outside the horizon."""
    if r <= bg.horizon_radius:
        raise DomainError(f"r = {r} is at or inside the horizon 2M = {bg.horizon_radius}")
    return 1.0 - 2.0 * bg.mass_length / r


def tortoise(r: float, bg: SchwarzschildBackground, textbook: bool = False) -> float:
    """Radial coordinate in which light propagation looks flat."""
    if r <= 0.0:
        raise DomainError(f"r must be positive, got {r}")
    m = bg.mass_length
    if m == 0.0:
        return r
    if textbook:
        if r <= 2.0 * m:
            raise DomainError(f"textbook tortoise needs r > 2M, got r = {r}")
        return r + 2.0 * m * math.log(r / (2.0 * m) - 1.0)
    return r + 2.0 * m * math.log(r)


def coordinate_flight_time(iv: RadialInterval, bg: SchwarzschildBackground) -> float:
    """Far-away coordinate time for radial light to cross the interval."""
    return tortoise(iv.r_hi, bg) - tortoise(iv.r_lo, bg)


def _proper_antiderivative(r: float, m: float) -> float:
    # F(r) with F'(r) = sqrt(r / (r - 2M))
    return math.sqrt(r * (r - 2.0 * m)) + 2.0 * m * math.log(math.sqrt(r) + math.sqrt(r - 2.0 * m))


def proper_time_excess(r: float, bg: SchwarzschildBackground) -> float:
    """F(r) - r evaluated without cancellation; zero when M = 0.

    Differences of this function give the curvature contribution to the
    shell-frame crossing time, accurate even when the interval is tiny
    compared to the radii involved.
    """
    m = bg.mass_length
    if m == 0.0:
        return 0.0
    if r <= 2.0 * m:
        raise DomainError(f"r = {r} is at or inside the horizon 2M = {2.0 * m}")
    root = math.sqrt(1.0 - 2.0 * m / r)
    # sqrt(r(r-2M)) - r = -2M / (1 + sqrt(1 - 2M/r))
    return -2.0 * m / (1.0 + root) + 2.0 * m * math.log(math.sqrt(r) + math.sqrt(r - 2.0 * m))


def proper_time_radial(
    iv: RadialInterval,
    bg: SchwarzschildBackground,
    verify: bool = True,
) -> float:
    """Shell-frame time accumulated by radial light crossing the interval.

    Evaluates the closed-form antiderivative at the endpoints and, when
    ``verify`` is set, cross-checks it against adaptive quadrature of
    sqrt(r / (r - 2M)) at 1e-12 relative tolerance.
    """
    m = bg.mass_length
    if iv.r_lo <= 2.0 * m:
        raise DomainError(f"r_lo = {iv.r_lo} is at or inside the horizon 2M = {2.0 * m}")
    if m == 0.0:
        return iv.r_hi - iv.r_lo
    closed = _proper_antiderivative(iv.r_hi, m) - _proper_antiderivative(iv.r_lo, m)
    if verify and iv.r_hi > iv.r_lo:
        numeric, _ = quad(
            lambda r: math.sqrt(r / (r - 2.0 * m)),
            iv.r_lo,
            iv.r_hi,
            epsabs=0.0,
            epsrel=1e-13,
            limit=1000,
        )
        scale = max(abs(closed), abs(numeric))
        if scale > 0.0 and abs(closed - numeric) > QUAD_REL_TOL * scale:
            raise ConvergenceError(
                f"closed form {closed!r} and quadrature {numeric!r} disagree beyond "
                f"{QUAD_REL_TOL} relative on [{iv.r_lo}, {iv.r_hi}]"
            )
    return closed


def shell_intervals(
    dt: float, dr: float, r: float, bg: SchwarzschildBackground
) -> tuple[float, float]:
    """Local proper intervals (ds, dl) at a static shell frame at radius r."""
    f = metric_factor(r, bg)
    root = math.sqrt(f)
    return dt * root, dr / root
