"""Brute-force oracle on a small discretized (mode, k, Omega) bin space.

States are sparse vectors over occupation-number tuples of the labeled
bins. The two detector arms are built as first-order parametric
expansions with explicit per-bin phase weights, applied to the vacuum by
direct ladder-operator algebra. Used only to validate the contraction
engine; caps keep the discretization tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceError
from .formalism import EVENT, MODE

MAX_K_BINS = 4
MAX_OMEGA_BINS = 4
MAX_CHI = 0.2
MAX_PHOTONS_PER_BIN = 2


@dataclass(frozen=True)
class OracleConfig:
    """Discretized two-arm parametric experiment.

    ``phi1``/``phi2`` are the modal phase arguments of the two detector
    arms, ``phi_c`` the pump's; ``theta1``/``theta2`` the corresponding
    detection event phases. Weights are normalized on construction so the
    discrete sums of |g|^2 and |j|^2 are 1.
    """

    k_values: np.ndarray
    k_weights: np.ndarray
    omega_values: np.ndarray
    omega_weights: np.ndarray
    chi: float
    phi1: float
    phi2: float
    phi_c: float
    theta1: float
    theta2: float
    formalism: str = EVENT

    def __post_init__(self):
        kv = np.asarray(self.k_values, dtype=float)
        kw = np.asarray(self.k_weights, dtype=complex)
        ov = np.asarray(self.omega_values, dtype=float)
        ow = np.asarray(self.omega_weights, dtype=complex)
        if kv.size > MAX_K_BINS or ov.size > MAX_OMEGA_BINS:
            raise ResourceError(
                f"oracle caps: <= {MAX_K_BINS} k-bins and <= {MAX_OMEGA_BINS} Omega-bins, "
                f"got {kv.size} x {ov.size}"
            )
        if abs(self.chi) > MAX_CHI:
            raise ResourceError(f"oracle needs small chi, got {self.chi}")
        if self.formalism not in (MODE, EVENT):
            raise ResourceError(f"unknown formalism {self.formalism!r}")
        kw = kw / math.sqrt(float(np.sum(np.abs(kw) ** 2)))
        ow = ow / math.sqrt(float(np.sum(np.abs(ow) ** 2)))
        object.__setattr__(self, "k_values", kv)
        object.__setattr__(self, "k_weights", kw)
        object.__setattr__(self, "omega_values", ov)
        object.__setattr__(self, "omega_weights", ow)

    @property
    def n_bins(self) -> int:
        return 2 * self.k_values.size * self.omega_values.size

    def bin_index(self, mode: int, ik: int, io: int) -> int:
        return ((mode - 1) * self.k_values.size + ik) * self.omega_values.size + io

    def arm_weights(self, mode: int, k_phase: float, event_phase: float) -> np.ndarray:
        """Per-bin weights of one collective operator."""
        w = np.zeros(self.n_bins, dtype=complex)
        for ik, (k, gk) in enumerate(zip(self.k_values, self.k_weights)):
            for io, (om, jo) in enumerate(zip(self.omega_values, self.omega_weights)):
                phase = k * k_phase
                if self.formalism == EVENT:
                    phase += om * event_phase
                w[self.bin_index(mode, ik, io)] = gk * jo * np.exp(1j * phase)
        return w

    def discrete_chi(self, arm_phase: float) -> complex:
        """chi_j from the discrete pump overlap (pump shape equals G)."""
        return self.chi * complex(
            np.sum(np.abs(self.k_weights) ** 2 * np.exp(1j * self.k_values * (arm_phase - self.phi_c)))
        )


# -- sparse ladder-operator algebra over occupation tuples -------------------

State = dict  # occupation tuple -> complex amplitude


def vacuum_state(n_bins: int) -> State:
    return {(0,) * n_bins: 1.0 + 0j}


def _annihilate(state: State, weights: np.ndarray) -> State:
    out: State = {}
    for occ, amp in state.items():
        for b, w in enumerate(weights):
            n = occ[b]
            if n == 0 or w == 0:
                continue
            new = list(occ)
            new[b] = n - 1
            key = tuple(new)
            out[key] = out.get(key, 0j) + amp * w * math.sqrt(n)
    return out


def _create(state: State, weights: np.ndarray) -> State:
    out: State = {}
    for occ, amp in state.items():
        for b, w in enumerate(weights):
            if w == 0:
                continue
            n = occ[b]
            if n >= MAX_PHOTONS_PER_BIN:
                raise ResourceError("Fock truncation exceeded (2 photons per bin)")
            new = list(occ)
            new[b] = n + 1
            key = tuple(new)
            out[key] = out.get(key, 0j) + amp * w * math.sqrt(n + 1)
    return out


def _add(a: State, b: State, factor: complex = 1.0 + 0j) -> State:
    out = dict(a)
    for key, amp in b.items():
        out[key] = out.get(key, 0j) + factor * amp
    return out


def _norm_sq(state: State) -> float:
    return float(sum(abs(a) ** 2 for a in state.values()))


@dataclass
class _Arm:
    """First-order parametric arm: annihilation part + chi_j * creation part."""

    annihilation: np.ndarray
    creation: np.ndarray
    chi_j: complex

    def apply(self, state: State) -> State:
        return _add(_annihilate(state, self.annihilation), _create(state, self.creation), self.chi_j)


def _build_arms(cfg: OracleConfig) -> tuple[_Arm, _Arm]:
    a1 = cfg.arm_weights(1, cfg.phi1, cfg.theta1)
    a2 = cfg.arm_weights(2, cfg.phi2, cfg.theta2)
    # Partner creation operators carry the pump modal phase and the arm's
    # own detection event phase.
    a2c = cfg.arm_weights(2, cfg.phi_c, cfg.theta1)
    a1c = cfg.arm_weights(1, cfg.phi_c, cfg.theta2)
    arm1 = _Arm(annihilation=a1, creation=np.conj(a2c), chi_j=cfg.discrete_chi(cfg.phi1))
    arm2 = _Arm(annihilation=a2, creation=np.conj(a1c), chi_j=cfg.discrete_chi(cfg.phi2))
    return arm1, arm2


def fock_oracle_singles(cfg: OracleConfig, arm: int = 1) -> float:
    """<0| x_j^dag x_j |0> by direct state algebra."""
    arm1, arm2 = _build_arms(cfg)
    chosen = arm1 if arm == 1 else arm2
    return _norm_sq(chosen.apply(vacuum_state(cfg.n_bins)))


def fock_oracle_coincidence(cfg: OracleConfig) -> float:
    """<0| x1^dag x2^dag x2 x1 |0> = || x2 x1 |0> ||^2 by direct state algebra."""
    arm1, arm2 = _build_arms(cfg)
    vac = vacuum_state(cfg.n_bins)
    return _norm_sq(arm2.apply(arm1.apply(vac)))
