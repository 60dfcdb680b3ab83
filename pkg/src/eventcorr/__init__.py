"""Quantum optical correlations on Minkowski and Schwarzschild backgrounds.

Library and CLI predicting singles and coincidence rates for radially
propagating pulse pairs under the standard mode-operator formalism and a
localized event-operator formalism, including the gravitationally induced
decorrelation of entanglement and its threshold heights.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    EventCorrError,
    RegimeError,
    ResourceError,
    UnsupportedError,
)
from .experiment import (
    CorrelationReport,
    ExperimentLayout,
    VARIANT_FIG3,
    VARIANT_FIG4,
    boundary_phases,
    delta_offset,
    geodesic_trace,
    place_detectors,
    predict,
    threshold_height,
)
from .formalism import (
    EVENT,
    MODE,
    ContractionContext,
    HeisenbergExpansion,
    SourceModel,
    apply_displacement,
    apply_parametric,
    detector_mode,
    vacuum_coincidence,
    vacuum_singles,
)
from .fock import OracleConfig, fock_oracle_coincidence, fock_oracle_singles
from .geometry import (
    MINKOWSKI,
    RadialInterval,
    SchwarzschildBackground,
    coordinate_flight_time,
    metric_factor,
    proper_time_radial,
    shell_intervals,
    tortoise,
)
from .spectra import (
    EventSmearing,
    GaussianSpectrum,
    GridSpectrum,
    SinglePhotonProfile,
    detect_single_photon,
    load_grid_spectrum,
    overlap_alpha,
    overlap_chi,
    same_time_commutator,
    smearing_factor,
)

__all__ = [name for name in dir() if not name.startswith("_")]
