"""Steering criteria for two-mode Gaussian and CV Werner states.

Covariance-matrix tools, closed-form Fock elements of two-mode squeezed
thermal states, pseudospin correlators, threshold sweeps and a CLI.
"""

__version__ = "0.1.0"

from ._accel import backend_name
from .gaussian import PhysicalityError, StandardForm, TmstParams, epr_covariance, tmst_covariance
from .fock import FockElementIndex, TruncationError, tmst_fock_element, truncated_tmst_density
from .pseudospin import CorrelatorTriple, moment_type_i, moment_type_ii, type_i_correlators, type_ii_correlators
from .werner import WernerParams, p_steer_gaussian, p_steer_type_i, p_steer_type_ii
from .thresholds import SweepSpec, ThresholdCurve, crossover_s, eta_threshold, run_sweep

__all__ = [
    "backend_name",
    "PhysicalityError", "StandardForm", "TmstParams", "epr_covariance", "tmst_covariance",
    "FockElementIndex", "TruncationError", "tmst_fock_element", "truncated_tmst_density",
    "CorrelatorTriple", "moment_type_i", "moment_type_ii", "type_i_correlators", "type_ii_correlators",
    "WernerParams", "p_steer_gaussian", "p_steer_type_i", "p_steer_type_ii",
    "SweepSpec", "ThresholdCurve", "crossover_s", "eta_threshold", "run_sweep",
]
