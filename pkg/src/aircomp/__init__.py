"""aircomp: physical-layer simulation of over-the-air computation.

Modulation schemes that compute functions through multiple-access
superposition, closed-form power control and MIMO aggregation beamforming,
OFDM synchronization-impairment modeling, and a reproducible Monte Carlo
sweep engine with a CLI front end.
"""

__version__ = "0.1.0"

from .channel import (ChannelRealization, ImpairmentProfile, SnrSpec,
                      apply_flat_channel, apply_impairments, draw_rayleigh,
                      snr_to_noise_variance)
from .errors import ConstraintError, NumericalError
from .functions import (FunctionSpec, NomographicDecomposition, Reading, decompose,
                        evaluate_function, evaluate_function_batch)
from .metrics import MetricsReport, compute_metrics
from .modem import SchemeConfig
from .power_control import PowerPolicy, solve_optimal_policy
from .quantizer import UniformQuantizer
from .rng import substream
from .simulator import Scenario, SweepResult, run_csi_error_experiment, run_sweep

__all__ = [
    "ChannelRealization",
    "ImpairmentProfile",
    "SnrSpec",
    "apply_flat_channel",
    "apply_impairments",
    "draw_rayleigh",
    "snr_to_noise_variance",
    "ConstraintError",
    "NumericalError",
    "FunctionSpec",
    "NomographicDecomposition",
    "Reading",
    "decompose",
    "evaluate_function",
    "evaluate_function_batch",
    "MetricsReport",
    "compute_metrics",
    "SchemeConfig",
    "PowerPolicy",
    "solve_optimal_policy",
    "UniformQuantizer",
    "substream",
    "Scenario",
    "SweepResult",
    "run_csi_error_experiment",
    "run_sweep",
    "__version__",
]
