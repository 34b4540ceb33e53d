"""Squeezing spectra and stability analysis of a degenerate parametric
cavity with time-delayed coherent feedback."""

from .model import (CONSTRUCTIVE, DESTRUCTIVE, GENERIC, LONG_DELAY,
                    SHORT_DELAY, Model, ModelError, ModelParams, RawDelay,
                    ScaledDelay, scaled_delay_near, validate)
from .response import eval_response, eval_response_general, response_at
from .spectrum import (markovian_reference, optimal_theta, spectrum_table,
                       squeezing_spectrum, threshold_pump)
from .stability import (char_root_oracle, char_roots_lambert,
                        classify_stability, s1w_dimensionless,
                        stability_boundary_alpha, stability_map)
from .dde import classify, integrate, pyragas_invariance_check
from .lambertw import lambert_w0
from .scenario import (RunManifest, Scenario, load_manifest, load_preset,
                       load_scenario, save_manifest, save_scenario)

__version__ = "0.1.0"

__all__ = [
    "CONSTRUCTIVE", "DESTRUCTIVE", "GENERIC", "LONG_DELAY", "SHORT_DELAY",
    "Model", "ModelError", "ModelParams", "RawDelay", "ScaledDelay",
    "scaled_delay_near", "validate",
    "eval_response", "eval_response_general", "response_at",
    "markovian_reference", "optimal_theta", "spectrum_table",
    "squeezing_spectrum", "threshold_pump",
    "char_root_oracle", "char_roots_lambert", "classify_stability",
    "s1w_dimensionless", "stability_boundary_alpha", "stability_map",
    "classify", "integrate", "pyragas_invariance_check",
    "lambert_w0",
    "RunManifest", "Scenario", "load_manifest", "load_preset",
    "load_scenario", "save_manifest", "save_scenario",
    "__version__",
]
