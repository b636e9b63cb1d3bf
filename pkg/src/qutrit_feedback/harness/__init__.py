"""Configuration, presets, experiment drivers and the command line."""
from .config import PRESETS, SWEEP_PARAMETERS, ExperimentConfig, config_from_mapping, load_config, named_state
from .run import OUTPUT_ENV, classify_map, ensemble_run, run_experiment, verify_codes

__all__ = [
    "PRESETS", "SWEEP_PARAMETERS", "ExperimentConfig", "config_from_mapping", "load_config",
    "named_state", "OUTPUT_ENV", "classify_map", "ensemble_run", "run_experiment", "verify_codes",
]
