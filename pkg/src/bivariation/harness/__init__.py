"""Config-driven experiment runner and empirical constant tracking."""

from .config import ConfigError, ExperimentConfig, parse_config_file
from .suites import RatioReport, run_norm_sweep, run_suite

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config_file",
    "RatioReport",
    "run_norm_sweep",
    "run_suite",
]
