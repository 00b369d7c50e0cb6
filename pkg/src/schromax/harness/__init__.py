"""Experiment runner: configs, named verifications, reports and the CLI."""

from schromax.harness.config import ConfigError, ExperimentConfig, load_config
from schromax.harness.experiments import (
    VerificationReport,
    convergence_experiment,
    ratio_family,
    scan_s,
    verify_cover_bound,
    verify_cube,
    verify_thm1,
    verify_thmA,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "VerificationReport",
    "convergence_experiment",
    "load_config",
    "ratio_family",
    "scan_s",
    "verify_cover_bound",
    "verify_cube",
    "verify_thm1",
    "verify_thmA",
]
