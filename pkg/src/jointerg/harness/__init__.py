"""Experiment configs, the runner and the command line interface."""

from .config import ConfigError, ExperimentConfig, dump_config, load_config, parse_config
from .runner import ResultRecord, run_config, suite, verdicts_from_rows

__all__ = ["ConfigError", "ExperimentConfig", "ResultRecord", "dump_config", "load_config",
           "parse_config", "run_config", "suite", "verdicts_from_rows"]
