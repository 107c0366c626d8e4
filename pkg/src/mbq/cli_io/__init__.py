"""Run configuration, on-disk formats and the command-line interface."""

from .config import RunConfig, config_from_dict, parse_config

__all__ = ["RunConfig", "config_from_dict", "parse_config"]
