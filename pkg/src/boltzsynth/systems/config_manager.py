"""
Configuration management for synthesis runs.

This module loads JSON configuration files relative to a config root,
caches them by relative path, and turns the synthesis settings file into
a validated settings object that supplies the command-line defaults.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..utils.constants import (
    CALIBRATION_TOLERANCE,
    CLAMP_DELTA,
    DEFAULT_COPY_SHARPNESS,
    DEFAULT_SEED,
    DEFAULT_SHARPNESS,
    MAX_CALIBRATION_SWEEPS,
    SETTINGS_FILE,
    TARGET_FLOOR,
)
from .error_handling import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthesisSettings:
    """
    Run defaults for synthesis commands.

    Attributes:
        sharpness: Base scale a for RBM synthesis
        copy_sharpness: Copy margin T for DBN layers
        seed: Default sampler seed
        target_floor: Masses below this are raised before synthesis
        clamp_delta: Sharing targets are clamped to [delta, 1 - delta]
        calibration_tolerance: Largest accepted calibration residual
        max_sweeps: Calibration sweep budget
    """

    sharpness: float = DEFAULT_SHARPNESS
    copy_sharpness: float = DEFAULT_COPY_SHARPNESS
    seed: int = DEFAULT_SEED
    target_floor: float = TARGET_FLOOR
    clamp_delta: float = CLAMP_DELTA
    calibration_tolerance: float = CALIBRATION_TOLERANCE
    max_sweeps: int = MAX_CALIBRATION_SWEEPS

    def __post_init__(self) -> None:
        positive = {
            "sharpness": self.sharpness,
            "copy_sharpness": self.copy_sharpness,
            "target_floor": self.target_floor,
            "clamp_delta": self.clamp_delta,
            "calibration_tolerance": self.calibration_tolerance,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigurationError(f"{name} must be positive, got {value}")
        if self.clamp_delta >= 0.5:
            raise ConfigurationError(
                f"clamp_delta must be below 0.5, got {self.clamp_delta}"
            )
        if self.max_sweeps < 1:
            raise ConfigurationError(
                f"max_sweeps must be at least 1, got {self.max_sweeps}"
            )
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SynthesisSettings":
        """
        Build settings from a parsed settings file.

        Missing keys keep their defaults.

        Raises:
            ConfigurationError: If a value has the wrong type or range
        """
        calibration = data.get("calibration", {})
        if not isinstance(calibration, dict):
            raise ConfigurationError("'calibration' must be an object")
        defaults = cls()
        try:
            return cls(
                sharpness=float(data.get("sharpness", defaults.sharpness)),
                copy_sharpness=float(
                    data.get("copy_sharpness", defaults.copy_sharpness)
                ),
                seed=int(data.get("seed", defaults.seed)),
                target_floor=float(data.get("target_floor", defaults.target_floor)),
                clamp_delta=float(data.get("clamp_delta", defaults.clamp_delta)),
                calibration_tolerance=float(
                    calibration.get("tolerance", defaults.calibration_tolerance)
                ),
                max_sweeps=int(calibration.get("max_sweeps", defaults.max_sweeps)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"invalid settings value: {e}") from e


class ConfigManager:
    """
    Manages configuration files under a config root.

    Provides centralized, cached access to configuration data for the
    command-line tools.
    """

    def __init__(self, config_root: str | Path = "config"):
        """
        Initialize the configuration manager.

        Args:
            config_root: Root directory for configuration files
        """
        self.config_root = Path(config_root)
        self.configs: dict[str, dict[str, Any]] = {}

    def load_config(self, config_path: str) -> dict[str, Any]:
        """
        Load a configuration file.

        Args:
            config_path: Path of the file relative to the config root

        Returns:
            The loaded configuration data

        Raises:
            FileNotFoundError: If the config file doesn't exist
            ConfigurationError: If the file is not a JSON object
        """
        full_path = self.config_root / config_path

        if not full_path.exists():
            logger.error(f"Configuration file not found: {full_path}")
            raise FileNotFoundError(f"Configuration file not found: {full_path}")

        if full_path.suffix.lower() != ".json":
            raise ConfigurationError(f"Unsupported config format: {full_path.suffix}")

        try:
            with open(full_path, encoding="utf-8") as f:
                config_data = json.load(f)
        except json.JSONDecodeError as e:
            logger.error(f"Invalid JSON in config file {full_path}: {e}")
            raise ConfigurationError(f"invalid JSON in {full_path}: {e}") from e

        if not isinstance(config_data, dict):
            raise ConfigurationError(f"{full_path} must hold a JSON object")

        self.configs[config_path] = config_data
        logger.info(f"Loaded configuration: {config_path}")
        return dict(config_data)

    def load_settings(self, config_path: str = SETTINGS_FILE) -> SynthesisSettings:
        """
        Load the synthesis settings, falling back to built-in defaults.

        Raises:
            ConfigurationError: If the file exists but is invalid
        """
        try:
            data = self.load_config(config_path)
        except FileNotFoundError:
            logger.warning(
                f"No settings at {self.config_root / config_path}; using defaults"
            )
            return SynthesisSettings()
        return SynthesisSettings.from_dict(data)
