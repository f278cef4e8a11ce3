"""
Configuration management for the binary forms toolkit.
"""

import os
from typing import Optional, Tuple
from enum import Enum
from dataclasses import dataclass
import logging

import yaml
from dotenv import load_dotenv

from config import ENVIRONMENTS

logger = logging.getLogger(__name__)


class Environment(str, Enum):
    """Environment types."""
    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


class LogLevel(str, Enum):
    """Logging levels."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"


@dataclass
class PrecisionConfig:
    """Numeric precision budget for root finding and equivalence."""
    ladder: Tuple[int, ...] = (256, 1024, 4096)
    max_bits: int = 4096
    denominator_bound: int = 10 ** 6
    profile_digits: int = 12


@dataclass
class CensusConfig:
    """Census execution settings."""
    cache_path: Optional[str] = None
    jobs: int = 1
    fingerprint_bound: int = 1


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: LogLevel = LogLevel.INFO
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    json: bool = False


def _parse_ladder(text: str) -> Tuple[int, ...]:
    ladder = tuple(int(part) for part in text.split(",") if part.strip())
    if not ladder or any(bits <= 0 for bits in ladder) or list(ladder) != sorted(ladder):
        raise ValueError(f"precision ladder must be increasing positive integers: {text!r}")
    return ladder


def _parse_bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


class ConfigManager:
    """Configuration management for the toolkit."""

    def __init__(self, environment: Optional[Environment] = None, dotenv: bool = True):
        if dotenv:
            load_dotenv()
        try:
            self.environment = environment or Environment(os.getenv('ENVIRONMENT', 'development'))
        except ValueError:
            logger.warning(f"Unknown environment {os.getenv('ENVIRONMENT')!r}, using development")
            self.environment = Environment.DEVELOPMENT

        # Initialize configurations from the preset of the environment
        preset = ENVIRONMENTS[self.environment.value]
        self.precision = PrecisionConfig(**preset['precision'])
        self.census = CensusConfig(**preset['census'])
        self.logging = LoggingConfig(
            level=LogLevel(preset['logging']['level']),
            format=preset['logging']['format'],
            json=preset['logging']['json'],
        )

        # Load configuration
        self._load_from_env()
        self._load_from_yaml(os.getenv('BINFORMS_CONFIG'))
        self._apply_environment_overrides()

        logger.debug(f"Configuration loaded for environment: {self.environment.value}")

    def _load_from_env(self):
        """Load configuration from environment variables."""
        readers = {
            'PRECISION_LADDER': ('precision', 'ladder', _parse_ladder),
            'PRECISION_MAX_BITS': ('precision', 'max_bits', int),
            'DENOMINATOR_BOUND': ('precision', 'denominator_bound', int),
            'PROFILE_DIGITS': ('precision', 'profile_digits', int),
            'CENSUS_CACHE': ('census', 'cache_path', str),
            'WORKERS': ('census', 'jobs', int),
            'FINGERPRINT_BOUND': ('census', 'fingerprint_bound', int),
            'LOG_JSON': ('logging', 'json', _parse_bool),
        }
        for variable, (section, field_name, parse) in readers.items():
            raw = os.getenv(variable)
            if raw is None:
                continue
            try:
                setattr(getattr(self, section), field_name, parse(raw))
            except ValueError:
                logger.warning(f"Invalid value for {variable}: {raw!r}, using default")

        # Logging settings
        log_level = os.getenv('LOG_LEVEL')
        if log_level:
            try:
                self.logging.level = LogLevel(log_level.upper())
            except ValueError:
                logger.warning(f"Invalid log level: {log_level}, using default")

    def _load_from_yaml(self, path: Optional[str]):
        """Overlay settings from a YAML file with precision/census/logging sections."""
        if not path:
            return
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                document = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.warning(f"Could not read configuration file {path}: {e}")
            return

        for section in ('precision', 'census', 'logging'):
            values = document.get(section) or {}
            target = getattr(self, section)
            for key, value in values.items():
                if not hasattr(target, key):
                    logger.warning(f"Unknown setting {section}.{key} in {path}")
                    continue
                if key == 'ladder':
                    value = tuple(int(bits) for bits in value)
                elif key == 'level':
                    value = LogLevel(str(value).upper())
                setattr(target, key, value)

    def _apply_environment_overrides(self):
        """Apply environment-specific configuration overrides."""
        if self.precision.max_bits < self.precision.ladder[-1]:
            self.precision.max_bits = self.precision.ladder[-1]

        if self.environment == Environment.PRODUCTION:
            self.census.jobs = max(1, self.census.jobs)


# Global configuration instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Get the global configuration manager instance."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def reset_config_manager():
    """Drop the global instance so the next access re-reads the environment."""
    global _config_manager
    _config_manager = None


def get_precision_config() -> PrecisionConfig:
    """Get the active precision configuration."""
    return get_config_manager().precision
