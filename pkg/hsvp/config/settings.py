"""Application settings using Pydantic Settings with YAML support."""

import logging
import sys
import threading
from pathlib import Path
from typing import Optional

import yaml
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from hsvp.config.models import HsvpConfig, SolverConfig


logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "hsvp.yaml"


class ConfigManager:
    """Thread-safe loader for the YAML configuration file."""

    def __init__(self, config_path: str = DEFAULT_CONFIG_PATH):
        """Initialize configuration manager.

        Args:
            config_path: Path to configuration file
        """
        self.config_path = Path(config_path)
        self.config: Optional[HsvpConfig] = None
        self._lock = threading.Lock()

    def load_config(self) -> HsvpConfig:
        """Load configuration from YAML file.

        Returns:
            Loaded configuration

        Raises:
            yaml.YAMLError: If YAML parsing fails
            ValueError: If configuration validation fails
        """
        with self._lock:
            if not self.config_path.exists():
                logger.warning(
                    f"Config file not found: {self.config_path}, using defaults"
                )
                self.config = HsvpConfig()
                return self.config

            try:
                with open(self.config_path, "r", encoding="utf-8") as f:
                    config_data = yaml.safe_load(f) or {}

                self.config = HsvpConfig(**config_data)
                logger.info(f"Configuration loaded from {self.config_path}")
                return self.config

            except yaml.YAMLError as e:
                logger.error(f"Failed to parse YAML config: {e}")
                raise
            except Exception as e:
                logger.error(f"Failed to load configuration: {e}")
                raise

    def get_config(self) -> HsvpConfig:
        """Get current configuration, loading it on first use.

        Returns:
            Current configuration
        """
        if self.config is not None:
            return self.config
        return self.load_config()


class Settings(BaseSettings):
    """Environment overrides, read from HSVP_* variables or a .env file."""

    model_config = SettingsConfigDict(
        env_prefix="HSVP_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    config: str = Field(
        default=DEFAULT_CONFIG_PATH, description="Path of the YAML config file"
    )
    enum_guard: Optional[int] = Field(
        default=None, ge=1, description="Override of solver.enum_guard"
    )
    log_level: Optional[str] = Field(
        default=None, description="Override of logging.level"
    )


# Global config manager instance
_config_manager: Optional[ConfigManager] = None


def get_settings() -> Settings:
    """Get environment settings (read on every call)."""
    return Settings()


def get_config_manager() -> ConfigManager:
    """Get global configuration manager instance."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager(get_settings().config)
    return _config_manager


def configure(config_path: Optional[str] = None) -> HsvpConfig:
    """Point the global manager at a config file and load it.

    Args:
        config_path: YAML file; falls back to HSVP_CONFIG or hsvp.yaml

    Returns:
        Loaded configuration
    """
    global _config_manager
    _config_manager = ConfigManager(config_path or get_settings().config)
    return _config_manager.load_config()


def reset_config() -> None:
    """Forget the loaded configuration so the next access reloads it."""
    global _config_manager
    _config_manager = None


def get_config() -> HsvpConfig:
    """Get the configuration with environment overrides applied."""
    config = get_config_manager().get_config()
    settings = get_settings()
    updates = {}
    if settings.enum_guard is not None:
        updates["solver"] = config.solver.model_copy(
            update={"enum_guard": settings.enum_guard}
        )
    if settings.log_level is not None:
        updates["logging"] = config.logging.model_copy(
            update={"level": settings.log_level.upper()}
        )
    return config.model_copy(update=updates) if updates else config


def get_solver_config() -> SolverConfig:
    """Get the solver section of the effective configuration."""
    return get_config().solver


def setup_logging() -> None:
    """Setup application logging on stderr."""
    config = get_config()

    # Safely get log level with fallback to INFO
    log_level = getattr(logging, config.logging.level.upper(), logging.INFO)

    logging.basicConfig(
        level=log_level,
        format=config.logging.format,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
