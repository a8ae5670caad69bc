"""
Configuration loader for rn-spectra.
Loads settings from config.json file or environment variables.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

ANALYSIS_DEFAULTS: Dict[str, Any] = {
    "n": 50,
    "dx_mode": "sample",
    "basis": "chebyshev",
    "log_derivative": False,
    "histogram_bins": 0,
}

NUMERICS_DEFAULTS: Dict[str, Any] = {
    "max_n": 150,
    "pivot_rtol": 1e-13,
    "jacobi_max_n": 64,
    "dual_form_tol": 1e-8,
    "byparts_tol": 1e-2,
}


class Config:
    """Configuration manager for rn-spectra."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration.

        Args:
            config_path: Path to config.json file. If not provided, searches in:
                        1. Current directory
                        2. Project root
                        3. ~/.rn-spectra
        """
        self.config_data: Dict[str, Any] = {}
        self.config_path: Optional[Path] = None

        if config_path:
            self.config_path = Path(config_path)
        else:
            self.config_path = self._find_config_file()

        if self.config_path and self.config_path.exists():
            self._load_config()
        elif config_path:
            logger.warning("Config file %s does not exist; using defaults", config_path)

    def _find_config_file(self) -> Optional[Path]:
        """Find config.json in standard locations."""
        search_paths = [
            Path.cwd() / "config.json",
            Path(__file__).parent.parent.parent / "config.json",
            Path.home() / ".rn-spectra" / "config.json",
        ]

        for path in search_paths:
            if path.exists():
                return path

        return None

    def _load_config(self):
        """Load configuration from JSON file."""
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                data = json.load(f)
            if not isinstance(data, dict):
                raise ValueError("top-level JSON value must be an object")
            self.config_data = data
        except (OSError, ValueError) as e:
            logger.warning("Failed to load config file %s: %s", self.config_path, e)
            self.config_data = {}

    def _resolve(self, value: str) -> str:
        path = Path(value)
        if not path.is_absolute() and self.config_path:
            path = self.config_path.parent / value
        return str(path)

    def get_cache_dir(self) -> Optional[str]:
        """
        Get cache directory from config or environment.

        Priority:
        1. RN_SPECTRA_CACHE_DIR environment variable
        2. cache_dir from config.json
        3. None (will use default temp directory)
        """
        env_cache = os.environ.get("RN_SPECTRA_CACHE_DIR")
        if env_cache:
            return env_cache

        cache_dir = self.config_data.get("cache_dir")
        if cache_dir:
            return self._resolve(cache_dir)
        return None

    def get_output_dir(self) -> Optional[str]:
        """Fixed output directory for analyses, if one is configured."""
        env_output = os.environ.get("RN_SPECTRA_OUTPUT_DIR")
        if env_output:
            return env_output

        output_dir = self.config_data.get("output_dir")
        if output_dir:
            return self._resolve(output_dir)
        return None

    def get_analysis_defaults(self) -> Dict[str, Any]:
        """Default analysis settings (n, dx_mode, basis, log_derivative, histogram_bins)."""
        settings = self.config_data.get("analysis", {})
        return {**ANALYSIS_DEFAULTS, **settings}

    def get_numerics_settings(self) -> Dict[str, Any]:
        """Tolerances and size limits of the numerical core."""
        settings = self.config_data.get("numerics", {})
        return {**NUMERICS_DEFAULTS, **settings}

    def get_log_level(self) -> str:
        env_level = os.environ.get("RN_SPECTRA_LOG_LEVEL")
        if env_level:
            return env_level.upper()
        return str(self.config_data.get("log_level", "WARNING")).upper()

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value by key."""
        return self.config_data.get(key, default)

    def __repr__(self) -> str:
        return f"Config(path={self.config_path}, data={self.config_data})"


# Global config instance
_config: Optional[Config] = None


def get_config(config_path: Optional[str] = None) -> Config:
    """
    Get or create the global configuration instance.

    Args:
        config_path: Optional path to config file

    Returns:
        Config instance
    """
    global _config
    if _config is None:
        _config = Config(config_path)
    return _config


def load_config(config_path: Optional[str] = None) -> Config:
    """Force reload configuration."""
    global _config
    _config = Config(config_path)
    return _config
