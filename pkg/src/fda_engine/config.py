"""Configuration: JSON defaults from configs/ with environment overrides."""

from __future__ import annotations

import json
import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any

_CONFIGS_DIR = Path(__file__).resolve().parents[2] / "configs"

_CONFIG_ENV = "FDA_ENGINE_CONFIG"
_LOG_LEVEL_ENV = "FDA_ENGINE_LOG_LEVEL"


@lru_cache(maxsize=4)
def _read_config(config_path: Path) -> dict[str, Any]:
    with open(config_path, encoding="utf-8") as f:
        return json.load(f)


def load_config(config_name: str = "defaults.json") -> dict[str, Any]:
    """Load a JSON config file from the configs/ directory.

    ``FDA_ENGINE_CONFIG`` points to an alternate file and wins over the
    repository copy. Files are cached per resolved path.
    """
    override = os.environ.get(_CONFIG_ENV)
    config_path = Path(override) if override else _CONFIGS_DIR / config_name
    return _read_config(config_path.resolve())


def get_default(*keys: str) -> Any:
    """Walk the ``defaults`` section, e.g. ``get_default("fpca", "pve")``."""
    node: Any = load_config()["defaults"]
    for key in keys:
        node = node[key]
    return node


def get_preset(name: str) -> dict[str, Any]:
    """Return a named synthetic-data preset.

    Raises:
        KeyError: If no preset with that name exists.
    """
    presets = load_config()["presets"]
    if name not in presets:
        raise KeyError(f"Preset not found: {name}")
    return presets[name]


def configure_logging(verbose: bool = False) -> None:
    """Configure the root logger for command-line use.

    Library modules only create loggers; handlers are attached here.
    """
    settings = get_default("logging")
    level = "DEBUG" if verbose else os.environ.get(_LOG_LEVEL_ENV, settings["level"])
    logging.basicConfig(level=level.upper(), format=settings["format"], force=True)
