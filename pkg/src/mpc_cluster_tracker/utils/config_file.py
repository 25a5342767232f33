"""Configuration file loading."""

import json
from pathlib import Path
from typing import Any

from ..exceptions import ConfigError
from ..models import PipelineConfig

SCENARIO_KEY = "scenario"


def load_config_file(path: Path) -> tuple[PipelineConfig, dict[str, Any] | None]:
    """Load a JSON config file.

    The file holds one JSON object whose keys mirror PipelineConfig fields,
    plus an optional "scenario" object describing a synthetic scenario.

    Args:
        path: Path to the config file.

    Returns:
        Tuple of (pipeline config, raw scenario mapping or None).

    Raises:
        ConfigError: If the file cannot be read or holds invalid values.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"Could not read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e

    if not isinstance(raw, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")

    scenario = raw.pop(SCENARIO_KEY, None)
    if scenario is not None and not isinstance(scenario, dict):
        raise ConfigError(f"'{SCENARIO_KEY}' must be a JSON object")

    return PipelineConfig.from_dict(raw), scenario
