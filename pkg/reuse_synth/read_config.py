import json
import os

from loguru import logger

from reuse_synth.search import Algorithm, SearchConfig

DEFAULT_CONFIG = {
    "search": {
        "algorithm": "branching",
        "reuse": True,
        "max_depth": 8,
        "fuel": 100000,
        "identity_template": False,
        "target_type_pruning": True,
        "timeout": 600,
    },
    "bench": {
        "repeats": 5,
        "csv": None,
    },
    "logging": {
        "level": "INFO",
    },
}


def load_config(json_file) -> dict:
    """
    Reads a JSON config file and returns a dictionary object.

    Sections missing from the file are taken from DEFAULT_CONFIG, and a missing
    file means the defaults alone, with a warning.  A file that is not a JSON
    object of sections raises ValueError.
    """
    config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    if not os.path.exists(json_file):
        logger.warning(f"No config file at {json_file}; using built-in defaults.")
        return config

    with open(json_file) as file:
        try:
            loaded = json.load(file)
        except json.JSONDecodeError as err:
            raise ValueError(f"{json_file} is not valid JSON: {err}") from err
    if not isinstance(loaded, dict) or not all(isinstance(v, dict) for v in loaded.values()):
        raise ValueError(f"{json_file} must map section names to objects")
    for section, values in loaded.items():
        config.setdefault(section, {}).update(values)
    return config


def search_config_from(config: dict, overrides: dict | None = None) -> SearchConfig:
    """Build a SearchConfig from the `search` section; non-None overrides win."""
    values = dict(config.get("search", {}))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    algorithm = values.get("algorithm", "branching")
    if algorithm not in {a.value for a in Algorithm}:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected linear or branching")
    return SearchConfig(
        algorithm=Algorithm(algorithm),
        reuse=bool(values.get("reuse", True)),
        max_depth=int(values.get("max_depth", 8)),
        target_type_pruning=bool(values.get("target_type_pruning", True)),
        fuel=int(values.get("fuel", 100000)),
        identity_template=bool(values.get("identity_template", False)),
    )
