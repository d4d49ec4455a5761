"""Battery arbitrage dispatch against a digital twin."""

import json

from ._core import (
    BessError,
    ConfigError,
    DomainError,
    IngestionError,
    cli,
    current_from_dc_power,
    gen_prices,
    ocv,
    solve_horizon,
    validate_config,
)
from ._core import run as _run

__all__ = [
    "BessError",
    "ConfigError",
    "DomainError",
    "IngestionError",
    "cli",
    "current_from_dc_power",
    "gen_prices",
    "ocv",
    "run",
    "solve_horizon",
    "validate_config",
]


def run(config=None, overrides=()):
    """Run scenarios; `config` is a dict or JSON text. Returns (list of KPI reports, table text)."""
    text = json.dumps(config) if isinstance(config, dict) else (config or "")
    kpis, table = _run(text, list(overrides))
    return json.loads(kpis), table
