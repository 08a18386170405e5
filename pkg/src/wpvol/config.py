"""Flat key-value configuration.

Settings are resolved in priority order:
  1. Command-line flags (highest priority)
  2. The file given with `wpvol --config PATH`
  3. The packaged defaults file, wpvol/defaults.conf

Files are parsed with python-dotenv without touching os.environ, so the shell
environment has no influence on results. Run `wpvol config` to see the
resolved values.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from dotenv import dotenv_values

from wpvol.errors import InvalidArgumentError

DEFAULTS_FILE = Path(__file__).with_name("defaults.conf")

FORMATS = ("json", "csv")
CONVENTIONS = ("jt", "mirzakhani")

KEYS = {
    "MAX_GENUS": {"field": "max_genus", "type": int, "description": "largest genus a command may request"},
    "PRECISION": {"field": "precision", "type": int, "description": "decimal digits for numeric evaluation"},
    "CURVE_ORDER": {"field": "curve_order", "type": int, "description": "curve truncation order (0 = derived)"},
    "CONVENTION": {"field": "convention", "type": str, "description": "volume normalization: jt or mirzakhani"},
    "FORMAT": {"field": "format", "type": str, "description": "artifact format: json or csv"},
    "OUTPUT_DIR": {"field": "output_dir", "type": str, "description": "directory for reports and memo files"},
    "MC_DRAWS": {"field": "mc_draws", "type": int, "description": "Monte Carlo draws per batch"},
    "MC_BURN_IN": {"field": "mc_burn_in", "type": int, "description": "Metropolis burn-in sweeps"},
    "MC_STEPS_THIN": {"field": "mc_steps_thin", "type": int, "description": "Metropolis sweeps between draws"},
    "MC_STEP_SIZE": {"field": "mc_step_size", "type": float, "description": "initial Metropolis proposal width"},
    "MC_CHAINS": {"field": "mc_chains", "type": int, "description": "independent random substreams"},
    "MC_WORKERS": {"field": "mc_workers", "type": int, "description": "worker threads for chains"},
    "HIST_BINS": {"field": "hist_bins", "type": int, "description": "histogram bins"},
    "QUAD_TOL": {"field": "quad_tol", "type": float, "description": "quadrature relative tolerance"},
    "SEED": {"field": "seed", "type": int, "description": "64-bit random seed"},
}


@dataclass(frozen=True)
class Settings:
    max_genus: int
    precision: int
    curve_order: int
    convention: str
    format: str
    output_dir: str
    mc_draws: int
    mc_burn_in: int
    mc_steps_thin: int
    mc_step_size: float
    mc_chains: int
    mc_workers: int
    hist_bins: int
    quad_tol: float
    seed: int

    def __post_init__(self) -> None:
        if self.max_genus < 0:
            raise InvalidArgumentError(f"MAX_GENUS must be non-negative, got {self.max_genus}")
        if self.precision < 15:
            raise InvalidArgumentError(f"PRECISION must be at least 15 digits, got {self.precision}")
        if self.curve_order < 0:
            raise InvalidArgumentError(f"CURVE_ORDER must be non-negative, got {self.curve_order}")
        if self.convention not in CONVENTIONS:
            raise InvalidArgumentError(f"CONVENTION must be one of {', '.join(CONVENTIONS)}, got {self.convention!r}")
        if self.format not in FORMATS:
            raise InvalidArgumentError(f"FORMAT must be one of {', '.join(FORMATS)}, got {self.format!r}")
        for name in ("mc_draws", "mc_steps_thin", "mc_chains", "mc_workers", "hist_bins"):
            if getattr(self, name) < 1:
                raise InvalidArgumentError(f"{name.upper()} must be at least 1, got {getattr(self, name)}")
        if self.mc_burn_in < 0:
            raise InvalidArgumentError(f"MC_BURN_IN must be non-negative, got {self.mc_burn_in}")
        if not self.mc_step_size > 0:
            raise InvalidArgumentError(f"MC_STEP_SIZE must be positive, got {self.mc_step_size}")
        if not 0 < self.quad_tol < 1:
            raise InvalidArgumentError(f"QUAD_TOL must lie in (0, 1), got {self.quad_tol}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgumentError(f"SEED must fit in 64 bits, got {self.seed}")

    def replace(self, **changes: Any) -> Settings:
        """Copy with flag overrides applied; None values are ignored."""
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def resolved(self) -> dict[str, Any]:
        """Configuration echo embedded in every artifact, keyed by file key."""
        return {key: getattr(self, spec["field"]) for key, spec in sorted(KEYS.items())}


def _read_file(path: Path) -> dict[str, str]:
    if not path.exists():
        raise InvalidArgumentError(f"config file not found: {path}")
    raw = dotenv_values(path, interpolate=False)
    unknown = sorted(set(raw) - set(KEYS))
    if unknown:
        raise InvalidArgumentError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return {k: v for k, v in raw.items() if v is not None}


def _convert(key: str, text: str) -> Any:
    kind = KEYS[key]["type"]
    try:
        return kind(text)
    except ValueError:
        raise InvalidArgumentError(f"config key {key} expects {kind.__name__}, got {text!r}") from None


def load_settings(path: Path | None = None, **overrides: Any) -> Settings:
    values = _read_file(DEFAULTS_FILE)
    if path is not None:
        values.update(_read_file(Path(path)))
    missing = sorted(set(KEYS) - set(values))
    if missing:
        raise InvalidArgumentError(f"config is missing keys: {', '.join(missing)}")
    fields = {KEYS[k]["field"]: _convert(k, v) for k, v in values.items()}
    return Settings(**fields).replace(**overrides)
