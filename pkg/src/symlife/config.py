"""Experiment configuration: flat ``key = value`` files, strict validation.

Keys use the simulation's canonical parameter names so a config file
doubles as documentation. Missing keys take the standard defaults below;
unknown or duplicate keys are rejected outright.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields
from pathlib import Path

from .engine import GameFactors

_PROB_SUM_TOL = 1e-9


class ConfigError(ValueError):
    """Configuration problem, annotated with the offending key when known."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


@dataclass(frozen=True)
class ExperimentConfig:
    # Model parameters
    experiment_type_num: int = 4
    pop_size: int = 200
    num_trials: int = 2
    num_generations: int = 100
    min_s_xspan: int = 5
    min_s_yspan: int = 5
    s_xspan: int = 5
    s_yspan: int = 5
    max_area_first: int = 120
    max_area_last: int = 170
    seed_density: float = 0.375
    width_factor: float = 6.0
    height_factor: float = 3.0
    time_factor: float = 6.0
    tournament_size: int = 2
    elite_size: int = 50
    mutation_rate: float = 0.01
    prob_flip: float = 0.6
    prob_grow: float = 0.2
    prob_shrink: float = 0.2
    min_similarity: float = 0.8
    max_similarity: float = 0.99
    prob_fission: float = 0.01
    prob_fusion: float = 0.005
    symbiosis_flag: int = 0
    fusion_test_flag: int = 0
    # Run control
    rng_seed: int = 0
    num_runs: int = 1
    output_dir: str = "runs"
    pattern_dir: str = ""

    def factors(self) -> GameFactors:
        return GameFactors(self.width_factor, self.height_factor, self.time_factor)

    def layer_label(self) -> str:
        """Short name for the enabled layer plus any layer-4 modifier flags."""
        label = f"layer{self.experiment_type_num}"
        if self.experiment_type_num == 4:
            if self.fusion_test_flag:
                label += "_shuffled"
            if self.symbiosis_flag:
                label += "_mutualism"
        return label

    def validate(self) -> None:
        def require(ok: bool, key: str, message: str) -> None:
            if not ok:
                raise ConfigError(message, key=key)

        c = self
        require(c.experiment_type_num in (1, 2, 3, 4), "experiment_type_num", "must be 1, 2, 3 or 4")
        require(c.pop_size >= 2, "pop_size", "must be at least 2")
        require(c.num_trials >= 1, "num_trials", "must be at least 1")
        require(c.num_generations >= 0, "num_generations", "must be non-negative")
        require(c.min_s_xspan >= 1, "min_s_xspan", "must be at least 1")
        require(c.min_s_yspan >= 1, "min_s_yspan", "must be at least 1")
        require(c.s_xspan >= c.min_s_xspan, "s_xspan", "must be at least min_s_xspan")
        require(c.s_yspan >= c.min_s_yspan, "s_yspan", "must be at least min_s_yspan")
        require(c.max_area_first >= c.s_xspan * c.s_yspan, "max_area_first",
                "must be at least the initial seed area s_xspan * s_yspan")
        require(c.max_area_last >= c.max_area_first, "max_area_last",
                "must be at least max_area_first")
        require(0.0 <= c.seed_density <= 1.0, "seed_density", "must be in [0, 1]")
        require(c.width_factor > 0, "width_factor", "must be positive")
        require(c.height_factor > 0, "height_factor", "must be positive")
        require(c.time_factor > 0, "time_factor", "must be positive")
        require(1 <= c.tournament_size <= c.pop_size, "tournament_size",
                "must be in [1, pop_size]")
        require(1 <= c.elite_size <= c.pop_size, "elite_size", "must be in [1, pop_size]")
        require(0.0 <= c.mutation_rate <= 1.0, "mutation_rate", "must be in [0, 1]")
        for key in ("prob_flip", "prob_grow", "prob_shrink", "prob_fission", "prob_fusion"):
            require(getattr(c, key) >= 0.0, key, "must be non-negative")
        require(abs(c.prob_flip + c.prob_grow + c.prob_shrink - 1.0) <= _PROB_SUM_TOL,
                "prob_flip", "prob_flip + prob_grow + prob_shrink must sum to 1")
        require(c.prob_fission + c.prob_fusion <= 1.0 + _PROB_SUM_TOL, "prob_fusion",
                "prob_fission + prob_fusion must not exceed 1")
        require(0.0 <= c.min_similarity <= c.max_similarity <= 1.0, "min_similarity",
                "need 0 <= min_similarity <= max_similarity <= 1")
        require(c.symbiosis_flag in (0, 1), "symbiosis_flag", "must be 0 or 1")
        require(c.fusion_test_flag in (0, 1), "fusion_test_flag", "must be 0 or 1")
        require(c.num_runs >= 1, "num_runs", "must be at least 1")

    def to_text(self) -> str:
        """Canonical ``key = value`` rendering, field order as declared."""
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key: str, raw: str) -> int | float | str:
    kind = _FIELD_TYPES[key]
    if kind == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"expected an integer, got {raw!r}", key=key) from None
    if kind == "float":
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"expected a number, got {raw!r}", key=key) from None
    return raw


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text into a validated ExperimentConfig.

    Blank lines and ``#`` comments are skipped. Every other line must be
    ``key = value`` with a known, not-yet-seen key.
    """
    values: dict[str, int | float | str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError("unknown parameter", key=key)
        if key in values:
            raise ConfigError("duplicate parameter", key=key)
        values[key] = _coerce(key, raw)
    config = ExperimentConfig(**values)
    config.validate()
    return config


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())
