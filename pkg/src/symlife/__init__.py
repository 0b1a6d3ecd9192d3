"""Steady-state evolution of Immigration Game seed patterns.

Binary seed genomes compete one on one in a two-colour Game of Life
variant; relative fitness comes from a full pairwise competition ledger.
Four stacked reproduction layers (bit-flip mutation, variable size,
similarity-gated crossover, symbiotic fusion/fission) can be enabled per
experiment, with external fitness measures and statistical reports on
top.
"""

__version__ = "0.1.0"

from .engine import (
    Arena,
    CellState,
    GameFactors,
    GameOutcome,
    GameResult,
    GameSpec,
    run_game,
    run_games,
    size_game,
    step,
)
from .genome import SeedGenome

__all__ = [
    "Arena",
    "CellState",
    "GameFactors",
    "GameOutcome",
    "GameResult",
    "GameSpec",
    "SeedGenome",
    "run_game",
    "run_games",
    "size_game",
    "step",
    "__version__",
]
