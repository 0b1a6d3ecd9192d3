"""Two-colour Immigration Game on a finite toroid.

The update rule is plain B3/S23 over live cells of either colour, with a
colour rule layered on top: a surviving cell keeps its colour, and a cell
born with exactly three live neighbours takes the colour held by at least
two of them (three parents always produce a clear majority).

Stepping is implemented over batches of independent arenas stacked along
a leading axis. A single step packs each cell into one uint8 code,
``live + 16 * red``, so one padded neighbour sum yields both the live
count (low nibble, max 8) and the red count (high nibble) per cell.
Wrap-around adjacency comes from padding with ``mode='wrap'`` and summing
the eight shifted views.

Games never terminate early in effect: the batch runner detects arenas
whose state repeats with period 1 or 2 (a property that then holds
forever) and fast-forwards them to the parity-correct final state, which
is bit-identical to stepping out the full budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Sequence

import numpy as np

from .genome import SeedGenome


class CellState(IntEnum):
    DEAD = 0
    RED = 1
    BLUE = 2


class GameResult(Enum):
    RED_WINS = "red"
    BLUE_WINS = "blue"
    TIE = "tie"


class SeedTooLarge(ValueError):
    """A seed does not fit its half of the arena; the spec was mis-sized."""


@dataclass(frozen=True)
class GameFactors:
    """Scale factors tying arena size and step budget to seed size."""

    width_factor: float = 6.0
    height_factor: float = 3.0
    time_factor: float = 6.0

    def __post_init__(self) -> None:
        if min(self.width_factor, self.height_factor, self.time_factor) <= 0:
            raise ValueError("all game factors must be positive")


@dataclass(frozen=True)
class GameSpec:
    width: int
    height: int
    max_steps: int

    def __post_init__(self) -> None:
        if min(self.width, self.height, self.max_steps) < 1:
            raise ValueError(f"game spec must be strictly positive, got {self}")


@dataclass(eq=False)
class Arena:
    """Toroidal grid of cell states, height x width, row major."""

    grid: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.grid, dtype=np.uint8)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"arena must be a non-empty 2-D grid, got shape {arr.shape}")
        if arr.max(initial=0) > 2:
            raise ValueError("arena cells must be 0 (dead), 1 (red) or 2 (blue)")
        self.grid = arr

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    def count(self, state: CellState) -> int:
        return int(np.count_nonzero(self.grid == int(state)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Arena):
            return NotImplemented
        return self.grid.shape == other.grid.shape and bool(np.array_equal(self.grid, other.grid))

    def to_text(self) -> str:
        """Seed text format with a colour channel: 0/1/2 digits."""
        lines = [f"{self.height} {self.width}"]
        lines.extend("".join(str(int(c)) for c in row) for row in self.grid)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Arena":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty arena text")
        try:
            height, width = (int(tok) for tok in lines[0].split())
        except ValueError:
            raise ValueError(f"bad arena header {lines[0]!r}") from None
        body = lines[1:]
        if len(body) != height:
            raise ValueError(f"expected {height} rows, got {len(body)}")
        grid = np.zeros((height, width), dtype=np.uint8)
        for i, line in enumerate(body):
            if len(line) != width or any(c not in "012" for c in line):
                raise ValueError(f"row {i} is not {width} characters of 0/1/2: {line!r}")
            grid[i] = [int(c) for c in line]
        return cls(grid)


@dataclass(frozen=True)
class GameOutcome:
    red_initial: int
    red_final: int
    blue_initial: int
    blue_final: int
    red_score: int
    blue_score: int
    result: GameResult


def outcome_from_counts(
    red_initial: int, red_final: int, blue_initial: int, blue_final: int
) -> GameOutcome:
    """Score a game from its live-cell counts.

    Growth below zero is clamped to a score of zero before comparison, so
    two shrinking players tie regardless of who shrank less.
    """
    red_score = max(0, red_final - red_initial)
    blue_score = max(0, blue_final - blue_initial)
    if red_score > blue_score:
        result = GameResult.RED_WINS
    elif blue_score > red_score:
        result = GameResult.BLUE_WINS
    else:
        result = GameResult.TIE
    return GameOutcome(red_initial, red_final, blue_initial, blue_final,
                       red_score, blue_score, result)


# ---------------------------------------------------------------------------
# Stepping kernel


def _step_grids(grids: np.ndarray) -> np.ndarray:
    """Advance a (..., H, W) stack of arenas by one synchronous step."""
    live = grids != 0
    code = live.astype(np.uint8) + ((grids == 1).astype(np.uint8) << 4)
    pad_width = [(0, 0)] * (grids.ndim - 2) + [(1, 1), (1, 1)]
    p = np.pad(code, pad_width, mode="wrap")
    s = (p[..., :-2, :-2] + p[..., :-2, 1:-1] + p[..., :-2, 2:]
         + p[..., 1:-1, :-2] + p[..., 1:-1, 2:]
         + p[..., 2:, :-2] + p[..., 2:, 1:-1] + p[..., 2:, 2:])
    live_n = s & 0x0F
    red_n = s >> 4
    three = live_n == 3
    keep = live & (three | (live_n == 2))
    born_colour = np.where(red_n >= 2, np.uint8(CellState.RED), np.uint8(CellState.BLUE))
    return np.where(keep, grids, np.where(~live & three, born_colour, np.uint8(0)))


def step(arena: Arena) -> Arena:
    """One synchronous update of the whole arena. Pure and total."""
    return Arena(_step_grids(arena.grid))


def project_to_life(arena: Arena) -> np.ndarray:
    """Collapse both colours to a single live state (uint8 0/1 grid)."""
    return (arena.grid != 0).astype(np.uint8)


def _run_grids(grids: np.ndarray, max_steps: int, fast_forward: bool = True) -> np.ndarray:
    """Run a (N, H, W) batch for exactly ``max_steps`` effective steps.

    With ``fast_forward`` the runner drops arenas whose state equals the
    state two steps earlier: such arenas repeat with period 1 or 2
    forever, so their final state is the current or previous one chosen
    by the parity of the remaining steps. The returned batch is
    bit-identical to naive stepping.
    """
    if max_steps <= 0:
        return grids.copy()
    final = np.empty_like(grids)
    idx = np.arange(grids.shape[0])
    prev2: np.ndarray | None = None
    prev1: np.ndarray | None = None
    cur = grids
    for t in range(1, max_steps + 1):
        prev2, prev1, cur = prev1, cur, _step_grids(cur)
        if fast_forward and prev2 is not None:
            settled = (cur == prev2).all(axis=(1, 2))
            if settled.any():
                src = cur if (max_steps - t) % 2 == 0 else prev1
                hit = np.flatnonzero(settled)
                final[idx[hit]] = src[hit]
                if settled.all():
                    return final
                active = ~settled
                idx = idx[active]
                cur, prev1, prev2 = cur[active], prev1[active], prev2[active]
    final[idx] = cur
    return final


# ---------------------------------------------------------------------------
# Game setup and execution


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def size_game(seed_a: SeedGenome, seed_b: SeedGenome, factors: GameFactors) -> GameSpec:
    """Derive arena dimensions and step budget from the competing seeds.

    ``max_size`` is the largest row or column count over both seeds; the
    toroid is max_size scaled by the width and height factors, and the
    step budget is the toroid perimeter-sum (width + height) scaled by
    the time factor. Fractions round half up; results are floored at 1.
    """
    max_size = max(seed_a.rows, seed_a.cols, seed_b.rows, seed_b.cols)
    width = max(1, _round_half_up(max_size * factors.width_factor))
    height = max(1, _round_half_up(max_size * factors.height_factor))
    max_steps = max(1, _round_half_up((width + height) * factors.time_factor))
    return GameSpec(width=width, height=height, max_steps=max_steps)


def _place_into(
    grid: np.ndarray, spec: GameSpec, seed_a: SeedGenome, seed_b: SeedGenome, trial_index: int
) -> None:
    """Write both seeds into ``grid`` (already zeroed).

    Even trials put the first seed as red in the left half and the second
    as blue in the right half; odd trials swap both side and colour so
    positional bias cancels across a trial pair.
    """
    if trial_index % 2 == 0:
        red_seed, blue_seed = seed_a, seed_b
    else:
        red_seed, blue_seed = seed_b, seed_a
    left_w = spec.width // 2
    right_w = spec.width - left_w
    for seed, half_w, col_base, colour in (
        (red_seed, left_w, 0, CellState.RED),
        (blue_seed, right_w, left_w, CellState.BLUE),
    ):
        if seed.rows > spec.height or seed.cols > half_w:
            raise SeedTooLarge(
                f"{seed.rows}x{seed.cols} seed does not fit its "
                f"{spec.height}x{half_w} half of the arena"
            )
        r0 = (spec.height - seed.rows) // 2
        c0 = col_base + (half_w - seed.cols) // 2
        block = grid[r0:r0 + seed.rows, c0:c0 + seed.cols]
        block[seed.bits == 1] = int(colour)


def place_seeds(
    spec: GameSpec, seed_a: SeedGenome, seed_b: SeedGenome, trial_index: int
) -> Arena:
    """Build the initial arena for one game trial."""
    grid = np.zeros((spec.height, spec.width), dtype=np.uint8)
    _place_into(grid, spec, seed_a, seed_b, trial_index)
    return Arena(grid)


def _score_grids(initial: np.ndarray, final: np.ndarray) -> list[GameOutcome]:
    ri = np.count_nonzero(initial == 1, axis=(1, 2))
    bi = np.count_nonzero(initial == 2, axis=(1, 2))
    rf = np.count_nonzero(final == 1, axis=(1, 2))
    bf = np.count_nonzero(final == 2, axis=(1, 2))
    return [
        outcome_from_counts(int(ri[i]), int(rf[i]), int(bi[i]), int(bf[i]))
        for i in range(initial.shape[0])
    ]


def run_game(
    seed_a: SeedGenome, seed_b: SeedGenome, factors: GameFactors, trial_index: int
) -> GameOutcome:
    """Play one full Immigration Game between two seeds."""
    return run_games([(seed_a, seed_b, trial_index)], factors)[0]


Pairing = tuple[SeedGenome, SeedGenome, int]

_BATCH_LIMIT = 2048


def run_games(pairings: Sequence[Pairing], factors: GameFactors) -> list[GameOutcome]:
    """Play many independent games, batching those that share a spec.

    Outcomes are returned in input order. Grouping only changes memory
    layout: each game is simultaneous-update deterministic and never
    interacts with its batch mates.
    """
    outcomes: list[GameOutcome | None] = [None] * len(pairings)
    groups: dict[GameSpec, list[int]] = {}
    for i, (a, b, _) in enumerate(pairings):
        groups.setdefault(size_game(a, b, factors), []).append(i)
    for spec, indices in groups.items():
        for start in range(0, len(indices), _BATCH_LIMIT):
            chunk = indices[start:start + _BATCH_LIMIT]
            initial = np.zeros((len(chunk), spec.height, spec.width), dtype=np.uint8)
            for row, i in enumerate(chunk):
                a, b, trial = pairings[i]
                _place_into(initial[row], spec, a, b, trial)
            finished = _run_grids(initial, spec.max_steps)
            for row, outcome in zip(chunk, _score_grids(initial, finished)):
                outcomes[row] = outcome
    return outcomes  # type: ignore[return-value]


def credit_for_first(outcome: GameOutcome, trial_index: int) -> float:
    """Win credit for the first-listed seed: 1 win, 0.5 tie, 0 loss.

    The first seed played red on even trials and blue on odd ones, so the
    colour result is mapped back through the trial parity.
    """
    if outcome.result is GameResult.TIE:
        return 0.5
    first_was_red = trial_index % 2 == 0
    first_won = (outcome.result is GameResult.RED_WINS) == first_was_red
    return 1.0 if first_won else 0.0
