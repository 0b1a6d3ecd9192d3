"""External fitness measures and the pattern/archive plumbing behind them.

Relative fitness inside a population says nothing across populations, so
three absolute measures are provided: win rate against size- and
density-matched random seeds, win rate against human-designed patterns
from RLE files, and an unbounded score built from competitions against
archived past champions. All three ride on the same game engine used by
the evolutionary loop.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .engine import GameFactors, credit_for_first, run_games
from .genome import SeedGenome, matched_random_seed

log = logging.getLogger(__name__)


class MalformedRle(ValueError):
    """The text is not a well-formed run-length-encoded pattern."""


class UnsupportedRule(MalformedRle):
    """The pattern declares a rule other than B3/S23."""


# ---------------------------------------------------------------------------
# Elite archives


@dataclass(frozen=True)
class EliteRecord:
    genome: SeedGenome
    fitness: float


class EliteArchive:
    """Per-generation snapshots of the fittest members of a run.

    Records within a generation are kept sorted by descending relative
    fitness; rank 0 is the generation champion.
    """

    def __init__(self, records: dict[int, list[EliteRecord]]):
        self._records = {
            gen: sorted(rows, key=lambda r: -r.fitness)
            for gen, rows in records.items()
        }

    @property
    def generations(self) -> list[int]:
        return sorted(self._records)

    @property
    def max_generation(self) -> int:
        return max(self._records)

    def elite(self, generation: int) -> list[EliteRecord]:
        if generation not in self._records:
            raise KeyError(f"archive has no generation {generation}")
        return self._records[generation]

    def champion(self, generation: int) -> EliteRecord:
        return self.elite(generation)[0]


# ---------------------------------------------------------------------------
# Measure 1: matched random opponents


def fitness_vs_random(
    genome: SeedGenome, opponents: int, factors: GameFactors, rng: np.random.Generator
) -> float:
    """Win fraction against random seeds matched on shape and live count.

    Every opponent has exactly the subject's rows, columns and number of
    live cells, so any edge can only come from the arrangement of the
    bits. One game per opponent, sides alternating; ties count 0.5.
    """
    if opponents < 1:
        raise ValueError("need at least one opponent")
    pairings = [(genome, matched_random_seed(genome, rng), i % 2) for i in range(opponents)]
    outcomes = run_games(pairings, factors)
    credit = sum(credit_for_first(o, t) for (_, _, t), o in zip(pairings, outcomes))
    return credit / opponents


# ---------------------------------------------------------------------------
# Measure 2: human-designed RLE patterns


@dataclass(frozen=True)
class RlePattern:
    name: str
    width: int
    height: int
    bits: np.ndarray

    @property
    def area(self) -> int:
        return self.width * self.height

    def to_genome(self) -> SeedGenome:
        return SeedGenome(self.bits)


_HEADER_RE = re.compile(
    r"x\s*=\s*(\d+)\s*,\s*y\s*=\s*(\d+)\s*(?:,\s*rule\s*=\s*(\S+))?\s*$"
)


def parse_rle(text: str, name: str = "") -> RlePattern:
    """Decode a Life RLE pattern.

    Accepts ``#`` comment lines, a ``x = W, y = H`` header with an
    optional ``rule = B3/S23``, and a body of ``<count>b``, ``<count>o``
    and ``<count>$`` tokens ending in ``!``. Rows shorter than the
    declared width are padded dead. Raises MalformedRle on anything
    else, UnsupportedRule for any rule that is not B3/S23.
    """
    header: str | None = None
    body_parts: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if stripped[:2] == "#N" and not name:
                name = stripped[2:].strip()
            continue
        if header is None:
            header = stripped
        else:
            body_parts.append(stripped)
    if header is None:
        raise MalformedRle("missing 'x = W, y = H' header")
    match = _HEADER_RE.match(header)
    if match is None:
        raise MalformedRle(f"bad header line: {header!r}")
    width, height = int(match[1]), int(match[2])
    if width < 1 or height < 1:
        raise MalformedRle(f"declared size {width}x{height} must be at least 1x1")
    if width * height > 64_000_000:
        raise MalformedRle(f"declared size {width}x{height} is implausibly large")
    rule = match[3]
    if rule is not None and rule.upper() != "B3/S23":
        raise UnsupportedRule(f"rule {rule!r} is not B3/S23")

    bits = np.zeros((height, width), dtype=np.uint8)
    row = col = count = 0
    terminated = False
    for ch in "".join(body_parts):
        if ch.isdigit():
            count = count * 10 + int(ch)
        elif ch in "bo":
            run = count or 1
            count = 0
            if row >= height or col + run > width:
                raise MalformedRle(
                    f"content overflows the declared {width}x{height} bounds"
                )
            if ch == "o":
                bits[row, col:col + run] = 1
            col += run
        elif ch == "$":
            run = count or 1
            count = 0
            row += run
            col = 0
            if row > height:
                raise MalformedRle("row terminators run past the declared height")
        elif ch == "!":
            if count:
                raise MalformedRle("dangling run count before '!'")
            terminated = True
            break
        else:
            raise MalformedRle(f"unexpected character {ch!r} in pattern body")
    if not terminated:
        raise MalformedRle("missing '!' terminator")
    return RlePattern(name=name, width=width, height=height, bits=bits)


def emit_rle(pattern: RlePattern) -> str:
    """Encode a pattern in canonical RLE: counted runs, 70-column lines."""
    tokens: list[str] = []
    pending_rows = 0

    def push(run: int, symbol: str) -> None:
        tokens.append(f"{run}{symbol}" if run > 1 else symbol)

    for r in range(pattern.height):
        live = np.flatnonzero(pattern.bits[r])
        if live.size == 0:
            pending_rows += 1
            continue
        if tokens:
            push(pending_rows + 1, "$")
        elif pending_rows:
            push(pending_rows, "$")
        pending_rows = 0
        end = int(live[-1]) + 1
        col = 0
        while col < end:
            value = pattern.bits[r, col]
            run = 1
            while col + run < end and pattern.bits[r, col + run] == value:
                run += 1
            push(run, "o" if value else "b")
            col += run
    tokens.append("!")

    lines: list[str] = []
    current = ""
    for token in tokens:
        if current and len(current) + len(token) > 70:
            lines.append(current)
            current = ""
        current += token
    lines.append(current)
    header = f"x = {pattern.width}, y = {pattern.height}, rule = B3/S23"
    prefix = f"#N {pattern.name}\n" if pattern.name else ""
    return prefix + header + "\n" + "\n".join(lines) + "\n"


def bundled_pattern_dir() -> Path:
    return Path(__file__).resolve().parent / "patterns"


def load_patterns(directory: str | Path | None = None) -> list[RlePattern]:
    """Parse every ``*.rle`` file in a directory, sorted by file name.

    Patterns are named after their file so result tables line up with
    the on-disk corpus.
    """
    root = Path(directory) if directory else bundled_pattern_dir()
    patterns = []
    for path in sorted(root.glob("*.rle")):
        patterns.append(parse_rle(path.read_text(), name=path.name))
    if not patterns:
        raise FileNotFoundError(f"no .rle patterns found in {root}")
    return patterns


@dataclass(frozen=True)
class PatternScore:
    name: str
    area: int
    win_percent: float


@dataclass(frozen=True)
class PatternTournamentResult:
    scores: list[PatternScore]
    average_area: float
    average_win_percent: float


def pattern_tournament(
    champions: Sequence[SeedGenome],
    patterns: Iterable[RlePattern],
    area_limit: int,
    games_per_pairing: int,
    factors: GameFactors,
) -> PatternTournamentResult:
    """Pit evolved champions against every pattern within the area limit.

    Each champion plays ``games_per_pairing`` games per pattern with
    alternating sides. Reported percentages are from the evolved side,
    ties counted half.
    """
    eligible = [p for p in patterns if p.area <= area_limit]
    if not eligible:
        raise ValueError(f"no patterns within area limit {area_limit}")
    if not champions:
        raise ValueError("need at least one champion")
    scores = []
    for pattern in eligible:
        opponent = pattern.to_genome()
        pairings = [
            (champion, opponent, t)
            for champion in champions
            for t in range(games_per_pairing)
        ]
        outcomes = run_games(pairings, factors)
        credit = sum(credit_for_first(o, t) for (_, _, t), o in zip(pairings, outcomes))
        scores.append(PatternScore(
            name=pattern.name or "unnamed",
            area=pattern.area,
            win_percent=100.0 * credit / len(pairings),
        ))
    return PatternTournamentResult(
        scores=scores,
        average_area=float(np.mean([s.area for s in scores])),
        average_win_percent=float(np.mean([s.win_percent for s in scores])),
    )


# ---------------------------------------------------------------------------
# Measure 3: past winners (unbounded)


def estimate_p(
    elite_earlier: Sequence[EliteRecord],
    elite_later: Sequence[EliteRecord],
    factors: GameFactors,
    top: int = 10,
    games_per_pair: int = 2,
) -> float:
    """Estimated probability that the later elite beats the earlier one.

    The top ``top`` seeds of each generation meet pairwise, each pair
    playing ``games_per_pair`` games with alternating sides (200 games
    under the defaults). Generations holding fewer records simply use
    what they have, with a log note.
    """
    earlier = [r.genome for r in elite_earlier[:top]]
    later = [r.genome for r in elite_later[:top]]
    if not earlier or not later:
        raise ValueError("both generations need at least one elite record")
    if len(earlier) < top or len(later) < top:
        log.warning("estimate_p using %d x %d seeds (fewer than top %d available)",
                    len(later), len(earlier), top)
    pairings = [
        (new, old, t)
        for new in later
        for old in earlier
        for t in range(games_per_pair)
    ]
    outcomes = run_games(pairings, factors)
    credit = sum(credit_for_first(o, t) for (_, _, t), o in zip(pairings, outcomes))
    return credit / len(pairings)


def champion_estimate_p(
    champion_earlier: SeedGenome,
    champion_later: SeedGenome,
    factors: GameFactors,
    games: int = 50,
) -> float:
    """Single-pair variant: the two champions alone play ``games`` games."""
    pairings = [(champion_later, champion_earlier, t) for t in range(games)]
    outcomes = run_games(pairings, factors)
    credit = sum(credit_for_first(o, t) for (_, _, t), o in zip(pairings, outcomes))
    return credit / games


def unbounded_fitness(
    archive: EliteArchive,
    n: int,
    factors: GameFactors,
    top: int = 10,
    games_per_pair: int = 2,
) -> float:
    """Cumulative edge of generation ``n`` over every earlier generation.

    Each earlier generation i contributes ``2 * p - 1`` where p estimates
    the probability that generation n beats generation i, so the score
    rises while the population keeps improving on its past, is zero for a
    population that never beats its history, and ranges in [-n, +n].
    """
    total = 0.0
    later = archive.elite(n)
    for i in range(n):
        p = estimate_p(archive.elite(i), later, factors, top=top,
                       games_per_pair=games_per_pair)
        total += 2.0 * p - 1.0
    return total
