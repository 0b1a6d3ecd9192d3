"""CSV persistence for runs, archives and measure outputs.

Every file is line-oriented with a declared header row. Genomes embed in
a single CSV field as the seed text format with ``/`` standing in for
newlines, so files stay one-record-per-line and the field parses back
losslessly. Floats are written with ``repr`` for exact round-trips, and
all writers pin the line terminator so identical data means identical
bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .evolution import ArchiveRow, FusionClass, FusionEvent, MetricsRow
from .genome import SeedGenome
from .measures import EliteArchive, EliteRecord, PatternTournamentResult


class MalformedCsv(ValueError):
    """A CSV file does not match its declared schema."""


class MissingArchive(ValueError):
    """A run directory lacks the expected archive file."""


ARCHIVE_HEADER = ["generation", "rank", "id", "fitness", "area", "density", "origin", "genome"]
METRICS_HEADER = ["layer", "run", "generation", "elite_area", "elite_density", "elite_diversity"]
FUSION_HEADER = ["layer", "run", "generation", "part_a_fitness", "part_b_fitness",
                 "whole_fitness", "classification", "accepted"]
MEASURE_HEADER = ["layer", "run", "generation", "measure", "value"]
PATTERN_HEADER_PREFIX = ["pattern", "area"]


def _fmt(value: float) -> str:
    return repr(float(value))


def genome_to_field(genome: SeedGenome) -> str:
    return genome.to_text().rstrip("\n").replace("\n", "/")


def genome_from_field(field: str) -> SeedGenome:
    return SeedGenome.from_text(field.replace("/", "\n"))


def _writer(fh: TextIO):
    return csv.writer(fh, lineterminator="\n")


def _check_header(path: Path, header: list[str] | None, expected: list[str]) -> None:
    if header != expected:
        raise MalformedCsv(f"{path}: expected header {expected}, got {header}")


# ---------------------------------------------------------------------------
# Per-run files


def write_archive_csv(path: Path, rows: Iterable[ArchiveRow]) -> None:
    with path.open("w", newline="") as fh:
        out = _writer(fh)
        out.writerow(ARCHIVE_HEADER)
        for r in rows:
            out.writerow([r.generation, r.rank, r.id, _fmt(r.fitness), r.area,
                          _fmt(r.density), r.origin.value, genome_to_field(r.genome)])


def read_archive_csv(path: Path) -> EliteArchive:
    if not path.is_file():
        raise MissingArchive(f"no archive at {path}")
    generations: dict[int, list[EliteRecord]] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), ARCHIVE_HEADER)
        for line in reader:
            try:
                gen = int(line[0])
                record = EliteRecord(genome=genome_from_field(line[7]), fitness=float(line[3]))
            except (IndexError, ValueError) as exc:
                raise MalformedCsv(f"{path}: bad archive row {line!r}: {exc}") from None
            generations.setdefault(gen, []).append(record)
    if not generations:
        raise MalformedCsv(f"{path}: archive holds no records")
    return EliteArchive(generations)


def write_metrics_csv(path: Path, layer: str, run: int, rows: Iterable[MetricsRow]) -> None:
    with path.open("w", newline="") as fh:
        out = _writer(fh)
        out.writerow(METRICS_HEADER)
        for r in rows:
            out.writerow([layer, run, r.generation, _fmt(r.elite_area),
                          _fmt(r.elite_density), _fmt(r.elite_diversity)])


def write_fusion_csv(path: Path, layer: str, run: int, events: Iterable[FusionEvent]) -> None:
    with path.open("w", newline="") as fh:
        out = _writer(fh)
        out.writerow(FUSION_HEADER)
        for e in events:
            out.writerow([layer, run, e.generation, _fmt(e.part_a_fitness),
                          _fmt(e.part_b_fitness), _fmt(e.whole_fitness),
                          e.classification.value, int(e.accepted)])


def read_fusion_csv(path: Path) -> list[tuple[str, int, FusionEvent]]:
    rows: list[tuple[str, int, FusionEvent]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), FUSION_HEADER)
        for line in reader:
            try:
                event = FusionEvent(
                    generation=int(line[2]),
                    part_a_fitness=float(line[3]),
                    part_b_fitness=float(line[4]),
                    whole_fitness=float(line[5]),
                    classification=FusionClass(line[6]),
                    accepted=bool(int(line[7])),
                )
                rows.append((line[0], int(line[1]), event))
            except (IndexError, ValueError) as exc:
                raise MalformedCsv(f"{path}: bad fusion row {line!r}: {exc}") from None
    return rows


# ---------------------------------------------------------------------------
# Measure outputs


@dataclass(frozen=True)
class MeasureRow:
    layer: str
    run: int
    generation: int
    measure: str
    value: float


def write_measure_csv(fh: TextIO, rows: Iterable[MeasureRow]) -> None:
    out = _writer(fh)
    out.writerow(MEASURE_HEADER)
    for r in rows:
        out.writerow([r.layer, r.run, r.generation, r.measure, _fmt(r.value)])


def read_measure_csv(path: Path) -> list[MeasureRow]:
    rows: list[MeasureRow] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), MEASURE_HEADER)
        for line in reader:
            try:
                rows.append(MeasureRow(line[0], int(line[1]), int(line[2]),
                                       line[3], float(line[4])))
            except (IndexError, ValueError) as exc:
                raise MalformedCsv(f"{path}: bad measure row {line!r}: {exc}") from None
    return rows


def write_pattern_csv(fh: TextIO, results: dict[str, PatternTournamentResult]) -> None:
    """Wide table mirroring the tournament layout: one column per layer.

    Rows align by pattern name; a final AVERAGE row carries mean pattern
    area and the per-layer mean win percentage.
    """
    layers = sorted(results)
    out = _writer(fh)
    out.writerow(PATTERN_HEADER_PREFIX + layers)
    by_layer = {layer: {s.name: s for s in results[layer].scores} for layer in layers}
    names: list[str] = []
    for layer in layers:
        for score in results[layer].scores:
            if score.name not in names:
                names.append(score.name)
    for name in names:
        area = next(by_layer[layer][name].area for layer in layers
                    if name in by_layer[layer])
        out.writerow([name, area] + [
            _fmt(by_layer[layer][name].win_percent) if name in by_layer[layer] else ""
            for layer in layers])
    out.writerow(["AVERAGE",
                  _fmt(sum(results[layer].average_area for layer in layers) / len(layers))]
                 + [_fmt(results[layer].average_win_percent) for layer in layers])


def sniff_csv_kind(path: Path) -> str:
    """Classify a CSV by its header: measure, metrics, fusion or pattern."""
    with path.open(newline="") as fh:
        header = next(csv.reader(fh), None)
    for kind, expected in (("measure", MEASURE_HEADER), ("metrics", METRICS_HEADER),
                           ("fusion", FUSION_HEADER), ("archive", ARCHIVE_HEADER)):
        if header == expected:
            return kind
    if header and header[:2] == PATTERN_HEADER_PREFIX:
        return "pattern"
    raise MalformedCsv(f"{path}: unrecognised header {header}")


def read_metrics_csv(path: Path) -> list[dict[str, float | int | str]]:
    rows: list[dict[str, float | int | str]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        _check_header(path, next(reader, None), METRICS_HEADER)
        for line in reader:
            try:
                rows.append({
                    "layer": line[0],
                    "run": int(line[1]),
                    "generation": int(line[2]),
                    "elite_area": float(line[3]),
                    "elite_density": float(line[4]),
                    "elite_diversity": float(line[5]),
                })
            except (IndexError, ValueError) as exc:
                raise MalformedCsv(f"{path}: bad metrics row {line!r}: {exc}") from None
    return rows
