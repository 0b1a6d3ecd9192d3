"""CSV persistence round-trips and schema enforcement."""

from __future__ import annotations

import io

import pytest

from symlife.evolution import ArchiveRow, FusionClass, FusionEvent, MetricsRow, Origin
from symlife.genome import random_seed
from symlife.storage import (
    MalformedCsv,
    MeasureRow,
    MissingArchive,
    genome_from_field,
    genome_to_field,
    read_archive_csv,
    read_fusion_csv,
    read_measure_csv,
    read_metrics_csv,
    sniff_csv_kind,
    write_archive_csv,
    write_fusion_csv,
    write_measure_csv,
    write_metrics_csv,
)


def archive_rows(rng, generations=2, per_gen=3):
    rows = []
    for gen in range(generations):
        for rank in range(per_gen):
            g = random_seed(5, 5, 0.4, rng)
            rows.append(ArchiveRow(gen, rank, gen * per_gen + rank,
                                   1.0 - rank / 10, g.area, g.density,
                                   Origin.FLIP, g))
    return rows


class TestGenomeField:
    def test_round_trip(self, rng):
        g = random_seed(4, 9, 0.5, rng)
        field = genome_to_field(g)
        assert "\n" not in field
        assert genome_from_field(field) == g


class TestArchiveCsv:
    def test_round_trip(self, tmp_path, rng):
        rows = archive_rows(rng)
        path = tmp_path / "archive.csv"
        write_archive_csv(path, rows)
        archive = read_archive_csv(path)
        assert archive.generations == [0, 1]
        assert len(archive.elite(0)) == 3
        assert archive.champion(1).fitness == 1.0
        assert archive.champion(1).genome == rows[3].genome

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(MissingArchive):
            read_archive_csv(tmp_path / "absent.csv")

    def test_wrong_header_raises(self, tmp_path):
        path = tmp_path / "archive.csv"
        path.write_text("generation,rank\n0,0\n")
        with pytest.raises(MalformedCsv):
            read_archive_csv(path)

    def test_corrupt_row_raises(self, tmp_path, rng):
        path = tmp_path / "archive.csv"
        write_archive_csv(path, archive_rows(rng))
        lines = path.read_text().splitlines()
        lines[1] = "0,0"  # truncated record
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedCsv):
            read_archive_csv(path)


class TestFusionCsv:
    def test_round_trip(self, tmp_path):
        events = [
            FusionEvent(3, 0.5, 0.625, 0.75, FusionClass.BOTH_PARTS_BENEFIT, True),
            FusionEvent(4, 0.5, 0.625, 0.1, FusionClass.NO_PARTS_BENEFIT, False),
        ]
        path = tmp_path / "fusion_events.csv"
        write_fusion_csv(path, "layer4", 2, events)
        rows = read_fusion_csv(path)
        assert rows == [("layer4", 2, events[0]), ("layer4", 2, events[1])]


class TestMetricsCsv:
    def test_round_trip(self, tmp_path):
        rows = [MetricsRow(0, 25.0, 0.375, 0.01), MetricsRow(1, 26.5, 0.35, 0.02)]
        path = tmp_path / "metrics.csv"
        write_metrics_csv(path, "layer2", 0, rows)
        parsed = read_metrics_csv(path)
        assert parsed[1]["elite_area"] == 26.5
        assert parsed[0]["layer"] == "layer2"


class TestMeasureCsv:
    def test_round_trip(self, tmp_path):
        rows = [MeasureRow("layer1", 0, 0, "vs_random", 0.5),
                MeasureRow("layer1", 0, 1, "vs_random", 0.625)]
        path = tmp_path / "m.csv"
        with path.open("w", newline="") as fh:
            write_measure_csv(fh, rows)
        assert read_measure_csv(path) == rows

    def test_stdout_writer_accepts_any_text_stream(self):
        buffer = io.StringIO()
        write_measure_csv(buffer, [MeasureRow("layer1", 0, 0, "vs_random", 0.5)])
        assert buffer.getvalue().splitlines()[0] == "layer,run,generation,measure,value"


class TestSniff:
    def test_recognises_all_kinds(self, tmp_path, rng):
        from symlife.measures import PatternScore, PatternTournamentResult
        from symlife.storage import write_pattern_csv

        write_archive_csv(tmp_path / "a.csv", archive_rows(rng, 1, 1))
        write_metrics_csv(tmp_path / "m.csv", "layer1", 0, [MetricsRow(0, 1, 1, 0)])
        write_fusion_csv(tmp_path / "f.csv", "layer4", 0, [])
        with (tmp_path / "v.csv").open("w", newline="") as fh:
            write_measure_csv(fh, [])
        with (tmp_path / "p.csv").open("w", newline="") as fh:
            write_pattern_csv(fh, {"layer1": PatternTournamentResult(
                [PatternScore("block.rle", 4, 50.0)], 4.0, 50.0)})
        assert sniff_csv_kind(tmp_path / "a.csv") == "archive"
        assert sniff_csv_kind(tmp_path / "m.csv") == "metrics"
        assert sniff_csv_kind(tmp_path / "f.csv") == "fusion"
        assert sniff_csv_kind(tmp_path / "v.csv") == "measure"
        assert sniff_csv_kind(tmp_path / "p.csv") == "pattern"

    def test_unknown_header_raises(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(MalformedCsv):
            sniff_csv_kind(path)
