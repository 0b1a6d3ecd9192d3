"""Report generation: summary tables and figure-style charts from CSVs.

Input files are classified by header (measure, metrics or fusion-event
schemas) and may be mixed freely. For whatever is present, the report
directory receives mean-curve SVG charts per layer, pairwise Welch
t-test tables, a correlation matrix over fitness, area, density and
diversity, fusion event summaries with pairwise significance of the
classification rates, and the correlation between the two external
fitness measures over all generations and at the final generation.
"""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence

from .charts import line_chart
from .evolution import FusionClass, FusionEvent
from .stats import (
    aggregate_curves,
    fusion_event_summary,
    pearson_significance,
    welch_t_test,
)
from .storage import (
    MalformedCsv,
    MeasureRow,
    read_fusion_csv,
    read_measure_csv,
    read_metrics_csv,
    sniff_csv_kind,
)

log = logging.getLogger(__name__)

_fmt = "{:.6g}".format

# series[layer][run] -> sorted list of (generation, value)
Series = dict[str, dict[int, list[tuple[int, float]]]]


def _write_table(path: Path, header: list[str], rows: Iterable[Sequence]) -> None:
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        out.writerows(rows)


def _collapse(points: list[tuple[int, float]]) -> list[tuple[int, float]]:
    """Sort by generation, averaging duplicates (e.g. per-member rows)."""
    by_gen: dict[int, list[float]] = {}
    for gen, value in points:
        by_gen.setdefault(gen, []).append(value)
    return [(gen, sum(vals) / len(vals)) for gen, vals in sorted(by_gen.items())]


def _collect_measures(rows: list[MeasureRow]) -> dict[str, Series]:
    staging: dict[str, Series] = {}
    for row in rows:
        layer_map = staging.setdefault(row.measure, {}).setdefault(row.layer, {})
        layer_map.setdefault(row.run, []).append((row.generation, row.value))
    for layers in staging.values():
        for runs in layers.values():
            for run, points in runs.items():
                runs[run] = _collapse(points)
    return staging


def _layer_mean_curves(series: Series) -> list[tuple[str, list[float], list[float]]]:
    curves = []
    for layer in sorted(series):
        runs = series[layer]
        generations = [g for g, _ in runs[min(runs)]]
        values = [[v for _, v in runs[run]] for run in sorted(runs)]
        means, _ = aggregate_curves(values)
        curves.append((layer, [float(g) for g in generations], means))
    return curves


def _per_run_means(series: Series) -> dict[str, dict[int, float]]:
    """Mean over generations of each run's curve, keyed by layer."""
    result: dict[str, dict[int, float]] = {}
    for layer, runs in series.items():
        result[layer] = {run: sum(v for _, v in pts) / len(pts) for run, pts in runs.items()}
    return result


def _final_values(series: Series) -> dict[str, dict[int, float]]:
    result: dict[str, dict[int, float]] = {}
    for layer, runs in series.items():
        result[layer] = {run: pts[-1][1] for run, pts in runs.items()}
    return result


def _welch_rows(samples: dict[str, dict[int, float]]) -> list[list]:
    rows = []
    layers = sorted(samples)
    for i, layer_a in enumerate(layers):
        for layer_b in layers[i + 1:]:
            a = [samples[layer_a][r] for r in sorted(samples[layer_a])]
            b = [samples[layer_b][r] for r in sorted(samples[layer_b])]
            if len(a) < 2 or len(b) < 2:
                continue
            t = welch_t_test(a, b)
            rows.append([layer_a, layer_b, _fmt(sum(a) / len(a)), _fmt(sum(b) / len(b)),
                         _fmt(t.statistic), _fmt(t.degrees_of_freedom), _fmt(t.p_value),
                         "yes" if t.significant else "no"])
    return rows


def generate_report(csv_paths: Sequence[Path], out_dir: Path) -> list[Path]:
    """Build every table and chart the supplied CSVs can support."""
    measure_rows: list[MeasureRow] = []
    metrics_rows: list[dict] = []
    fusion_rows: list[tuple[str, int, FusionEvent]] = []
    for path in csv_paths:
        kind = sniff_csv_kind(path)
        if kind == "measure":
            measure_rows.extend(read_measure_csv(path))
        elif kind == "metrics":
            metrics_rows.extend(read_metrics_csv(path))
        elif kind == "fusion":
            fusion_rows.extend(read_fusion_csv(path))
        else:
            raise MalformedCsv(f"{path}: {kind} files are not report inputs")

    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, content: str) -> None:
        path = out_dir / name
        path.write_text(content)
        written.append(path)

    measures = _collect_measures(measure_rows)
    for measure, series in measures.items():
        emit(f"{measure}.svg", line_chart(
            _layer_mean_curves(series),
            title=f"{measure} (mean per layer)",
            x_label="generation", y_label=measure,
        ))
        rows = _welch_rows(_per_run_means(series))
        if rows:
            path = out_dir / f"welch_{measure}.csv"
            _write_table(path, ["layer_a", "layer_b", "mean_a", "mean_b",
                                "t", "dof", "p_value", "significant"], rows)
            written.append(path)

    metric_series: dict[str, Series] = {}
    for column in ("elite_area", "elite_density", "elite_diversity"):
        series: Series = {}
        for row in metrics_rows:
            layer_map = series.setdefault(str(row["layer"]), {})
            layer_map.setdefault(int(row["run"]), []).append(
                (int(row["generation"]), float(row[column])))
        for runs in series.values():
            for run, points in runs.items():
                runs[run] = _collapse(points)
        if series:
            metric_series[column] = series
            emit(f"{column}.svg", line_chart(
                _layer_mean_curves(series),
                title=f"{column} (mean per layer)",
                x_label="generation", y_label=column,
            ))

    _correlation_table(measures, metric_series, out_dir, written)
    _fusion_tables(fusion_rows, out_dir, written)
    _measure_correlation(measures, out_dir, written)
    return written


def _correlation_table(measures: dict[str, Series], metric_series: dict[str, Series],
                       out_dir: Path, written: list[Path]) -> None:
    """Pairwise correlations of fitness, area, density and diversity.

    One value per (layer, run): the mean over generations. All runs pool
    into a single sample per feature.
    """
    if "vs_random" not in measures or len(metric_series) < 3:
        return
    features: dict[str, dict[tuple[str, int], float]] = {}
    fitness_means = _per_run_means(measures["vs_random"])
    features["fitness"] = {(layer, run): v for layer, runs in fitness_means.items()
                           for run, v in runs.items()}
    for column, short in (("elite_area", "area"), ("elite_density", "density"),
                          ("elite_diversity", "diversity")):
        means = _per_run_means(metric_series[column])
        features[short] = {(layer, run): v for layer, runs in means.items()
                           for run, v in runs.items()}
    keys = sorted(set.intersection(*(set(f) for f in features.values())))
    if len(keys) < 3:
        log.warning("correlation table skipped: only %d matching runs", len(keys))
        return
    names = ["area", "density", "diversity", "fitness"]
    rows = []
    for i, first in enumerate(names):
        for second in names[i + 1:]:
            x = [features[first][k] for k in keys]
            y = [features[second][k] for k in keys]
            r, test = pearson_significance(x, y)
            rows.append([first, second, _fmt(r), _fmt(test.statistic),
                         _fmt(test.degrees_of_freedom), _fmt(test.p_value),
                         "yes" if test.significant else "no"])
    path = out_dir / "correlations.csv"
    _write_table(path, ["feature_1", "feature_2", "correlation", "t", "dof",
                        "p_value", "significant"], rows)
    written.append(path)


def _fusion_tables(fusion_rows: list[tuple[str, int, FusionEvent]],
                   out_dir: Path, written: list[Path]) -> None:
    if not fusion_rows:
        return
    by_layer_run: dict[str, dict[int, list[FusionEvent]]] = defaultdict(lambda: defaultdict(list))
    for layer, run, event in fusion_rows:
        by_layer_run[layer][run].append(event)

    summary_rows = []
    rate_samples: dict[str, dict[FusionClass, list[float]]] = {}
    for layer in sorted(by_layer_run):
        runs = by_layer_run[layer]
        summaries = {run: fusion_event_summary(events) for run, events in runs.items()}
        nonempty = [s for s in summaries.values() if s.attempts]
        n_runs = len(summaries)
        mean_events = sum(s.accepted for s in summaries.values()) / n_runs
        mean_mutualisms = sum(s.mutualisms for s in summaries.values()) / n_runs
        rate_samples[layer] = {
            cls: [s.percentages[cls] for s in nonempty]
            for cls in FusionClass
        }
        percentages = {
            cls: (sum(rate_samples[layer][cls]) / len(nonempty) if nonempty else 0.0)
            for cls in FusionClass
        }
        summary_rows.append([
            layer, n_runs, _fmt(mean_events), _fmt(mean_mutualisms),
            _fmt(percentages[FusionClass.NO_PARTS_BENEFIT]),
            _fmt(percentages[FusionClass.ONE_PART_BENEFITS]),
            _fmt(percentages[FusionClass.BOTH_PARTS_BENEFIT]),
        ])
    path = out_dir / "fusion_summary.csv"
    _write_table(path, ["layer", "runs", "mean_accepted_events", "mean_mutualisms",
                        "no_parts_pct", "one_part_pct", "both_parts_pct"], summary_rows)
    written.append(path)

    # Pairwise significance of classification rates; runs without any
    # fusion attempt carry no rate and are excluded from the samples.
    test_rows = []
    layers = sorted(rate_samples)
    for i, layer_a in enumerate(layers):
        for layer_b in layers[i + 1:]:
            for cls in FusionClass:
                a = rate_samples[layer_a][cls]
                b = rate_samples[layer_b][cls]
                if len(a) < 2 or len(b) < 2:
                    continue
                t = welch_t_test(a, b)
                test_rows.append([layer_a, layer_b, cls.value,
                                  _fmt(sum(a) / len(a)), _fmt(sum(b) / len(b)),
                                  _fmt(t.p_value), "yes" if t.significant else "no"])
    if test_rows:
        path = out_dir / "fusion_rate_tests.csv"
        _write_table(path, ["layer_a", "layer_b", "classification", "pct_a", "pct_b",
                            "p_value", "significant"], test_rows)
        written.append(path)


def _measure_correlation(measures: dict[str, Series], out_dir: Path,
                         written: list[Path]) -> None:
    """Correlation between the random-seed and past-winner measures."""
    if "vs_random" not in measures or "vs_past_winners" not in measures:
        return
    rows = []
    for scope, extract in (("all_generations", _per_run_means),
                           ("final_generation", _final_values)):
        a = extract(measures["vs_random"])
        b = extract(measures["vs_past_winners"])
        keys = sorted({(layer, run) for layer, runs in a.items() for run in runs}
                      & {(layer, run) for layer, runs in b.items() for run in runs})
        if len(keys) < 3:
            continue
        x = [a[layer][run] for layer, run in keys]
        y = [b[layer][run] for layer, run in keys]
        r, test = pearson_significance(x, y)
        rows.append([scope, len(keys), _fmt(r), _fmt(test.p_value),
                     "yes" if test.significant else "no"])
    if rows:
        path = out_dir / "measure_correlation.csv"
        _write_table(path, ["scope", "pairs", "correlation", "p_value", "significant"], rows)
        written.append(path)
