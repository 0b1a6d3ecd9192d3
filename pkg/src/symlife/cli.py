"""Command-line interface.

Subcommands:
    run       execute the configured runs and persist their artifacts
    validate  parse and validate a config file
    measure   apply an external fitness measure to finished run dirs
    report    turn measure/metrics/fusion CSVs into tables and charts

Exit codes: 0 success, 1 configuration error (including bad usage),
2 I/O error, 3 data error. The environment variable SYMLIFE_OUTPUT_ROOT,
when set, anchors relative output directories.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, experiment
from .config import ConfigError, ExperimentConfig, load_config
from .measures import (
    MalformedRle,
    fitness_vs_random,
    load_patterns,
    pattern_tournament,
    unbounded_fitness,
    champion_estimate_p,
)
from .report import generate_report
from .storage import (
    MalformedCsv,
    MeasureRow,
    MissingArchive,
    read_archive_csv,
    write_measure_csv,
    write_pattern_csv,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_DATA = 3

OUTPUT_ROOT_ENV = "SYMLIFE_OUTPUT_ROOT"


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # keep usage problems on our exit-code map
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="symlife", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"symlife {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the configured experiment runs")
    p_run.add_argument("config", help="path to a key = value config file")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="worker processes for independent runs (default 1)")
    p_run.add_argument("--full-scale", action="store_true",
                       help="force the standard full-scale protocol: default model "
                            "parameters and 12 runs; only the layer selection, seed "
                            "and paths are taken from the config file")

    p_val = sub.add_parser("validate", help="check a config file and print the result")
    p_val.add_argument("config")

    p_meas = sub.add_parser("measure", help="apply an external fitness measure")
    p_meas.add_argument("run_dirs", nargs="+", help="run directories produced by 'run'")
    p_meas.add_argument("--measure", required=True,
                        choices=["vs-random", "vs-patterns", "vs-past-winners"])
    p_meas.add_argument("--out", help="output CSV path (default stdout)")
    p_meas.add_argument("--opponents", type=int, default=50,
                        help="random opponents per seed (vs-random, default 50)")
    p_meas.add_argument("--top", type=int, default=0,
                        help="elite seeds evaluated per generation; 0 = all (vs-random)")
    p_meas.add_argument("--every", type=int, default=1,
                        help="evaluate every Nth generation (default 1)")
    p_meas.add_argument("--games", type=int, default=None,
                        help="games per champion/pattern pairing (vs-patterns, default "
                             "20) or per champion pair (vs-past-winners champions "
                             "protocol, default 50)")
    p_meas.add_argument("--area-limit", type=int, default=10_000,
                        help="pattern area cutoff (vs-patterns, default 10000)")
    p_meas.add_argument("--patterns", help="pattern directory (default: bundled corpus)")
    p_meas.add_argument("--protocol", choices=["top10", "champions"], default="top10",
                        help="past-winner estimation protocol (default top10)")
    p_meas.add_argument("--seed", type=int, default=0,
                        help="master seed for measure randomness (default 0)")

    p_rep = sub.add_parser("report", help="summarise measure CSVs into tables and charts")
    p_rep.add_argument("csvs", nargs="+")
    p_rep.add_argument("--out-dir", default="report")
    return parser


def _resolve_out(path_str: str) -> Path:
    path = Path(path_str)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.full_scale:
        config = replace(
            ExperimentConfig(),
            experiment_type_num=config.experiment_type_num,
            symbiosis_flag=config.symbiosis_flag,
            fusion_test_flag=config.fusion_test_flag,
            rng_seed=config.rng_seed,
            num_runs=12,
            output_dir=config.output_dir,
            pattern_dir=config.pattern_dir,
        )
    out_root = _resolve_out(config.output_dir)
    manifest = experiment.run_all(config, out_root, jobs=max(1, args.jobs))
    print(f"{manifest['num_runs']} run(s) of {manifest['layer']} written to {out_root}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    print(f"ok: {config.layer_label()}, pop_size={config.pop_size}, "
          f"num_generations={config.num_generations}, num_runs={config.num_runs}")
    return EXIT_OK


def _load_run(run_dir: Path):
    config = load_config(run_dir / experiment.CONFIG_FILE)
    archive = read_archive_csv(run_dir / experiment.ARCHIVE_FILE)
    run_index = int(run_dir.name.split("_")[-1]) if "_" in run_dir.name else 0
    return config, archive, run_index


def _measure_rng(master: int, run_index: int, generation: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master, run_index, generation]))


def cmd_measure(args: argparse.Namespace) -> int:
    run_dirs = [Path(d) for d in args.run_dirs]
    for run_dir in run_dirs:
        if not run_dir.is_dir():
            raise MissingArchive(f"{run_dir} is not a run directory")

    if args.games is None:
        args.games = 50 if args.protocol == "champions" else 20

    rows: list[MeasureRow] = []
    if args.measure == "vs-random":
        for run_dir in run_dirs:
            config, archive, run_index = _load_run(run_dir)
            label, factors = config.layer_label(), config.factors()
            for gen in archive.generations:
                if gen % max(1, args.every) and gen != archive.max_generation:
                    continue
                elite = archive.elite(gen)
                if args.top > 0:
                    elite = elite[:args.top]
                rng = _measure_rng(args.seed, run_index, gen)
                # One row per evaluated elite member; consumers average.
                rows.extend(
                    MeasureRow(label, run_index, gen, "vs_random",
                               fitness_vs_random(r.genome, args.opponents, factors, rng))
                    for r in elite)
    elif args.measure == "vs-past-winners":
        for run_dir in run_dirs:
            config, archive, run_index = _load_run(run_dir)
            label, factors = config.layer_label(), config.factors()
            for gen in archive.generations:
                if gen % max(1, args.every) and gen != archive.max_generation:
                    continue
                if args.protocol == "top10":
                    value = unbounded_fitness(archive, gen, factors)
                else:
                    value = sum(
                        2.0 * champion_estimate_p(archive.champion(i).genome,
                                                  archive.champion(gen).genome,
                                                  factors, games=args.games) - 1.0
                        for i in range(gen))
                rows.append(MeasureRow(label, run_index, gen, "vs_past_winners", value))
    else:  # vs-patterns
        patterns = load_patterns(args.patterns)
        by_layer: dict[str, list] = {}
        for run_dir in run_dirs:
            config, archive, _ = _load_run(run_dir)
            champion = archive.champion(archive.max_generation).genome
            by_layer.setdefault(config.layer_label(), []).append((champion, config.factors()))
        results = {}
        for label, entries in by_layer.items():
            champions = [c for c, _ in entries]
            results[label] = pattern_tournament(champions, patterns, args.area_limit,
                                                args.games, entries[0][1])
        out = open(args.out, "w", newline="") if args.out else sys.stdout
        try:
            write_pattern_csv(out, results)
        finally:
            if args.out:
                out.close()
        return EXIT_OK

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        write_measure_csv(out, rows)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    written = generate_report([Path(p) for p in args.csvs], _resolve_out(args.out_dir))
    for path in written:
        print(path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {"run": cmd_run, "validate": cmd_validate,
                "measure": cmd_measure, "report": cmd_report}
    try:
        return handlers[args.command](args)
    except (ConfigError, UsageError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MalformedRle, MalformedCsv, MissingArchive, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
