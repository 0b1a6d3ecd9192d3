"""Run orchestration: directories, seeding, manifests, parallel execution.

An experiment executes ``num_runs`` independent runs of the configured
layer. Each run gets its own RNG stream spawned from the master seed
(child i of ``SeedSequence(rng_seed)``), its own ``run_NNN`` directory
with a config copy, the elite archive, per-generation metrics and the
fusion event log, plus an entry in the experiment manifest. Outputs are
byte-identical across repeats of the same config and seed; only the
manifest timestamp varies. Existing run directories are never
overwritten.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .evolution import RunResult, run_experiment
from .storage import write_archive_csv, write_fusion_csv, write_metrics_csv

log = logging.getLogger(__name__)

CONFIG_FILE = "config.txt"
ARCHIVE_FILE = "archive.csv"
METRICS_FILE = "metrics.csv"
FUSION_FILE = "fusion_events.csv"
MANIFEST_FILE = "manifest.json"


def run_dir_name(run_index: int) -> str:
    return f"run_{run_index:03d}"


def run_rng(config: ExperimentConfig, run_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one run.

    All ``num_runs`` children are spawned from the master seed and the
    requested one picked, so run i sees the same stream no matter how
    many sibling runs execute or in what order.
    """
    children = np.random.SeedSequence(config.rng_seed).spawn(config.num_runs)
    return np.random.default_rng(children[run_index])


def execute_run(config: ExperimentConfig, run_index: int) -> RunResult:
    return run_experiment(config, run_rng(config, run_index))


def write_run_dir(config: ExperimentConfig, run_index: int, result: RunResult,
                  directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=False)
    (directory / CONFIG_FILE).write_text(config.to_text())
    label = config.layer_label()
    write_archive_csv(directory / ARCHIVE_FILE, result.archive)
    write_metrics_csv(directory / METRICS_FILE, label, run_index, result.metrics)
    write_fusion_csv(directory / FUSION_FILE, label, run_index, result.fusion_events)


def _execute_and_write(config: ExperimentConfig, run_index: int, directory: str) -> str:
    result = execute_run(config, run_index)
    write_run_dir(config, run_index, result, Path(directory))
    return directory


def run_all(config: ExperimentConfig, out_root: Path, jobs: int = 1) -> dict:
    """Execute every run of the experiment and write the manifest.

    Runs are pure and independent, so ``jobs`` > 1 executes them in
    separate processes without changing any output byte.
    """
    config.validate()
    out_root.mkdir(parents=True, exist_ok=True)
    targets = [out_root / run_dir_name(i) for i in range(config.num_runs)]
    for target in targets:
        if target.exists():
            raise FileExistsError(
                f"{target} already exists; runs are append-only, pick a fresh output_dir"
            )
    started = time.time()
    if jobs > 1 and config.num_runs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, config.num_runs)) as pool:
            futures = [
                pool.submit(_execute_and_write, config, i, str(target))
                for i, target in enumerate(targets)
            ]
            for future in futures:
                future.result()
    else:
        for i, target in enumerate(targets):
            _execute_and_write(config, i, str(target))
            log.info("run %d/%d finished", i + 1, config.num_runs)
    manifest = {
        "version": __version__,
        "config_sha256": config.digest(),
        "master_seed": config.rng_seed,
        "seed_derivation": "numpy SeedSequence(master_seed).spawn(num_runs)[index]",
        "layer": config.layer_label(),
        "num_runs": config.num_runs,
        "runs": [
            {
                "index": i,
                "dir": run_dir_name(i),
                "spawn_key": i,
                "config": f"{run_dir_name(i)}/{CONFIG_FILE}",
                "archive": f"{run_dir_name(i)}/{ARCHIVE_FILE}",
                "metrics": f"{run_dir_name(i)}/{METRICS_FILE}",
                "fusion_events": f"{run_dir_name(i)}/{FUSION_FILE}",
            }
            for i in range(config.num_runs)
        ],
        "elapsed_seconds": round(time.time() - started, 3),
        "created_unix": int(started),
    }
    (out_root / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
