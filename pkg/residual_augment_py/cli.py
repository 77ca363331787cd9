"""
Command-line driver: fetch, run, augment and history subcommands
"""
import argparse
import json
import logging
import os
import sys
import time
from contextlib import contextmanager
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

from . import __version__
from .augment import RoundSummary, iterate_rounds, save_banks
from .config import MODE_PRESETS, RunConfig, TaskType
from .evaluation import ComparisonReport, compare
from .exceptions import ConfigError, ResidualAugmentError, StoreError, ValidationError
from .ingest import FrameTable, fetch_dataset, load_csv, preprocess
from .repository import ArtifactStore, BankCacheRepository, ReportRepository
from .utils import CACHE_DIR_ENV, ConfigLoader

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

STAGE_EXIT_CODES = {
    "config": 2,
    "ingest": 3,
    "learner": 4,
    "eval": 5,
    "augment": 6,
    "store": 7,
}

_PRESET_KEYS = ("weighting", "residual_source", "round_decimals")


@contextmanager
def stage(name: str):
    """Attribute validation errors escaping the block to a pipeline stage"""
    try:
        yield
    except ValidationError as e:
        e.stage = name
        e.exit_code = STAGE_EXIT_CODES[name]
        raise


@contextmanager
def writing(out_dir: str):
    """Report OS errors while writing run outputs as store failures"""
    try:
        yield
    except OSError as e:
        raise StoreError(f"Cannot write outputs to {out_dir}: {e}") from e


def _parse_overrides(pairs: Optional[List[str]]) -> Dict[str, str]:
    overrides = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got '{pair}'")
        key, value = pair.split("=", 1)
        overrides[key.strip().lower()] = value.strip()
    return overrides


def load_run_config(args: argparse.Namespace, environ: Optional[Dict[str, str]] = None) -> RunConfig:
    """Defaults < config file < RESAUG_* environment < command-line flags"""
    values: Dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(ConfigLoader.from_file(args.config))
    values.update(ConfigLoader.from_env(environ))

    if getattr(args, "mode", None):
        for key in _PRESET_KEYS:
            values.pop(key, None)
        values["mode"] = args.mode
    flags = {
        "out_dir": getattr(args, "out_dir", None),
        "cache_dir": getattr(args, "cache_dir", None),
        "threads": getattr(args, "threads", None),
        "rounds": getattr(args, "rounds", None),
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    if getattr(args, "emit_augmented", False):
        values["emit_augmented"] = True
    values.update(_parse_overrides(getattr(args, "set", None)))

    values.setdefault("threads", os.cpu_count() or 1)
    return ConfigLoader.create_run_config(values)


def prepare_table(cfg: RunConfig) -> Tuple[FrameTable, Dict[str, Dict[str, int]]]:
    """Fetch, load and preprocess the dataset"""
    with stage("ingest"):
        path = fetch_dataset(cfg.source, os.path.join(cfg.cache_dir, "data"), member=cfg.zip_member)
        raw = load_csv(path, cfg.separator)
        table, counts = preprocess(raw, cfg)
    return table, counts.to_dict()


def augment_table(table: FrameTable, cfg: RunConfig,
                  bank_cache: Optional[BankCacheRepository] = None) -> Tuple[FrameTable, List[RoundSummary]]:
    history: List[RoundSummary] = []
    with stage("augment"):
        augmented = iterate_rounds(table, cfg.augment, history=history, bank_cache=bank_cache)
    return augmented, history


def run_pipeline(cfg: RunConfig, bank_cache: Optional[BankCacheRepository] = None
                 ) -> Tuple[ComparisonReport, FrameTable]:
    """
    fetch, preprocess, augment (all rounds), compare

    Returns:
        The report and the augmented table
    """
    table, counts = prepare_table(cfg)
    augmented, history = augment_table(table, cfg, bank_cache)
    ev = cfg.evaluation
    with stage("eval"):
        report = compare(table, augmented, cfg.target, ev.learner, ev.k, ev.seed, cfg.task,
                         shuffle=ev.shuffle_folds, config=cfg.result_dict(), stage_counts=counts,
                         rounds=history)
    report.config_hash = cfg.config_hash()
    return report, augmented


def _at_least_as_good(task: TaskType, first: float, second: float) -> bool:
    return first >= second if task is TaskType.CLASSIFICATION else first <= second


def run_extras(cfg: RunConfig, report: ComparisonReport,
               bank_cache: Optional[BankCacheRepository] = None) -> Dict[str, Any]:
    """Seed sweep and hygienic-residual records; never gate the run"""
    extras: Dict[str, Any] = {}
    if cfg.seed_sweep:
        sweep = []
        for seed in cfg.seed_sweep:
            logger.info("Seed sweep: rerunning with seed %d", seed)
            seeded, _ = run_pipeline(cfg.with_seed(seed), bank_cache)
            sweep.append({
                "seed": seed,
                "baseline": seeded.baseline.headline,
                "augmented": seeded.augmented.headline,
                "improved": seeded.improved,
            })
        extras["seed_sweep"] = sweep
    if cfg.record_hygienic and cfg.mode != "hygienic":
        logger.info("Recording hygienic (out-of-fold) residuals")
        hygienic_cfg = cfg.with_mode("hygienic")
        hygienic_cfg.seed_sweep = []
        hygienic_cfg.record_hygienic = False
        hygienic, _ = run_pipeline(hygienic_cfg, bank_cache)
        extras["hygienic"] = {
            "augmented": hygienic.augmented.to_dict(),
            "in_sample_at_least_as_good": _at_least_as_good(
                cfg.task, report.augmented.headline, hygienic.augmented.headline),
        }
    return extras


def _open_catalog(cache_dir: str) -> Tuple[BankCacheRepository, ReportRepository]:
    store = ArtifactStore.for_cache_dir(cache_dir)
    return BankCacheRepository(cache_dir, store).init(), ReportRepository(store).init()


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def cmd_fetch(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    with stage("ingest"):
        path = fetch_dataset(cfg.source, os.path.join(cfg.cache_dir, "data"), member=cfg.zip_member)
    print(path)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    with writing(cfg.out_dir):
        os.makedirs(cfg.out_dir, exist_ok=True)
    started = datetime.now()
    clock = time.perf_counter()

    bank_cache, reports = _open_catalog(cfg.cache_dir)
    report, augmented = run_pipeline(cfg, bank_cache)
    report.extras.update(run_extras(cfg, report, bank_cache))

    report_path = os.path.join(cfg.out_dir, "report.json")
    with writing(cfg.out_dir):
        _write_text(report_path, report.to_json())
        _write_text(os.path.join(cfg.out_dir, "report.txt"), report.to_text())
        ConfigLoader.write_cfg(os.path.join(cfg.out_dir, "config.cfg"), cfg)
        if cfg.emit_augmented:
            augmented.to_csv(os.path.join(cfg.out_dir, "augmented.csv"))

    finished = datetime.now()
    meta = {
        "version": __version__,
        "config_hash": report.config_hash,
        "started_at": started.isoformat(),
        "finished_at": finished.isoformat(),
        "elapsed_seconds": round(time.perf_counter() - clock, 3),
        "threads": cfg.threads,
        "bank_cache_hits": bank_cache.hits,
        "bank_cache_misses": bank_cache.misses,
    }
    with writing(cfg.out_dir):
        _write_text(os.path.join(cfg.out_dir, "run_meta.json"), json.dumps(meta, indent=2) + "\n")
    reports.save(report, report.config_hash, cfg.mode or "custom", os.path.abspath(report_path), finished)

    metric = "f1" if cfg.task is TaskType.CLASSIFICATION else "rmse"
    logger.info("Done: baseline %s %.5f, augmented %s %.5f (%s)", metric, report.baseline.headline,
                metric, report.augmented.headline, cfg.out_dir)
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    with writing(cfg.out_dir):
        os.makedirs(cfg.out_dir, exist_ok=True)
    bank_cache, _ = _open_catalog(cfg.cache_dir)

    table, _ = prepare_table(cfg)
    augmented, history = augment_table(table, cfg, bank_cache)

    config_hash = cfg.config_hash()
    with writing(cfg.out_dir):
        augmented.to_csv(os.path.join(cfg.out_dir, "augmented.csv"))
        ConfigLoader.write_cfg(os.path.join(cfg.out_dir, "config.cfg"), cfg)
        for summary in history:
            save_banks(os.path.join(cfg.out_dir, f"banks-{config_hash}-round{summary.round_index + 1}.npz"),
                       summary.banks)
    logger.info("Wrote %d rows x %d columns to %s", augmented.n_rows, augmented.n_cols, cfg.out_dir)
    return 0


def cmd_history(args: argparse.Namespace) -> int:
    cache_dir = args.cache_dir or os.environ.get(CACHE_DIR_ENV)
    if not cache_dir and args.config:
        cache_dir = load_run_config(args).cache_dir
    cache_dir = cache_dir or ".resaug-cache"
    _, reports = _open_catalog(cache_dir)
    frame = reports.history(args.limit)
    if frame.empty:
        print("No runs recorded")
    else:
        print(frame.drop(columns=["report_path"]).to_string(index=False))
    return 0


def _add_run_arguments(parser: argparse.ArgumentParser, config_required: bool = True):
    parser.add_argument("--config", required=config_required, help="Run config (.cfg, .json or .yaml)")
    parser.add_argument("--out-dir", default=None, help="Directory receiving reports and exports")
    parser.add_argument("--cache-dir", default=None, help=f"Cache directory (default: ${CACHE_DIR_ENV} or config)")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (default: logical cores)")
    parser.add_argument("--mode", choices=sorted(MODE_PRESETS), default=None,
                        help="Residual preset; resets weighting, residual_source and round_decimals")
    parser.add_argument("--rounds", type=int, default=None, help="Augmentation rounds")
    parser.add_argument("--emit-augmented", action="store_true", help="Also write augmented.csv")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", help="Override one config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="residual-augment",
                                 description="Augment a tabular dataset with weighted residual columns")
    ap.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sp = ap.add_subparsers(dest="cmd", required=True)

    ap_fetch = sp.add_parser("fetch", help="Download and cache the dataset; print its local path")
    _add_run_arguments(ap_fetch)
    ap_fetch.set_defaults(func=cmd_fetch)

    ap_run = sp.add_parser("run", help="Preprocess, augment and compare; write report.json and report.txt")
    _add_run_arguments(ap_run)
    ap_run.set_defaults(func=cmd_run)

    ap_aug = sp.add_parser("augment", help="Write the augmented table and its banks without evaluating")
    _add_run_arguments(ap_aug)
    ap_aug.set_defaults(func=cmd_augment)

    ap_hist = sp.add_parser("history", help="List recorded runs")
    ap_hist.add_argument("--config", default=None, help="Config whose cache_dir is used")
    ap_hist.add_argument("--cache-dir", default=None)
    ap_hist.add_argument("--limit", type=int, default=None, help="Show only the last N runs")
    ap_hist.set_defaults(func=cmd_history)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, args.log_level), format=LOG_FORMAT)
    try:
        return int(args.func(args))
    except ResidualAugmentError as e:
        sys.stderr.write(f"[{e.stage}] {e}\n")
        return e.exit_code
