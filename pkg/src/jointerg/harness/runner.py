"""
Run configs, write result files, and run the bundled suite.

Files per experiment, in ``out_dir``:

``<name>.csv``
    fixed columns per kind; byte-identical across reruns and thread counts.
``<name>.summary.json``
    versioned summary: verdicts, versions, seed, thread count and wall time.
``<name>.trace.json``
    PET traces (pet-trace experiments only).
"""

from __future__ import annotations

import csv
import io
import json
import platform
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .. import __version__
from ..algebra import BudgetError
from ..pet import PetBudgetError
from ..systems import SupportBudgetError
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import RUNNERS, Output

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

BUDGET_ERRORS = (BudgetError, PetBudgetError, SupportBudgetError)


@dataclass
class ResultRecord:
    name: str
    kind: str
    columns: list
    rows: list
    verdicts: dict
    seed: int
    threads: int
    wall_time_s: float = 0.0
    extra: dict | None = None
    files: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(self.verdicts.values())

    def csv_text(self) -> str:
        return rows_to_csv(self.columns, self.rows)

    def summary(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "kind": self.kind,
            "passed": self.passed,
            "verdicts": self.verdicts,
            "rows": len(self.rows),
            "seed": self.seed,
            "threads": self.threads,
            "wall_time_s": round(self.wall_time_s, 3),
            "versions": {"jointerg": __version__, "python": platform.python_version(),
                         "numpy": np.__version__},
        }


def rows_to_csv(columns: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def csv_to_rows(text: str) -> list:
    return list(csv.DictReader(io.StringIO(text)))


def verdicts_from_rows(cfg: ExperimentConfig, rows: list) -> dict:
    """Recompute the verdicts of ``cfg`` from CSV rows alone."""
    return RUNNERS[cfg.kind][1](cfg, rows)


def run_config(cfg: ExperimentConfig, out_dir=None, threads: int = 1,
               seed: int | None = None) -> ResultRecord:
    """Dispatch ``cfg`` to its module, compute verdicts and optionally write files."""
    if seed is not None:
        cfg.seed = int(seed)
    runner, _ = RUNNERS[cfg.kind]
    t0 = time.perf_counter()
    out: Output = runner(cfg, threads)
    wall = time.perf_counter() - t0
    # verdicts see only what lands in the CSV
    rows = csv_to_rows(rows_to_csv(out.columns, out.rows))
    verdicts = verdicts_from_rows(cfg, rows)
    # a misspelled check must not silently drop a verdict
    unread = cfg.unread_keys()
    if unread:
        sec, key = unread[0]
        raise cfg.error(f"unknown [{sec}] key {key!r} for kind {cfg.kind}", key)
    rec = ResultRecord(name=cfg.name, kind=cfg.kind, columns=out.columns, rows=rows,
                       verdicts=verdicts, seed=cfg.seed, threads=threads,
                       wall_time_s=wall, extra=out.extra)
    if out_dir is not None:
        write_outputs(rec, out_dir)
    return rec


def write_outputs(rec: ResultRecord, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [out / f"{rec.name}.csv", out / f"{rec.name}.summary.json"]
    files[0].write_text(rec.csv_text(), encoding="utf-8")
    files[1].write_text(json.dumps(rec.summary(), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
    if rec.extra is not None:
        p = out / f"{rec.name}.trace.json"
        p.write_text(json.dumps({"schema_version": SCHEMA_VERSION, **rec.extra}, indent=1,
                                sort_keys=True) + "\n", encoding="utf-8")
        files.append(p)
    rec.files = [str(f) for f in files]
    return rec.files


# ------------------------------------------------------------------ suite


def _configs_dir():
    return resources.files("jointerg.harness") / "configs"


def expected_configs() -> list:
    text = (_configs_dir() / "manifest.txt").read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def bundled_configs() -> list:
    """Parsed bundled configs in manifest order; a missing file is a config error."""
    names = expected_configs()
    base = _configs_dir()
    missing = [n for n in names if not (base / n).is_file()]
    if missing:
        raise ConfigError(f"missing bundled configs {missing}; expected set: {names}")
    return [parse_config((base / n).read_text(encoding="utf-8"), n) for n in names]


def known_tags(configs: list | None = None) -> list:
    configs = bundled_configs() if configs is None else configs
    return sorted({t for c in configs for t in c.tags})


def select(tag: str | None = None) -> list:
    configs = bundled_configs()
    if tag is None or tag == "all":
        return configs
    tags = known_tags(configs)
    if tag not in tags:
        raise ConfigError(f"unknown tag {tag!r}; known tags: {', '.join(tags)}")
    return [c for c in configs if tag in c.tags]


@dataclass
class SuiteReport:
    records: list
    errors: dict

    @property
    def passed(self) -> bool:
        return not self.errors and all(r.passed for r in self.records)

    def table(self) -> str:
        lines = [f"{'experiment':<34} {'kind':<18} {'result':<7} {'time_s':>8}"]
        for r in self.records:
            lines.append(f"{r.name:<34} {r.kind:<18} {'PASS' if r.passed else 'FAIL':<7} "
                         f"{r.wall_time_s:>8.2f}")
            for k, v in r.verdicts.items():
                if not v:
                    lines.append(f"    failed: {k}")
        for name, err in self.errors.items():
            lines.append(f"{name:<34} {'':<18} {'ERROR':<7}  {err}")
        return "\n".join(lines)


def suite(tag: str | None = None, out_dir=None, threads: int = 1,
          seed: int | None = None, progress=None) -> SuiteReport:
    records, errors = [], {}
    for cfg in select(tag):
        if progress:
            progress(f"running {cfg.name} ...")
        try:
            records.append(run_config(cfg, out_dir, threads, seed))
        except BUDGET_ERRORS as exc:
            errors[cfg.name] = f"budget: {exc}"
    return SuiteReport(records, errors)


def run_path(path, out_dir=None, threads: int = 1, seed: int | None = None) -> ResultRecord:
    return run_config(load_config(path), out_dir, threads, seed)
