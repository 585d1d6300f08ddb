"""Dimension/worker sweeps producing a plot-ready CSV."""
from __future__ import annotations

import csv
import dataclasses
import io
import os
import statistics
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .config import ConfigError, RunConfig
from .methods import MONTE_CARLO, run_method, sample_count, state_memory_estimate
from .models.catalog import get_entry
from .system import ModelError

CSV_COLUMNS = ("n", "workers", "median_seconds", "steps", "status")

STATUS_OK = "ok"
STATUS_OOM = "out-of-memory"
STATUS_ERROR = "error"


@dataclass(frozen=True)
class BenchRow:
    n: int
    workers: int
    median_seconds: Optional[float]
    steps: Optional[int]
    status: str

    def as_csv_row(self) -> list:
        med = "" if self.median_seconds is None else repr(self.median_seconds)
        steps = "" if self.steps is None else str(self.steps)
        return [str(self.n), str(self.workers), med, steps, self.status]


def physical_memory() -> Optional[int]:
    try:
        return os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES")
    except (ValueError, OSError, AttributeError):
        return None


def _resize(values, dim: int, what: str):
    if len(set(values)) == 1:
        return (values[0],) * dim
    if dim % len(values) == 0:
        return tuple(values) * (dim // len(values))
    raise ConfigError(
        f"cannot rescale the {what} box from {len(values)} to {dim} entries; use a uniform "
        "box or one whose length divides the target dimension")


def scaled_config(cfg: RunConfig, dim: int, steps: Optional[int] = None) -> RunConfig:
    """Copy of ``cfg`` with the model resized to about ``dim`` states."""
    entry = get_entry(cfg.model)
    if entry.scale is None:
        raise ConfigError(f"model {cfg.model!r} has no dimension parameter and cannot be swept")
    params = dict(cfg.params)
    params.update(entry.scale(dim))
    n = entry.build(**params).dim
    if entry.resample is not None:
        old = dict(entry.defaults(), **cfg.params)
        new = dict(entry.defaults(), **params)
        try:
            lower = entry.resample(cfg.initial_lower, old, new)
            upper = entry.resample(cfg.initial_upper, old, new)
        except ModelError as exc:
            raise ConfigError(str(exc)) from None
    else:
        lower = _resize(cfg.initial_lower, n, "initial")
        upper = _resize(cfg.initial_upper, n, "initial")
    out = dataclasses.replace(cfg, params=params, initial_lower=lower, initial_upper=upper)
    if steps is not None:
        out = dataclasses.replace(out, t1=cfg.t0 + steps * cfg.h)
    return out


def bench(cfg: RunConfig, dims: Sequence[int], workers_list: Sequence[int], reps: int = 3,
          steps: Optional[int] = None, memory_limit: Optional[int] = None,
          log=None) -> List[BenchRow]:
    """Median wall time of ``cfg``'s method for every (dimension, workers) pair.

    Runs are sequential.  A configuration whose analytic state memory
    exceeds ``memory_limit`` (default: physical memory), or that raises
    MemoryError, is reported with status ``out-of-memory``.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    limit = memory_limit if memory_limit is not None else physical_memory()
    rows: List[BenchRow] = []
    workers_list = [w if w > 0 else (os.cpu_count() or 1) for w in workers_list]
    for dim in dims:
        try:
            scfg = scaled_config(cfg, dim, steps)
            model = scfg.build_model()
        except MemoryError:
            rows += [BenchRow(dim, w, None, None, STATUS_OOM) for w in workers_list]
            continue
        n = model.dim
        for w in workers_list:
            m = None
            if cfg.method == MONTE_CARLO:
                m = scfg.samples or sample_count(n, scfg.epsilon, scfg.delta)
            need = state_memory_estimate(cfg.method, n, m, w)
            if limit is not None and need > limit:
                rows.append(BenchRow(n, w, None, None, STATUS_OOM))
                continue
            times = []
            status = STATUS_OK
            steps_taken = None
            for _ in range(reps):
                try:
                    t = time.perf_counter()
                    tube = run_method(cfg.method, scfg.problem(model), w, scfg.mc_spec())
                    times.append(time.perf_counter() - t)
                    steps_taken = tube.report.steps
                    del tube
                except MemoryError:
                    status = STATUS_OOM
                    break
                except Exception as exc:  # keep the sweep going; the row records the failure
                    status = STATUS_ERROR
                    if log:
                        log(f"n={n} workers={w}: {exc}")
                    break
            med = statistics.median(times) if status == STATUS_OK else None
            rows.append(BenchRow(n, w, med, steps_taken if status == STATUS_OK else None, status))
            if log:
                log(f"n={n} workers={w} status={status} median={med}")
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.as_csv_row())
    return buf.getvalue()
