"""Fixed-step classical RK4, parallelized across state components.

Each step runs four stages.  Inside a stage the state indices are split into
contiguous blocks of ``ceil(n / workers)`` and every worker evaluates its own
block; the stage ends when all blocks are done.  Stage inputs are double
buffered so a worker never overwrites a value another worker still reads.
Every component is produced by the same arithmetic no matter which block
owns it, so results do not depend on the worker count.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .system import ModelError, SystemModel

# number of dim-sized float64 buffers one integration keeps alive:
# state, four stage derivatives, two stage-input buffers
WORKSPACE_VECTORS = 7


class IntegrationError(RuntimeError):
    """A non-finite value appeared during integration."""

    def __init__(self, step: int, component: int, stage: int, sample: Optional[int] = None):
        self.step = step
        self.component = component
        self.stage = stage
        self.sample = sample
        msg = f"non-finite value at step {step}, stage {stage}, component {component}"
        if sample is not None:
            msg += f", batch row {sample}"
        super().__init__(msg)


def step_plan(t0: float, t1: float, h: float) -> tuple[int, float]:
    """Number of full steps and the length of a trailing partial step.

    A ratio within 1e-9 (relative) of an integer is treated as exact, so
    e.g. ``[0, 1]`` with ``h = 0.1`` gives ten full steps and no remainder.
    """
    if not t1 > t0:
        raise ModelError(f"t1 ({t1}) must exceed t0 ({t0})")
    if not h > 0:
        raise ModelError(f"step size must be positive, got {h}")
    q = (t1 - t0) / h
    nearest = round(q)
    if nearest >= 1 and abs(q - nearest) <= 1e-9 * max(1.0, q):
        return int(nearest), 0.0
    full = int(math.floor(q))
    rem = t1 - (t0 + full * h)
    if rem <= 0:
        return full, 0.0
    return full, rem


def total_steps(t0: float, t1: float, h: float) -> int:
    full, rem = step_plan(t0, t1, h)
    return full + (1 if rem > 0 else 0)


def partition(n: int, workers: int) -> List[tuple[int, int]]:
    """Contiguous blocks of size ceil(n / workers) covering [0, n)."""
    workers = max(1, min(workers, n))
    size = -(-n // workers)
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


@dataclass
class Scratch:
    """Stage buffers for one integration; contents are unspecified between steps."""

    k: List[np.ndarray]
    tmp_a: np.ndarray
    tmp_b: np.ndarray

    @classmethod
    def for_shape(cls, shape) -> "Scratch":
        return cls([np.empty(shape) for _ in range(4)], np.empty(shape), np.empty(shape))


@dataclass(frozen=True, eq=False)
class IntegrationJob:
    model: SystemModel
    x0: np.ndarray
    p: np.ndarray
    t0: float
    t1: float
    h: float
    record_stride: int = 0

    def __post_init__(self):
        if not self.h > 0:
            raise ModelError(f"step size must be positive, got {self.h}")
        if not self.t1 > self.t0:
            raise ModelError(f"t1 ({self.t1}) must exceed t0 ({self.t0})")
        if np.shape(self.x0)[-1] != self.model.dim:
            raise ModelError(
                f"initial state has {np.shape(self.x0)[-1]} entries, model has {self.model.dim}")
        if self.record_stride < 0:
            raise ModelError("record_stride must be nonnegative")


@dataclass
class Trajectory:
    """Recorded states; the last entry is always at ``t1``."""

    times: List[float] = field(default_factory=list)
    states: List[np.ndarray] = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.states[0].shape[-1] if self.states else 0
        w.writerow(["t"] + [f"x{i}" for i in range(n)])
        for t, x in zip(self.times, self.states):
            w.writerow([repr(float(t))] + [repr(v) for v in np.asarray(x).tolist()])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps([{"t": float(t), "x": np.asarray(x).tolist()}
                           for t, x in zip(self.times, self.states)])


class RK4Engine:
    """Owns the worker pool used by the parallel stages.

    Use as a context manager, or call :meth:`close` when done.  An engine
    runs one integration at a time; separate engines may run concurrently.
    """

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self._pool: Optional[ThreadPoolExecutor] = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def _run(self, fn, blocks: Sequence[tuple[int, int]]) -> None:
        def guarded(lo, hi):
            # non-finite values are reported by the stage checks instead
            with np.errstate(over="ignore", invalid="ignore"):
                fn(lo, hi)

        if len(blocks) == 1:
            guarded(*blocks[0])
            return
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.workers)
        # list() waits for every block and re-raises the first failure;
        # this is the barrier between stages
        list(self._pool.map(lambda b: guarded(*b), blocks))

    def step(self, model: SystemModel, t: float, h: float, x: np.ndarray,
             p: np.ndarray, scratch: Scratch, step_index: int = 0) -> None:
        """Advance ``x`` in place by one RK4 step of length ``h``."""
        if h == 0:
            return
        n = model.dim
        blocks = partition(n, self.workers)
        k0, k1, k2, k3 = scratch.k
        ta, tb = scratch.tmp_a, scratch.tmp_b
        rhs = model.rhs
        half = h / 2
        t_mid = t + half
        t_end = t + h

        def check(arr, lo, hi, stage):
            blk = arr[..., lo:hi]
            if not np.isfinite(blk).all():
                bad = np.argwhere(~np.isfinite(blk))[0]
                row = int(bad[0]) if blk.ndim > 1 else None
                raise IntegrationError(step_index, lo + int(bad[-1]), stage, row)

        def stage0(lo, hi):
            k0[..., lo:hi] = rhs(t, x, p, lo, hi)
            check(k0, lo, hi, 0)
            ta[..., lo:hi] = x[..., lo:hi] + half * k0[..., lo:hi]

        def stage1(lo, hi):
            k1[..., lo:hi] = rhs(t_mid, ta, p, lo, hi)
            check(k1, lo, hi, 1)
            tb[..., lo:hi] = x[..., lo:hi] + half * k1[..., lo:hi]

        def stage2(lo, hi):
            k2[..., lo:hi] = rhs(t_mid, tb, p, lo, hi)
            check(k2, lo, hi, 2)
            ta[..., lo:hi] = x[..., lo:hi] + h * k2[..., lo:hi]

        def stage3(lo, hi):
            k3[..., lo:hi] = rhs(t_end, ta, p, lo, hi)
            check(k3, lo, hi, 3)
            x[..., lo:hi] += (h / 6) * (k0[..., lo:hi] + 2 * k1[..., lo:hi]
                                        + 2 * k2[..., lo:hi] + k3[..., lo:hi])
            check(x, lo, hi, 3)

        for fn in (stage0, stage1, stage2, stage3):
            self._run(fn, blocks)

    def integrate(self, job: IntegrationJob, record_initial: bool = False,
                  on_record=None) -> Trajectory:
        """Integrate ``job`` from ``t0`` to exactly ``t1``.

        With ``record_stride = k > 0`` the state after every k-th step is
        recorded, and the final state always is.  ``on_record(t, x)`` is
        called instead of storing copies when given.
        """
        model = job.model
        x = np.array(job.x0, dtype=np.float64, copy=True)
        p = np.asarray(job.p, dtype=np.float64)
        if p.shape[-1] != model.input_dim:
            raise ModelError(
                f"input has {p.shape[-1]} entries, model {model.name!r} has {model.input_dim}")
        scratch = Scratch.for_shape(x.shape)
        full, rem = step_plan(job.t0, job.t1, job.h)
        steps = full + (1 if rem > 0 else 0)
        traj = Trajectory()

        def record(t, state):
            if on_record is not None:
                on_record(t, state)
            else:
                traj.times.append(t)
                traj.states.append(state.copy())

        if record_initial:
            record(job.t0, x)
        for k in range(steps):
            t = job.t0 + k * job.h
            h = job.h if k < full else rem
            self.step(model, t, h, x, p, scratch, step_index=k)
            last = k == steps - 1
            if last:
                record(job.t1, x)
            elif job.record_stride and (k + 1) % job.record_stride == 0:
                record(job.t0 + (k + 1) * job.h, x)
        return traj


def integrate(job: IntegrationJob, workers: int = 1, record_initial: bool = False) -> Trajectory:
    with RK4Engine(workers) as eng:
        return eng.integrate(job, record_initial=record_initial)


def integrate_step(model: SystemModel, t: float, h: float, x: np.ndarray, p,
                   scratch: Optional[Scratch] = None, workers: int = 1) -> None:
    """Single in-place RK4 step; allocates scratch when none is supplied."""
    p = np.asarray(p, dtype=np.float64)
    if scratch is None:
        scratch = Scratch.for_shape(x.shape)
    with RK4Engine(workers) as eng:
        eng.step(model, t, h, x, p, scratch)
