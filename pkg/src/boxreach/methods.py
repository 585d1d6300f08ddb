"""Growth-bound, mixed-monotonicity and Monte Carlo reach tubes."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import reduce
from typing import List, Optional, Tuple

import numpy as np

from .intervals import IntervalVector, center, from_center_radius, half_width
from .rk4 import WORKSPACE_VECTORS, IntegrationError, IntegrationJob, RK4Engine, total_steps
from .system import EmbeddingState, ReachProblem, embed, growth_system

GROWTH_BOUND = "growth-bound"
MIXED_MONOTONICITY = "mixed-monotonicity"
MONTE_CARLO = "monte-carlo"
METHODS = (GROWTH_BOUND, MIXED_MONOTONICITY, MONTE_CARLO)

# negative half-widths above this are treated as roundoff and clamped to zero
RADIUS_CLAMP_TOL = 1e-12
# float64 elements per Monte Carlo batch; fixed so batching never depends on workers
MC_BATCH_ELEMENTS = 1 << 18


class ReachError(RuntimeError):
    """A method could not produce a valid tube."""


@dataclass
class RunReport:
    """Timings (seconds), sizes and the analytic state-memory estimate (bytes)."""

    method: str
    n: int
    steps: int
    workers: int
    m: Optional[int] = None
    setup_s: float = 0.0
    integration_s: float = 0.0
    reduction_s: float = 0.0
    state_memory_bytes: int = 0

    @property
    def total_s(self) -> float:
        return self.setup_s + self.integration_s + self.reduction_s

    def to_dict(self) -> dict:
        d = asdict(self)
        d["total_s"] = self.total_s
        return d

    def deterministic_dict(self) -> dict:
        """Fields that do not depend on timing or on the worker count."""
        d = {"n": self.n, "steps": self.steps}
        if self.m is not None:
            d["m"] = self.m
        return d


@dataclass
class ReachTube:
    method: str
    entries: List[Tuple[float, IntervalVector]]
    report: RunReport

    @property
    def times(self) -> List[float]:
        return [t for t, _ in self.entries]

    @property
    def final(self) -> IntervalVector:
        return self.entries[-1][1]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "times": [float(t) for t in self.times],
            "boxes": [b.to_dict() for _, b in self.entries],
            "report": self.report.deterministic_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.final.dim
        header = ["t"]
        for i in range(n):
            header += [f"lower{i}", f"upper{i}"]
        w.writerow(header)
        for t, box in self.entries:
            row = [repr(float(t))]
            for lo, hi in zip(box.lower.tolist(), box.upper.tolist()):
                row += [repr(lo), repr(hi)]
            w.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data: dict) -> "ReachTube":
        entries = [(float(t), IntervalVector.from_dict(b))
                   for t, b in zip(data["times"], data["boxes"])]
        rep = data.get("report", {})
        report = RunReport(method=data["method"], n=rep.get("n", entries[-1][1].dim),
                           steps=rep.get("steps", 0), workers=0, m=rep.get("m"))
        return cls(data["method"], entries, report)


@dataclass(frozen=True)
class MonteCarloSpec:
    epsilon: float = 0.05
    delta: float = 0.01
    seed: int = 0
    samples_override: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.samples_override is not None and self.samples_override < 1:
            raise ValueError(f"samples must be positive, got {self.samples_override}")


def sample_count(n: int, epsilon: float, delta: float) -> int:
    """Samples needed for the (epsilon, delta) guarantee: ceil((2n/eps) ln(2n/delta))."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return math.ceil((2 * n / epsilon) * math.log(2 * n / delta))


def state_memory_estimate(method: str, n: int, m: Optional[int] = None, workers: int = 1) -> int:
    """Bytes of float64 integrator state a method keeps alive at once.

    Counts the RK4 workspace (state, four stages, two stage inputs).  The
    growth-bound method runs its center and radius integrations one after
    the other and keeps the center in the output box; mixed monotonicity
    integrates a 2n system; Monte Carlo keeps one workspace per batch in
    flight plus the running elementwise minima and maxima.
    """
    per = WORKSPACE_VECTORS * 8
    if method == GROWTH_BOUND:
        return per * n
    if method == MIXED_MONOTONICITY:
        return per * 2 * n
    if method == MONTE_CARLO:
        if m is None:
            raise ValueError("Monte Carlo memory estimate needs the sample count")
        b = mc_batch_size(m, n)
        in_flight = min(workers, -(-m // b))
        return per * n * b * in_flight + 2 * n * 8
    raise ValueError(f"unknown method {method!r}")


def _recorded(problem: ReachProblem) -> bool:
    return problem.tube_stride > 0


def growth_bound(problem: ReachProblem, workers: int = 1) -> ReachTube:
    """Center trajectory plus integrated half-width dynamics."""
    model = problem.model
    if model.growth_rhs is None:
        raise ReachError(f"model {model.name!r} has no growth dynamics")
    if not model.input_affine:
        raise ReachError(f"growth bound needs an input-affine model; {model.name!r} is not")
    t_start = time.perf_counter()
    inputs_c = (problem.input_lower + problem.input_upper) / 2
    inputs_w = (problem.input_upper - problem.input_lower) / 2
    c0 = center(problem.initial)
    r0 = half_width(problem.initial)
    gsys = growth_system(model)
    t_setup = time.perf_counter()
    with RK4Engine(workers) as eng:
        rec = _recorded(problem)
        ctraj = eng.integrate(IntegrationJob(model, c0, inputs_c, problem.t0, problem.t1,
                                             problem.h, problem.tube_stride), record_initial=rec)
        rtraj = eng.integrate(IntegrationJob(gsys, r0, inputs_w, problem.t0, problem.t1,
                                             problem.h, problem.tube_stride), record_initial=rec)
    t_int = time.perf_counter()
    entries = []
    for t, c, r in zip(ctraj.times, ctraj.states, rtraj.states):
        if np.any(r < -RADIUS_CLAMP_TOL):
            i = int(np.argmin(r))
            raise ReachError(
                f"negative half-width {r[i]!r} in component {i} at t={t}; "
                "the growth dynamics do not preserve nonnegativity")
        entries.append((t, from_center_radius(c, np.maximum(r, 0.0))))
    t_end = time.perf_counter()
    report = RunReport(
        method=GROWTH_BOUND, n=model.dim,
        steps=total_steps(problem.t0, problem.t1, problem.h), workers=workers,
        setup_s=t_setup - t_start, integration_s=t_int - t_setup, reduction_s=t_end - t_int,
        state_memory_bytes=state_memory_estimate(GROWTH_BOUND, model.dim))
    return ReachTube(GROWTH_BOUND, entries, report)


def mixed_monotonicity(problem: ReachProblem, workers: int = 1) -> ReachTube:
    """One trajectory of the embedding system from (lower, upper)."""
    model = problem.model
    if model.decomposition is None:
        raise ReachError(f"model {model.name!r} has no decomposition function")
    t_start = time.perf_counter()
    emb = embed(model)
    z0 = np.concatenate([problem.initial.lower, problem.initial.upper])
    q = np.concatenate([problem.input_lower, problem.input_upper])
    t_setup = time.perf_counter()
    with RK4Engine(workers) as eng:
        traj = eng.integrate(IntegrationJob(emb, z0, q, problem.t0, problem.t1, problem.h,
                                            problem.tube_stride),
                             record_initial=_recorded(problem))
    t_int = time.perf_counter()
    entries = []
    for t, z in zip(traj.times, traj.states):
        st = EmbeddingState.split(z)
        if not st.ordered():
            i = int(np.argmax(st.x - st.x_hat))
            raise ReachError(
                f"embedding order violated at t={t} in component {i} "
                f"({st.x[i]!r} > {st.x_hat[i]!r}); the decomposition is not valid")
        entries.append((t, IntervalVector(st.x, st.x_hat)))
    t_end = time.perf_counter()
    report = RunReport(
        method=MIXED_MONOTONICITY, n=model.dim,
        steps=total_steps(problem.t0, problem.t1, problem.h), workers=workers,
        setup_s=t_setup - t_start, integration_s=t_int - t_setup, reduction_s=t_end - t_int,
        state_memory_bytes=state_memory_estimate(MIXED_MONOTONICITY, model.dim))
    return ReachTube(MIXED_MONOTONICITY, entries, report)


def _philox_key(seed: int) -> int:
    return int(seed) & ((1 << 64) - 1)


def sample_points(lower: np.ndarray, upper: np.ndarray, seed: int, start: int, stop: int,
                  stream: int = 0) -> np.ndarray:
    """Uniform samples ``start..stop-1`` from the box, one Philox stream per sample.

    Sample ``i`` always gets the same values for a given seed no matter how
    samples are grouped, which keeps Monte Carlo runs reproducible under any
    parallel schedule.  Zero-width components return the bound itself.
    """
    dim = lower.size
    out = np.empty((stop - start, dim))
    width = upper - lower
    key = _philox_key(seed)
    for row, i in enumerate(range(start, stop)):
        gen = np.random.Generator(np.random.Philox(key=key, counter=[0, i, stream, 0]))
        out[row] = lower + width * gen.random(dim)
    return out


def mc_batch_size(m: int, n: int) -> int:
    return max(1, min(m, MC_BATCH_ELEMENTS // max(n, 1)))


def _sample_batch(problem: ReachProblem, seed: int, start: int, stop: int, stream: int):
    model = problem.model
    lo = np.concatenate([problem.initial.lower, problem.input_lower])
    hi = np.concatenate([problem.initial.upper, problem.input_upper])
    s = sample_points(lo, hi, seed, start, stop, stream)
    return s[:, :model.dim], s[:, model.dim:]


def _simulate_batches(problem: ReachProblem, seed: int, m: int, workers: int, reducer,
                      stream: int = 0):
    """Integrate samples ``0..m-1`` batch by batch.

    ``reducer(states)`` is applied to the batch at every recorded time, so
    full trajectories are never stored.  Returns, per batch, the list of
    ``(t, reducer(states))``.
    """
    model = problem.model
    b = mc_batch_size(m, model.dim)
    batches = [(s, min(s + b, m)) for s in range(0, m, b)]
    rec = _recorded(problem)

    def run(batch, eng):
        start, stop = batch
        x0, p = _sample_batch(problem, seed, start, stop, stream)
        out = []
        try:
            eng.integrate(IntegrationJob(model, x0, p, problem.t0, problem.t1, problem.h,
                                         problem.tube_stride), record_initial=rec,
                          on_record=lambda t, x: out.append((t, reducer(x))))
        except IntegrationError as exc:
            idx = start + (exc.sample or 0)
            raise ReachError(f"sample {idx} diverged: {exc}") from exc
        return out

    if workers > 1 and len(batches) >= workers:
        # parallel over samples, one single-threaded engine per task
        def task(batch):
            with RK4Engine(1) as eng:
                return run(batch, eng)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(task, batches))
    # too few batches to go around: parallelize across space instead
    with RK4Engine(workers) as eng:
        return [run(batch, eng) for batch in batches]


def monte_carlo(problem: ReachProblem, spec: MonteCarloSpec, workers: int = 1) -> ReachTube:
    """Hull of ``m`` sampled trajectories at every recorded time."""
    model = problem.model
    n = model.dim
    m = spec.samples_override or sample_count(n, spec.epsilon, spec.delta)
    t_start = time.perf_counter()
    results = _simulate_batches(problem, spec.seed, m, workers,
                                lambda x: (x.min(axis=0), x.max(axis=0)))
    t_int = time.perf_counter()
    entries = []
    for k, (t, _) in enumerate(results[0]):
        # min and max are exact, so the combination order cannot change the result
        lo = reduce(np.minimum, (r[k][1][0] for r in results))
        hi = reduce(np.maximum, (r[k][1][1] for r in results))
        entries.append((t, IntervalVector(lo, hi)))
    t_end = time.perf_counter()
    report = RunReport(
        method=MONTE_CARLO, n=n, m=m,
        steps=total_steps(problem.t0, problem.t1, problem.h), workers=workers,
        setup_s=0.0, integration_s=t_int - t_start, reduction_s=t_end - t_int,
        state_memory_bytes=state_memory_estimate(MONTE_CARLO, n, m, workers))
    return ReachTube(MONTE_CARLO, entries, report)


def coverage_estimate(problem: ReachProblem, spec: MonteCarloSpec, tube: ReachTube,
                      fresh_samples: int, seed: int, workers: int = 1) -> float:
    """Fraction of fresh sampled final states falling outside the tube's final box."""
    box = tube.final
    flat = ReachProblem(problem.model, problem.initial, problem.inputs,
                        problem.t0, problem.t1, problem.h, 0)

    def count_outside(x):
        inside = np.all((x >= box.lower) & (x <= box.upper), axis=-1)
        return int(np.count_nonzero(~inside))

    # separate stream so fresh samples never repeat the tube's own samples
    results = _simulate_batches(flat, seed, fresh_samples, workers, count_outside, stream=1)
    return sum(r[-1][1] for r in results) / fresh_samples


def run_method(method: str, problem: ReachProblem, workers: int = 1,
               mc: Optional[MonteCarloSpec] = None) -> ReachTube:
    if method == GROWTH_BOUND:
        return growth_bound(problem, workers)
    if method == MIXED_MONOTONICITY:
        return mixed_monotonicity(problem, workers)
    if method == MONTE_CARLO:
        return monte_carlo(problem, mc or MonteCarloSpec(), workers)
    raise ReachError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
