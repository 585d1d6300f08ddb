import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boxreach.intervals import IntervalVector, from_center_radius, subset_of
from boxreach.methods import (GROWTH_BOUND, MIXED_MONOTONICITY, MONTE_CARLO, MonteCarloSpec,
                              ReachError, ReachTube, RunReport, coverage_estimate, growth_bound,
                              mc_batch_size, mixed_monotonicity, monte_carlo, run_method,
                              sample_count, sample_points, state_memory_estimate)
from boxreach.models.testing import make_linear_scalar, make_zero
from boxreach.models.traffic import make_traffic
from boxreach.system import ReachProblem, SystemModel, linear_model

from oracles import scenario_count

E = math.e


def problem(model, lo, hi, t1=1.0, h=1e-3, inputs=None, stride=0):
    inp = None if inputs is None else IntervalVector(*inputs)
    return ReachProblem(model, IntervalVector(lo, hi), inp, 0.0, t1, h, stride)


def traffic_problem(n=12, stride=0, t1=20.0):
    return problem(make_traffic(n=n), [10.0] * n, [25.0] * n, t1=t1, h=0.5,
                   inputs=([0.0], [10.0]), stride=stride)


# growth bound

def test_gb_zero_dynamics_constant_tube():
    pr = problem(make_zero(2), [0, 1], [1, 3], t1=1.0, h=0.1, stride=3)
    tube = growth_bound(pr)
    assert all(box == pr.initial for _, box in tube.entries)
    assert tube.times[0] == 0.0 and tube.times[-1] == 1.0


def test_gb_scalar_decay_half_width():
    pr = problem(make_linear_scalar(-1.0), [-0.1], [0.1], inputs=([0.0], [0.0]))
    box = growth_bound(pr).final
    assert abs((box.lower[0] + box.upper[0]) / 2) <= 1e-12
    assert (box.upper[0] - box.lower[0]) / 2 == pytest.approx(0.1 * math.exp(-1), abs=1e-5)


def test_gb_input_widens_box():
    # r' = -r + w with w = 0.5 from r(0) = 0: r(1) = 0.5 (1 - e^-1)
    pr = problem(make_linear_scalar(-1.0), [0.0], [0.0], inputs=([-0.5], [0.5]))
    box = growth_bound(pr).final
    assert box.upper[0] == pytest.approx(0.5 * (1 - math.exp(-1)), abs=1e-9)


def test_gb_requires_growth_and_affine():
    plain = SystemModel("plain", 1, 0, lambda t, x, p, lo, hi: x[..., lo:hi])
    with pytest.raises(ReachError, match="no growth"):
        growth_bound(problem(plain, [0], [1]))
    not_affine = SystemModel("na", 1, 0, plain.rhs, growth_rhs=plain.rhs, input_affine=False)
    with pytest.raises(ReachError, match="input-affine"):
        growth_bound(problem(not_affine, [0], [1]))


def _shrinking(rate):
    def g(t, r, w, lo, hi):
        return np.full(r.shape[:-1] + (hi - lo,), rate)
    zero = make_zero(1)
    return SystemModel("shrink", 1, 0, zero.rhs, growth_rhs=g, input_affine=True)


def test_gb_clamps_tiny_negative_radius():
    tube = growth_bound(problem(_shrinking(-5e-13), [0.0], [0.0], t1=1.0, h=0.5))
    assert tube.final == IntervalVector([0.0], [0.0])


def test_gb_rejects_negative_radius():
    with pytest.raises(ReachError, match="negative half-width"):
        growth_bound(problem(_shrinking(-1e-6), [0.0], [0.0], t1=1.0, h=0.5))


# mixed monotonicity

def test_mm_zero_dynamics_constant_tube():
    pr = problem(make_zero(3), [0, 0, 0], [1, 2, 3], t1=1.0, h=0.25, stride=1)
    assert all(box == pr.initial for _, box in mixed_monotonicity(pr).entries)


def test_mm_monotone_exponential():
    box = mixed_monotonicity(problem(linear_model([[1.0]]), [1.0], [2.0])).final
    assert box.lower[0] == pytest.approx(E, abs=1e-4)
    assert box.upper[0] == pytest.approx(2 * E, abs=1e-4)


def test_mm_rotation_encloses_exact_flow():
    rot = linear_model([[0.0, 1.0], [-1.0, 0.0]])
    pr = problem(rot, [0.9, -0.1], [1.1, 0.1], t1=0.5, h=1e-3)
    box = mixed_monotonicity(pr).final
    c, s = math.cos(0.5), math.sin(0.5)
    for x0 in ([0.9, -0.1], [1.1, 0.1], [0.9, 0.1], [1.1, -0.1], [1.0, 0.0]):
        x = [c * x0[0] + s * x0[1], -s * x0[0] + c * x0[1]]
        assert np.all(box.lower <= x) and np.all(x <= box.upper)


def test_mm_detects_invalid_decomposition():
    A = np.array([[0.0, -10.0], [0.0, 0.0]])

    def rhs(t, x, p, lo, hi):
        return (x @ A.T)[..., lo:hi]

    naive = SystemModel("naive", 2, 0, rhs,
                        decomposition=lambda t, x, p, xh, ph, lo, hi: rhs(t, x, p, lo, hi))
    with pytest.raises(ReachError, match="order violated"):
        mixed_monotonicity(problem(naive, [0, 0], [1, 1], t1=1.0, h=0.1))


def test_mm_requires_decomposition():
    plain = SystemModel("plain", 1, 0, lambda t, x, p, lo, hi: x[..., lo:hi])
    with pytest.raises(ReachError, match="no decomposition"):
        mixed_monotonicity(problem(plain, [0], [1]))


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(0, 300), min_size=8, max_size=8),
       st.lists(st.floats(0, 20), min_size=8, max_size=8),
       st.floats(0, 1))
def test_mm_order_preserved_and_monotone_in_initial_box(lo, width, shrink):
    m = make_traffic(n=8)
    lo = np.array(lo)
    hi = lo + np.array(width)
    pr = ReachProblem(m, IntervalVector(lo, hi), IntervalVector([0.0], [10.0]), 0.0, 10.0, 0.5, 2)
    tube = mixed_monotonicity(pr)
    assert all(np.all(b.lower <= b.upper) for _, b in tube.entries)
    inner = IntervalVector(lo + shrink * (hi - lo) / 2, hi - shrink * (hi - lo) / 2)
    pr_in = ReachProblem(m, inner, IntervalVector([2.0], [8.0]), 0.0, 10.0, 0.5, 2)
    for (_, a), (_, b) in zip(mixed_monotonicity(pr_in).entries, tube.entries):
        assert subset_of(a, b)


# sample count

@pytest.mark.parametrize("n,eps,delta,m", [(2, 0.05, 0.01, 480), (1, 0.5, 0.5, 6)])
def test_sample_count_examples(n, eps, delta, m):
    assert sample_count(n, eps, delta) == m


@given(st.integers(1, 10**6), st.floats(1e-4, 0.999), st.floats(1e-4, 0.999))
def test_sample_count_matches_oracle(n, eps, delta):
    assert sample_count(n, eps, delta) == scenario_count(n, eps, delta)


@given(st.integers(1, 1000), st.floats(1e-3, 0.9), st.floats(1e-3, 0.9), st.floats(0.1, 1.0))
def test_sample_count_monotone(n, eps, delta, f):
    m = sample_count(n, eps, delta)
    assert sample_count(n, eps * f, delta) >= m
    assert sample_count(n, eps, delta * f) >= m
    assert sample_count(n + 1, eps, delta) >= m


@pytest.mark.parametrize("args", [(0, 0.1, 0.1), (1, 0.0, 0.1), (1, 0.1, 1.0), (1, 1.5, 0.1)])
def test_sample_count_errors(args):
    with pytest.raises(ValueError):
        sample_count(*args)


def test_mc_spec_validation():
    for kw in (dict(epsilon=0), dict(delta=1), dict(samples_override=0)):
        with pytest.raises(ValueError):
            MonteCarloSpec(**kw)


# Monte Carlo

def test_mc_zero_dynamics_hull_of_samples():
    pr = problem(make_zero(2), [0, 1], [1, 3], t1=1.0, h=0.5)
    tube = monte_carlo(pr, MonteCarloSpec(seed=4, samples_override=50))
    pts = sample_points(np.array([0.0, 1.0]), np.array([1.0, 3.0]), 4, 0, 50)
    assert tube.final == IntervalVector(pts.min(axis=0), pts.max(axis=0))
    assert subset_of(tube.final, pr.initial)
    assert tube.report.m == 50


def test_mc_exponential_close_to_exact_interval():
    pr = problem(linear_model([[1.0]]), [1.0], [2.0])
    box = monte_carlo(pr, MonteCarloSpec(seed=11, samples_override=1000)).final
    assert E - 1e-9 <= box.lower[0] <= E * 1.02
    assert 2 * E * 0.98 <= box.upper[0] <= 2 * E + 1e-9


def test_mc_default_sample_count():
    pr = problem(make_zero(2), [0, 0], [1, 1], t1=1.0, h=0.5)
    assert monte_carlo(pr, MonteCarloSpec(0.05, 0.01)).report.m == 480


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 2**63 - 1), st.integers(2, 6))
def test_mc_seeded_determinism_across_workers(seed, workers):
    pr = traffic_problem(n=30, stride=10)
    spec = MonteCarloSpec(seed=seed, samples_override=300)
    a = monte_carlo(pr, spec, 1)
    b = monte_carlo(pr, spec, workers)
    assert a.to_json() == b.to_json()


def test_mc_determinism_with_batches(monkeypatch):
    # force several batches so the parallel-over-samples path runs
    import boxreach.methods as mod
    pr = traffic_problem(n=30)
    spec = MonteCarloSpec(seed=3, samples_override=257)
    single = monte_carlo(pr, spec, 1).to_json()
    monkeypatch.setattr(mod, "MC_BATCH_ELEMENTS", 30 * 16)
    assert mc_batch_size(257, 30) == 16
    assert monte_carlo(pr, spec, 4).to_json() == single
    assert monte_carlo(pr, spec, 1).to_json() == single


def test_mc_different_seeds_differ():
    pr = traffic_problem(n=10)
    a = monte_carlo(pr, MonteCarloSpec(seed=1, samples_override=50)).final
    b = monte_carlo(pr, MonteCarloSpec(seed=2, samples_override=50)).final
    assert a != b


def test_sample_points_independent_of_grouping():
    lo, hi = np.zeros(3), np.ones(3)
    whole = sample_points(lo, hi, 9, 0, 10)
    parts = np.vstack([sample_points(lo, hi, 9, 0, 4), sample_points(lo, hi, 9, 4, 10)])
    assert np.array_equal(whole, parts)
    assert not np.array_equal(whole, sample_points(lo, hi, 9, 0, 10, stream=1))
    assert np.all((whole >= 0) & (whole < 1))
    fixed = sample_points(np.array([2.0]), np.array([2.0]), 1, 0, 5)
    assert np.all(fixed == 2.0)


def test_mc_reports_diverging_sample():
    def blow(t, x, p, lo, hi):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(x[..., lo:hi] > 0.5, np.inf, 0.0)

    m = SystemModel("blow", 1, 0, blow)
    with pytest.raises(ReachError, match="sample"):
        monte_carlo(problem(m, [0], [1], t1=1.0, h=0.5), MonteCarloSpec(samples_override=20))


# coverage

def test_coverage_zero_dynamics_exact_box():
    pr = problem(make_zero(2), [0, 1], [1, 3], t1=1.0, h=0.5)
    tube = ReachTube(MONTE_CARLO, [(1.0, pr.initial)], RunReport(MONTE_CARLO, 2, 2, 1))
    assert coverage_estimate(pr, MonteCarloSpec(), tube, 2000, seed=5) == 0.0


def test_coverage_scalar_exponential_within_epsilon():
    pr = problem(linear_model([[1.0]]), [1.0], [2.0])
    spec = MonteCarloSpec(0.05, 0.01, seed=2024)
    tube = monte_carlo(pr, spec)
    assert tube.report.m == sample_count(1, 0.05, 0.01)
    assert coverage_estimate(pr, spec, tube, 10_000, seed=2024) <= 0.05


def test_coverage_shrunken_box():
    pr = problem(make_zero(1), [0.0], [1.0], t1=1.0, h=0.5)
    half = from_center_radius([0.5], [0.25])
    tube = ReachTube(MONTE_CARLO, [(1.0, half)], RunReport(MONTE_CARLO, 1, 2, 1))
    assert coverage_estimate(pr, MonteCarloSpec(), tube, 10_000, seed=1) >= 0.4


# tubes, reports, dispatch

@pytest.mark.parametrize("method", [GROWTH_BOUND, MIXED_MONOTONICITY, MONTE_CARLO])
def test_final_entry_equals_final_only_run(method):
    spec = MonteCarloSpec(seed=8, samples_override=64)
    recorded = run_method(method, traffic_problem(stride=7), 2, spec)
    final_only = run_method(method, traffic_problem(stride=0), 1, spec)
    assert len(final_only.entries) == 1
    assert recorded.final == final_only.final
    assert recorded.times[0] == 0.0 and recorded.times[-1] == 20.0
    assert all(b > a for a, b in zip(recorded.times, recorded.times[1:]))


@pytest.mark.parametrize("method", [GROWTH_BOUND, MIXED_MONOTONICITY])
def test_tube_worker_determinism(method):
    a = run_method(method, traffic_problem(n=101, stride=5), 1)
    b = run_method(method, traffic_problem(n=101, stride=5), 7)
    assert a.to_json() == b.to_json()


def test_unknown_method():
    with pytest.raises(ReachError, match="unknown method"):
        run_method("zonotope", traffic_problem())


def test_memory_estimates():
    assert state_memory_estimate(GROWTH_BOUND, 1000) == 56_000
    assert state_memory_estimate(MIXED_MONOTONICITY, 1000) == 112_000
    assert state_memory_estimate(MONTE_CARLO, 1000, m=100, workers=1) == 56 * 1000 * 100 + 16_000
    with pytest.raises(ValueError):
        state_memory_estimate(MONTE_CARLO, 10)
    with pytest.raises(ValueError):
        state_memory_estimate("nope", 10)


def test_report_fields():
    tube = growth_bound(traffic_problem())
    rep = tube.report
    assert rep.n == 12 and rep.steps == 40 and rep.workers == 1 and rep.m is None
    assert rep.total_s == pytest.approx(rep.setup_s + rep.integration_s + rep.reduction_s)
    assert min(rep.setup_s, rep.integration_s, rep.reduction_s) >= 0
    assert rep.state_memory_bytes == 56 * 12
    assert rep.deterministic_dict() == {"n": 12, "steps": 40}
    assert set(rep.to_dict()) >= {"setup_s", "integration_s", "reduction_s", "total_s",
                                  "state_memory_bytes", "workers", "n", "steps", "m"}


def test_tube_serialization():
    tube = growth_bound(traffic_problem(n=4, stride=20))
    data = json.loads(tube.to_json())
    assert data["method"] == GROWTH_BOUND and len(data["times"]) == len(data["boxes"]) == 3
    back = ReachTube.from_dict(data)
    assert back.entries == tube.entries
    rows = tube.to_csv().splitlines()
    assert rows[0] == "t,lower0,upper0,lower1,upper1,lower2,upper2,lower3,upper3"
    assert len(rows) == 4
    assert [float(v) for v in rows[-1].split(",")[1:3]] == [tube.final.lower[0],
                                                           tube.final.upper[0]]
