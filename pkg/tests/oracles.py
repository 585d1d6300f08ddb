"""Reference computations kept independent of the package's engine and methods."""
from __future__ import annotations

import math

import numpy as np


def rk4_reference(f, t0, t1, h, x0, p):
    """Plain vectorized classical RK4 for ``f(t, x, p)`` with rows as samples.

    Takes ``round((t1 - t0) / h)`` equal steps, so callers should choose
    ``h`` dividing the interval.
    """
    steps = int(round((t1 - t0) / h))
    h = (t1 - t0) / steps
    x = np.array(x0, dtype=float)
    for k in range(steps):
        t = t0 + k * h
        k1 = f(t, x, p)
        k2 = f(t + h / 2, x + h / 2 * k1, p)
        k3 = f(t + h / 2, x + h / 2 * k2, p)
        k4 = f(t + h, x + h * k3, p)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def dense_samples(lower, upper, count, seed):
    """Uniform samples of a box from numpy's default generator (no corners)."""
    rng = np.random.default_rng(seed)
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    return lower + (upper - lower) * rng.random((count, lower.size))


def sampled_final_states(problem, count=10_000, seed=12345, refine=10):
    """True final states of ``count`` sampled trajectories at step ``h / refine``."""
    model = problem.model
    x0 = dense_samples(problem.initial.lower, problem.initial.upper, count, seed)
    if model.input_dim:
        p = dense_samples(problem.input_lower, problem.input_upper, count, seed + 1)
    else:
        p = np.zeros((count, 0))
    n = model.dim

    def f(t, x, q):
        return model.rhs(t, x, q, 0, n)

    return rk4_reference(f, problem.t0, problem.t1, problem.h / refine, x0, p)


def violations(points, box, tol=0.0):
    """Number of rows of ``points`` outside ``box`` (closed, widened by ``tol``)."""
    inside = np.all((points >= box.lower - tol) & (points <= box.upper + tol), axis=1)
    return int(np.count_nonzero(~inside))


def scenario_count(n, eps, delta):
    """Sample count written out with mpmath-free float arithmetic, term by term."""
    a = 2.0 * n / eps
    b = math.log(2.0 * n / delta)
    return math.ceil(a * b)
