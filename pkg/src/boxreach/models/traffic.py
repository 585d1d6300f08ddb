"""Single-lane road split into segments (cell transmission dynamics).

Segment ``j`` sends ``phi_j = min(c, v x_j, w (xbar - x_{j+1}) / beta)`` to
its successor, of which a fraction ``beta`` stays on the road; the last
segment sends ``min(c, v x_{n-1})`` off the road.  Segment 0 receives the
exogenous inflow ``p``:

    x_0'     = (p - phi_0) / T
    x_i'     = (beta phi_{i-1} - phi_i) / T

Every flux is nondecreasing in its sending density and nonincreasing in the
receiving density, so the system is cooperative: ``d = f`` is a valid
decomposition, and the Jacobian has ``J_ii <= 0``, ``0 <= J_{i,i-1} <= beta v / T``,
``0 <= J_{i,i+1} <= w / (beta T)`` everywhere.
"""
from __future__ import annotations

import numpy as np

from ..system import ModelError, SystemModel


def make_traffic(n: int = 50, v: float = 0.5, w: float = 1.0 / 6.0, c: float = 40.0,
                 xbar: float = 320.0, T: float = 30.0, beta: float = 0.75) -> SystemModel:
    if n < 3:
        raise ModelError(f"traffic model needs at least 3 segments, got {n}")
    for name, val in (("v", v), ("w", w), ("c", c), ("xbar", xbar), ("T", T), ("beta", beta)):
        if not val > 0:
            raise ModelError(f"traffic parameter {name} must be positive, got {val}")
    if beta > 1:
        raise ModelError(f"beta must lie in (0, 1], got {beta}")
    w_over_beta = w / beta

    def flux(x, j0, j1):
        # outflow of segments j0..j1-1
        send = np.minimum(c, v * x[..., j0:j1])
        last = min(j1, n - 1)
        if last > j0:
            recv = w_over_beta * (xbar - x[..., j0 + 1:last + 1])
            send[..., :last - j0] = np.minimum(send[..., :last - j0], recv)
        return send

    def rhs(t, x, p, lo, hi):
        j0 = max(lo - 1, 0)
        phi = flux(x, j0, hi)
        out = np.empty(x.shape[:-1] + (hi - lo,))
        if lo == 0:
            out[..., 0] = (p[..., 0] - phi[..., 0]) / T
            if hi > 1:
                out[..., 1:] = (beta * phi[..., :hi - 1] - phi[..., 1:hi]) / T
        else:
            out[...] = (beta * phi[..., :hi - lo] - phi[..., 1:hi - lo + 1]) / T
        return out

    up = beta * v / T
    down = w / (beta * T)

    def growth(t, r, wp, lo, hi):
        # C is tridiagonal with zero diagonal: r_i' = up r_{i-1} + down r_{i+1}
        out = np.zeros(r.shape[:-1] + (hi - lo,))
        a, b = max(lo, 1), min(hi, n - 1)
        if b > lo:
            out[..., :b - lo] = down * r[..., lo + 1:b + 1]
        if hi > a:
            out[..., a - lo:] = out[..., a - lo:] + up * r[..., a - 1:hi - 1]
        if lo == 0:
            out[..., 0] = out[..., 0] + wp[..., 0] / T
        return out

    def decomposition(t, x, p, xh, ph, lo, hi):
        return rhs(t, x, p, lo, hi)

    return SystemModel(
        name="traffic",
        dim=n,
        input_dim=1,
        rhs=rhs,
        growth_rhs=growth,
        decomposition=decomposition,
        input_affine=True,
        sparsity_note="tridiagonal: segment i couples to i-1 and i+1",
        meta={"params": dict(n=n, v=v, w=w, c=c, xbar=xbar, T=T, beta=beta)},
    )
