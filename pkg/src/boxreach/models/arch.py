"""Small nonlinear benchmarks: Van der Pol, Laub-Loomis, 12-state quadrotor.

Their growth bounds come from explicit dense contraction matrices that are
only valid over an operating box.  Van der Pol computes its matrix from the
box; the other two carry matrices produced by
``scripts/derive_contraction.py`` (symbolic Jacobian, entries bounded with
outward-rounded interval arithmetic) for the boxes recorded below.
"""
from __future__ import annotations

import math

import numpy as np

from ..intervals import IntervalVector
from ..system import ModelError, SystemModel, growth_from_matrix


def vdp_contraction(mu: float, x_range, y_range) -> np.ndarray:
    """Contraction matrix of Van der Pol over ``x_range x y_range``.

    ``J = [[0, 1], [-2 mu x y - 1, mu (1 - x^2)]]``; the off-diagonal is
    bilinear so its extreme magnitude sits at a corner.
    """
    (xl, xu), (yl, yu) = x_range, y_range
    off = max(abs(2 * mu * x * y + 1) for x in (xl, xu) for y in (yl, yu))
    min_sq = 0.0 if xl <= 0 <= xu else min(xl * xl, xu * xu)
    diag = mu * (1 - min_sq)
    up = lambda v: math.nextafter(v, math.inf)  # noqa: E731
    return np.array([[0.0, 1.0], [up(off), up(diag)]])


def make_vdp(mu: float = 1.0, x_min: float = 1.2, x_max: float = 2.4,
             y_min: float = -0.6, y_max: float = 2.5) -> SystemModel:
    """``x' = y``, ``y' = mu (1 - x^2) y - x``."""
    if not x_min < x_max or not y_min < y_max:
        raise ModelError("Van der Pol operating box must be nonempty")
    C = vdp_contraction(mu, (x_min, x_max), (y_min, y_max))

    def rhs(t, z, p, lo, hi):
        x, y = z[..., 0], z[..., 1]
        out = np.empty(z.shape)
        out[..., 0] = y
        out[..., 1] = mu * (1 - x * x) * y - x
        return out[..., lo:hi]

    return SystemModel(
        name="vdp", dim=2, input_dim=0, rhs=rhs, growth_rhs=growth_from_matrix(C),
        input_affine=True, sparsity_note="dense 2-state",
        operating_box=IntervalVector([x_min, y_min], [x_max, y_max]),
        meta={"params": dict(mu=mu, x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max),
              "contraction": C},
    )


# Operating box for the Laub-Loomis matrix below (lower, upper per state).
LAUB_LOOMIS_BOX = (
    [0.9, 0.7, 0.2, 1.6, 0.2, 0.05, 0.1],
    [1.6, 1.3, 1.6, 2.8, 1.1, 0.2, 0.5],
)
LAUB_LOOMIS_C = np.array([
    [-0.8999999999999999, 0.0, 1.4000000000000001, 0.0, 0.0, 0.0, 0.0],
    [0.0, -1.4999999999999998, 0.0, 0.0, 2.5000000000000004, 0.0, 0.0],
    [0.0, 1.2800000000000005, -0.5599999999999998, 0.0, 0.0, 0.0, 0.6000000000000001],
    [0.0, 0.0, 3.6400000000000006, -0.25999999999999995, 0.0, 0.0, 0.0],
    [0.7000000000000001, 0.0, 0.0, 1.1000000000000003, -1.5999999999999999, 0.0, 0.0],
    [0.30000000000000004, 0.0, 0.0, 0.0, 0.0, -3.0999999999999996, 0.0],
    [0.0, 0.7500000000000001, 0.0, 0.0, 0.0, 1.8000000000000003, -1.0499999999999996],
])


def make_laub_loomis() -> SystemModel:
    """Seven-state enzymatic activity network."""

    def rhs(t, x, p, lo, hi):
        x1, x2, x3, x4, x5, x6, x7 = (x[..., i] for i in range(7))
        out = np.empty(x.shape)
        out[..., 0] = 1.4 * x3 - 0.9 * x1
        out[..., 1] = 2.5 * x5 - 1.5 * x2
        out[..., 2] = 0.6 * x7 - 0.8 * x2 * x3
        out[..., 3] = 2.0 - 1.3 * x3 * x4
        out[..., 4] = 0.7 * x1 - x4 * x5
        out[..., 5] = 0.3 * x1 - 3.1 * x6
        out[..., 6] = 1.8 * x6 - 1.5 * x2 * x7
        return out[..., lo:hi]

    return SystemModel(
        name="laub-loomis", dim=7, input_dim=0, rhs=rhs,
        growth_rhs=growth_from_matrix(LAUB_LOOMIS_C),
        input_affine=True, sparsity_note="sparse 7-state",
        operating_box=IntervalVector(*LAUB_LOOMIS_BOX),
        meta={"params": {}, "contraction": LAUB_LOOMIS_C},
    )


ARCH_QUAD = dict(g=9.81, m=1.4, Jx=0.054, Jy=0.054, Jz=0.104)

ARCH_QUAD_BOX = (
    [-100.0] * 3 + [-50.0] * 3 + [-0.01] * 6,
    [100.0] * 3 + [50.0] * 3 + [0.01] * 6,
)
# positions never enter the Jacobian; angles stay in the box because the
# example starts level and the angle rows only couple to angles
ARCH_QUAD_C = np.array([
    [0.0, 0.0, 0.0, 1.0000000000000002, 0.01009983000087778, 0.01009983000087778, 1.009983000087778, 50.99998333341668, 51.0050331642523, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.009999833334166668, 1.0000009999500015, 0.01009983000087778, 50.505041497543964, 0.5099913333794446, 51.00998300008779, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.009999833334166668, 0.009999833334166668, 1.0000000000000002, 50.49999166670835, 50.50499150004391, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.010000000000000002, 0.010000000000000002, 0.0, 9.810000000000002, 0.0, 0.0, 50.00000000000001, 50.00000000000001],
    [0.0, 0.0, 0.0, 0.010000000000000002, 0.0, 0.010000000000000002, 9.810000000000002, 0.0009809673004359976, 0.0, 50.00000000000001, 0.0, 50.00000000000001],
    [0.0, 0.0, 7.142857142857141, 0.010000000000000002, 0.010000000000000002, -2.1428571428571397, 0.09809836500817502, 0.09809836500817502, 0.0, 50.00000000000001, 50.00000000000001, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.00010100335013419991, 0.010101008400512144, 0.0, 1.0000000000000002, 0.00010000166675278125, 0.010000333346667209],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.01009999833334167, 0.0, 0.0, 0.0, 1.0000000000000002, 0.009999833334166668],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.010100503354300856, 0.00010100840051213885, 0.0, 0.0, 0.01000033334666721, 1.0000500020834184],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 18.518518518518505, 0.0, 0.0, -18.518518518518498, 0.009259259259259264, 0.009259259259259264],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 18.518518518518505, 0.0, 0.009259259259259264, -18.518518518518498, 0.009259259259259264],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
])


def arch_quadrotor_rhs(x: np.ndarray, g=9.81, m=1.4, Jx=0.054, Jy=0.054, Jz=0.104,
                       u1=1.0, u2=0.0, u3=0.0) -> np.ndarray:
    """Closed-loop 12-state quadrotor (hover controller at height ``u1``)."""
    x1, x2, x3, x4, x5, x6, x7, x8, x9, x10, x11, x12 = (x[..., i] for i in range(12))
    s7, c7 = np.sin(x7), np.cos(x7)
    s8, c8 = np.sin(x8), np.cos(x8)
    s9, c9 = np.sin(x9), np.cos(x9)
    F = m * g - 10.0 * (x3 - u1) + 3.0 * x6
    tau_phi = -(x7 - u2) - x10
    tau_theta = -(x8 - u3) - x11
    out = np.empty(x.shape)
    out[..., 0] = (c8 * c9 * x4 + (s7 * s8 * c9 - c7 * s9) * x5
                   + (c7 * s8 * c9 + s7 * s9) * x6)
    out[..., 1] = (c8 * s9 * x4 + (s7 * s8 * s9 + c7 * c9) * x5
                   + (c7 * s8 * s9 - s7 * c9) * x6)
    out[..., 2] = s8 * x4 - s7 * c8 * x5 - c7 * c8 * x6
    out[..., 3] = x12 * x5 - x11 * x6 - g * s8
    out[..., 4] = x10 * x6 - x12 * x4 + g * c8 * s7
    out[..., 5] = x11 * x4 - x10 * x5 + g * c8 * c7 - F / m
    out[..., 6] = x10 + s7 * (s8 / c8) * x11 + c7 * (s8 / c8) * x12
    out[..., 7] = c7 * x11 - s7 * x12
    out[..., 8] = (s7 / c8) * x11 + (c7 / c8) * x12
    out[..., 9] = (Jy - Jz) / Jx * x11 * x12 + tau_phi / Jx
    out[..., 10] = (Jz - Jx) / Jy * x10 * x12 + tau_theta / Jy
    out[..., 11] = (Jx - Jy) / Jz * x10 * x11
    return out


def make_arch_quadrotor() -> SystemModel:
    """Closed-loop quadrotor stabilizing at height 1."""

    def rhs(t, x, p, lo, hi):
        return arch_quadrotor_rhs(x, **ARCH_QUAD)[..., lo:hi]

    return SystemModel(
        name="arch-quadrotor", dim=12, input_dim=0, rhs=rhs,
        growth_rhs=growth_from_matrix(ARCH_QUAD_C),
        input_affine=True, sparsity_note="dense 12-state",
        operating_box=IntervalVector(*ARCH_QUAD_BOX),
        meta={"params": dict(ARCH_QUAD), "contraction": ARCH_QUAD_C},
    )
