"""Seven-state single-track vehicle with tire slip (BMW 320i parameters).

States: ``[p_x, p_y, delta, v, psi, psi_dot, beta]`` (position, steering
angle, speed, yaw, yaw rate, slip angle).  Inputs: steering rate and
longitudinal acceleration, both saturated.  Below ``|v| = 0.1`` the
kinematic equations apply, otherwise the dynamic ones.

Two modes:

* ``maneuver = 1``: the inputs follow a fixed smooth lane-change schedule,
  ``p1(t) = A cos(2 pi t / P)`` and ``p2(t) = accel``.  The model then has no
  free inputs and supports the growth bound, using a contraction matrix
  bounded with outward-rounded interval arithmetic over an operating box.
* ``maneuver = 0``: both inputs are free and enter non-affinely, so only
  Monte Carlo applies.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np

from ..intervals import IntervalVector
from ..system import ModelError, SystemModel, growth_from_matrix

G = 9.81
KINEMATIC_SPEED = 0.1
STEER_RATE_LIMIT = 0.4
ACCEL_LIMIT = 11.5

BMW_320I = dict(l_wb=2.5789, m=1093.3, mu=1.0489, l_f=1.156, l_r=1.422, h_cg=0.6137,
                I_z=1791.6, C_Sf=20.89, C_Sr=20.89)


def sat_steering(p1):
    return np.clip(p1, -STEER_RATE_LIMIT, STEER_RATE_LIMIT)


def sat_accel(p2):
    return np.clip(p2, -ACCEL_LIMIT, ACCEL_LIMIT)


def single_track_rhs(x, p1, p2, prm) -> np.ndarray:
    """All seven derivatives for states ``x`` of shape ``(..., 7)``."""
    l_wb, m, mu = prm["l_wb"], prm["m"], prm["mu"]
    l_f, l_r, h_cg, I_z = prm["l_f"], prm["l_r"], prm["h_cg"], prm["I_z"]
    C_Sf, C_Sr = prm["C_Sf"], prm["C_Sr"]
    L = l_r + l_f
    delta, v, psi, dpsi, beta = x[..., 2], x[..., 3], x[..., 4], x[..., 5], x[..., 6]
    u1, u2 = sat_steering(p1), sat_accel(p2)
    front = C_Sf * (G * l_r - p2 * h_cg)
    rear = C_Sr * (G * l_f + p2 * h_cg)

    out = np.empty(np.broadcast_shapes(x.shape, np.shape(p1) + (7,), np.shape(p2) + (7,)))
    out[..., 2] = u1
    out[..., 3] = u2
    kin = np.abs(v) < KINEMATIC_SPEED
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        a1 = v * np.cos(psi)
        a2 = v * np.sin(psi)
        a5 = v / l_wb * np.tan(delta)
        a6 = p2 / l_wb * np.tan(delta) + v / (l_wb * np.cos(delta) ** 2) * p1
        b1 = v * np.cos(psi + beta)
        b2 = v * np.sin(psi + beta)
        b6 = (mu * m / (I_z * L)) * (
            l_f * front * delta
            + (l_r * rear - l_f * front) * beta
            - (l_f * l_f * front + l_r * l_r * rear) * dpsi / v)
        b7 = (mu / (v * L)) * (
            front * delta
            - (rear + front) * beta
            - (l_f * front - l_r * rear) * dpsi / v) - dpsi
        out[..., 0] = np.where(kin, a1, b1)
        out[..., 1] = np.where(kin, a2, b2)
        out[..., 4] = np.where(kin, a5, dpsi)
        out[..., 5] = np.where(kin, a6, b6)
        out[..., 6] = np.where(kin, 0.0, b7)
    return out


def _iv_upper(x) -> float:
    # round the float conversion away from the interval
    return math.nextafter(float(x.b), math.inf)


def _iv_abs_max(x) -> float:
    return math.nextafter(max(abs(float(x.a)), abs(float(x.b))), math.inf)


def dynamic_contraction(prm: dict, box: dict, accel: float = 0.0) -> np.ndarray:
    """Contraction matrix of the dynamic regime over an operating box.

    ``box`` gives ``v_min, v_max, steer_max, yaw_max, yaw_rate_max,
    slip_max``; entries are bounded with mpmath interval arithmetic.  Rows
    for steering angle and speed are zero because their derivatives depend
    only on the input schedule.
    """
    if not box["v_min"] >= KINEMATIC_SPEED:
        raise ModelError("operating box must keep the speed in the dynamic regime (v_min >= 0.1)")
    iv = mpmath.iv
    I = lambda lo, hi: iv.mpf([lo, hi])  # noqa: E731
    v = I(box["v_min"], box["v_max"])
    delta = I(-box["steer_max"], box["steer_max"])
    heading = I(-box["yaw_max"] - box["slip_max"], box["yaw_max"] + box["slip_max"])
    dpsi = I(-box["yaw_rate_max"], box["yaw_rate_max"])
    beta = I(-box["slip_max"], box["slip_max"])
    p = {k: iv.mpf(val) for k, val in prm.items()}
    p2 = iv.mpf(accel)
    g = iv.mpf(G)
    L = p["l_r"] + p["l_f"]
    front = p["C_Sf"] * (g * p["l_r"] - p2 * p["h_cg"])
    rear = p["C_Sr"] * (g * p["l_f"] + p2 * p["h_cg"])
    K6 = p["mu"] * p["m"] / (p["I_z"] * L)
    A = p["l_f"] * front
    B = p["l_r"] * rear - p["l_f"] * front
    D = p["l_f"] ** 2 * front + p["l_r"] ** 2 * rear
    E = front
    Fb = rear + front
    Gc = p["l_f"] * front - p["l_r"] * rear
    mu = p["mu"]

    J = {}
    c, s = iv.cos(heading), iv.sin(heading)
    J[0, 3], J[0, 4], J[0, 6] = c, -v * s, -v * s
    J[1, 3], J[1, 4], J[1, 6] = s, v * c, v * c
    J[4, 5] = iv.mpf(1)
    J[5, 2] = K6 * A
    J[5, 3] = K6 * D * dpsi / v ** 2
    J[5, 5] = -K6 * D / v
    J[5, 6] = K6 * B
    J[6, 2] = mu * E / (v * L)
    J[6, 3] = -mu / (v ** 2 * L) * (E * delta - Fb * beta - 2 * Gc * dpsi / v)
    J[6, 5] = -mu * Gc / (v ** 2 * L) - 1
    J[6, 6] = -mu * Fb / (v * L)

    C = np.zeros((7, 7))
    for (i, j), val in J.items():
        C[i, j] = _iv_upper(val) if i == j else _iv_abs_max(val)
    return C


def make_single_track(l_wb: float = 2.5789, m: float = 1093.3, mu: float = 1.0489,
                      l_f: float = 1.156, l_r: float = 1.422, h_cg: float = 0.6137,
                      I_z: float = 1791.6, C_Sf: float = 20.89, C_Sr: float = 20.89,
                      maneuver: int = 1, amplitude: float = 0.02, period: float = 4.0,
                      accel: float = 0.0, v_min: float = 15.0, v_max: float = 25.0,
                      steer_max: float = 0.1, yaw_max: float = 0.5,
                      yaw_rate_max: float = 1.0, slip_max: float = 0.2) -> SystemModel:
    prm = dict(l_wb=l_wb, m=m, mu=mu, l_f=l_f, l_r=l_r, h_cg=h_cg, I_z=I_z, C_Sf=C_Sf, C_Sr=C_Sr)
    for name, val in prm.items():
        if not val > 0:
            raise ModelError(f"single-track parameter {name} must be positive, got {val}")
    params = dict(prm, maneuver=int(maneuver))

    if not maneuver:
        def rhs(t, x, p, lo, hi):
            return single_track_rhs(x, p[..., 0], p[..., 1], prm)[..., lo:hi]

        return SystemModel(
            name="single-track", dim=7, input_dim=2, rhs=rhs,
            input_affine=False, sparsity_note="dense 7-state",
            meta={"params": params},
        )

    if not period > 0:
        raise ModelError("maneuver period must be positive")
    box = dict(v_min=v_min, v_max=v_max, steer_max=steer_max, yaw_max=yaw_max,
               yaw_rate_max=yaw_rate_max, slip_max=slip_max)
    C = dynamic_contraction(prm, box, accel)
    omega = 2 * math.pi / period

    def schedule(t):
        return amplitude * math.cos(omega * t), accel

    def rhs(t, x, p, lo, hi):
        p1, p2 = schedule(t)
        return single_track_rhs(x, p1, p2, prm)[..., lo:hi]

    # positions are unconstrained
    big = np.finfo(np.float64).max
    op_box = IntervalVector(
        [-big, -big, -steer_max, v_min, -yaw_max, -yaw_rate_max, -slip_max],
        [big, big, steer_max, v_max, yaw_max, yaw_rate_max, slip_max])
    params.update(amplitude=amplitude, period=period, accel=accel, **box)
    return SystemModel(
        name="single-track", dim=7, input_dim=0, rhs=rhs,
        growth_rhs=growth_from_matrix(C),
        input_affine=True, sparsity_note="dense 7-state",
        operating_box=op_box,
        meta={"params": params, "contraction": C, "schedule": schedule},
    )
