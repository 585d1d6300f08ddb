"""Swarms of K simplified quadrotors, optionally coupled by a potential field.

Each quadrotor has 12 states laid out as
``[p_n, p_e, h, phi, theta, psi]`` followed by their rates.  Thrust ``F`` is
a fixed parameter; the three torques are inputs shared by the swarm and
enter affinely through ``1 / J``.
"""
from __future__ import annotations

import numpy as np

from ..system import ModelError, SystemModel

QUAD_STATES = 12


def _quad_block(x, lo, hi):
    q0, q1 = lo // QUAD_STATES, -(-hi // QUAD_STATES)
    X = x[..., q0 * QUAD_STATES:q1 * QUAD_STATES].reshape(x.shape[:-1] + (q1 - q0, QUAD_STATES))
    return q0, q1, X


def _finish(D, x, lo, hi, q0):
    flat = D.reshape(x.shape[:-1] + (D.shape[-2] * QUAD_STATES,))
    off = q0 * QUAD_STATES
    return flat[..., lo - off:hi - off]


def _quad_dynamics(X, p, F, m, g, Jx, Jy, Jz):
    phi, theta, psi = X[..., 3], X[..., 4], X[..., 5]
    cphi, sphi = np.cos(phi), np.sin(phi)
    cth, sth = np.cos(theta), np.sin(theta)
    cpsi, spsi = np.cos(psi), np.sin(psi)
    k = F / m
    D = np.empty(X.shape)
    D[..., 0:6] = X[..., 6:12]
    D[..., 6] = k * (-cphi * sth * cpsi - sphi * spsi)
    D[..., 7] = k * (-cphi * sth * spsi + sphi * cpsi)
    D[..., 8] = g - k * cphi * cth
    tau = p[..., None, :]
    D[..., 9] = tau[..., 0] / Jx
    D[..., 10] = tau[..., 1] / Jy
    D[..., 11] = tau[..., 2] / Jz
    return D


def _quad_growth(R, w, F, m, Jx, Jy, Jz):
    # |d(accel)/d(angle)| <= F/m for every pairing that appears, globally
    k = F / m
    G = np.empty(R.shape)
    G[..., 0:6] = R[..., 6:12]
    ang = R[..., 3] + R[..., 4]
    G[..., 6] = k * (ang + R[..., 5])
    G[..., 7] = k * (ang + R[..., 5])
    G[..., 8] = k * ang
    wt = w[..., None, :]
    G[..., 9] = wt[..., 0] / Jx
    G[..., 10] = wt[..., 1] / Jy
    G[..., 11] = wt[..., 2] / Jz
    return G


def _check(K, F, m, g, Jx, Jy, Jz, min_K=1):
    if K < min_K:
        raise ModelError(f"need at least {min_K} quadrotor(s), got {K}")
    for name, val in (("F", F), ("m", m), ("g", g), ("Jx", Jx), ("Jy", Jy), ("Jz", Jz)):
        if not val > 0:
            raise ModelError(f"quadrotor parameter {name} must be positive, got {val}")


def make_quadrotor_swarm(K: int = 4, F: float = 1.4 * 9.81, m: float = 1.4, g: float = 9.81,
                         Jx: float = 0.054, Jy: float = 0.054, Jz: float = 0.104) -> SystemModel:
    """Decoupled swarm; ``n = 12 K``."""
    _check(K, F, m, g, Jx, Jy, Jz)

    def rhs(t, x, p, lo, hi):
        q0, q1, X = _quad_block(x, lo, hi)
        return _finish(_quad_dynamics(X, p, F, m, g, Jx, Jy, Jz), x, lo, hi, q0)

    def growth(t, r, w, lo, hi):
        q0, q1, R = _quad_block(r, lo, hi)
        return _finish(_quad_growth(R, w, F, m, Jx, Jy, Jz), r, lo, hi, q0)

    return SystemModel(
        name="quadrotor-swarm",
        dim=QUAD_STATES * K,
        input_dim=3,
        rhs=rhs,
        growth_rhs=growth,
        input_affine=True,
        sparsity_note="block diagonal, 12x12 blocks",
        meta={"params": dict(K=K, F=F, m=m, g=g, Jx=Jx, Jy=Jy, Jz=Jz)},
    )


def apf_forces(P: np.ndarray, Fr: float, Fa: float, q0: int, q1: int) -> np.ndarray:
    """Potential-field forces on quadrotors ``q0..q1-1``.

    ``P`` holds positions with shape ``(..., K, 3)``.  Per direction the
    nearest other quadrotor ``j*`` is the lowest index among those at minimal
    distance, and ``sgn(0) = 0``.
    """
    K = P.shape[-2]
    own = P[..., q0:q1, :]
    out = np.empty(own.shape)
    idx = np.arange(q0, q1)
    for d in range(3):
        diff = own[..., :, d, None] - P[..., None, :, d]
        dist = np.abs(diff)
        dist[..., np.arange(q1 - q0), idx] = np.inf
        jstar = np.argmin(dist, axis=-1)
        near = np.take_along_axis(diff, jstar[..., None], axis=-1)[..., 0]
        out[..., d] = Fr * np.sign(near) * np.exp(-np.abs(near)) - Fa * np.sign(own[..., d])
    return out


def make_quadrotor_apf(K: int = 4, F: float = 1.4 * 9.81, m: float = 1.4, g: float = 9.81,
                       Jx: float = 0.054, Jy: float = 0.054, Jz: float = 0.104,
                       F_r: float = 1.0, F_a: float = 0.1) -> SystemModel:
    """Swarm with repulsive/attractive potential-field forces on the accelerations.

    The force derivative in each direction is bounded by ``F_r`` almost
    everywhere and ``j*`` may be any other quadrotor, so the growth bound
    treats the coupling as dense: every acceleration radius grows with
    ``F_r`` times the sum of all position radii in that direction.  The sign
    jumps of the force are ignored by this bound.
    """
    _check(K, F, m, g, Jx, Jy, Jz, min_K=2)
    if F_r < 0 or F_a < 0:
        raise ModelError("F_r and F_a must be nonnegative")

    def rhs(t, x, p, lo, hi):
        q0, q1, X = _quad_block(x, lo, hi)
        D = _quad_dynamics(X, p, F, m, g, Jx, Jy, Jz)
        allX = x.reshape(x.shape[:-1] + (K, QUAD_STATES))
        D[..., 6:9] += apf_forces(allX[..., 0:3], F_r, F_a, q0, q1)
        return _finish(D, x, lo, hi, q0)

    def growth(t, r, w, lo, hi):
        q0, q1, R = _quad_block(r, lo, hi)
        G = _quad_growth(R, w, F, m, Jx, Jy, Jz)
        allR = r.reshape(r.shape[:-1] + (K, QUAD_STATES))
        total = allR[..., 0:3].sum(axis=-2)
        G[..., 6:9] += F_r * total[..., None, :]
        return _finish(G, r, lo, hi, q0)

    return SystemModel(
        name="quadrotor-apf",
        dim=QUAD_STATES * K,
        input_dim=3,
        rhs=rhs,
        growth_rhs=growth,
        input_affine=True,
        sparsity_note="dense: each acceleration may depend on every position in its direction",
        meta={"params": dict(K=K, F=F, m=m, g=g, Jx=Jx, Jy=Jy, Jz=Jz, F_r=F_r, F_a=F_a)},
    )
