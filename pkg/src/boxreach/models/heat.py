"""Heat diffusion in the unit cube on an l x l x l grid.

State index ``(z * l + y) * l + x``.  Five faces are insulated (ghost node
equal to the boundary node, so no flux crosses them); the face ``z = l - 1``
exchanges heat with a zero-temperature environment through a first-order
Robin condition, ghost value ``(1 - dx * h_exchange) u``.  The resulting
7-point operator is

    u' = a * (sum of the six neighbor differences) - a * dx * h_exchange * u * [z == l-1]

with ``a = alpha / dx**2`` and ``dx = 1 / (l - 1)``.  It is symmetric with
nonnegative off-diagonals, so the operator itself is the contraction
matrix and ``d = f`` is a valid decomposition.
"""
from __future__ import annotations

import numpy as np

from ..system import ModelError, SystemModel


def make_heat3d(l: int = 8, alpha: float = 1.0, h_exchange: float = 1.0) -> SystemModel:
    if l < 2:
        raise ModelError(f"heat grid needs at least 2 points per axis, got {l}")
    if alpha <= 0 or h_exchange < 0:
        raise ModelError("alpha must be positive and h_exchange nonnegative")
    n = l ** 3
    slab = l * l
    dx = 1.0 / (l - 1)
    a = alpha / dx ** 2
    loss = a * dx * h_exchange

    def apply(t, x, p, lo, hi):
        if hi <= lo:
            return np.zeros(x.shape[:-1] + (0,))
        zlo, zhi = lo // slab, -(-hi // slab)
        nz = zhi - zlo
        batch = x.shape[:-1]
        grid = x.reshape(batch + (l, l, l))
        # ghost-padded copy of slabs zlo..zhi-1; insulated ghosts repeat the boundary node
        P = np.empty(batch + (nz + 2, l + 2, l + 2))
        U = P[..., 1:-1, 1:-1, 1:-1]
        U[...] = grid[..., zlo:zhi, :, :]
        P[..., 0, 1:-1, 1:-1] = grid[..., max(zlo - 1, 0), :, :]
        P[..., -1, 1:-1, 1:-1] = grid[..., min(zhi, l - 1), :, :]
        P[..., 1:-1, 0, 1:-1] = U[..., 0, :]
        P[..., 1:-1, -1, 1:-1] = U[..., -1, :]
        P[..., 1:-1, 1:-1, 0] = U[..., 0]
        P[..., 1:-1, 1:-1, -1] = U[..., -1]
        s = P[..., 1:-1, 1:-1, :-2] + P[..., 1:-1, 1:-1, 2:]
        s += P[..., 1:-1, :-2, 1:-1]
        s += P[..., 1:-1, 2:, 1:-1]
        s += P[..., :-2, 1:-1, 1:-1]
        s += P[..., 2:, 1:-1, 1:-1]
        s -= 6.0 * U
        s *= a
        if zhi == l:
            s[..., -1, :, :] -= loss * U[..., -1, :, :]
        off = zlo * slab
        return s.reshape(batch + (nz * slab,))[..., lo - off:hi - off]

    def decomposition(t, x, p, xh, ph, lo, hi):
        return apply(t, x, p, lo, hi)

    return SystemModel(
        name="heat3d",
        dim=n,
        input_dim=0,
        rhs=apply,
        growth_rhs=apply,
        decomposition=decomposition,
        input_affine=True,
        sparsity_note="7-point stencil",
        meta={"params": dict(l=l, alpha=alpha, h_exchange=h_exchange)},
    )
