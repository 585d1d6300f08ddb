"""Dynamical-system representation shared by the integrator and the methods.

A model exposes its right-hand side per block of state indices: a callable
``rhs(t, x, p, lo, hi)`` returns ``f_i(t, x, p)`` for ``lo <= i < hi``.
States may carry leading batch axes (``x.shape == (..., dim)``), which is how
the Monte Carlo method pushes many samples through one evaluation.  The value
of each component must not depend on the block it was requested in; that
property is what makes the parallel integrator worker-count deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .intervals import IntervalVector

BlockFn = Callable[[float, np.ndarray, np.ndarray, int, int], np.ndarray]
DecompFn = Callable[[float, np.ndarray, np.ndarray, np.ndarray, np.ndarray, int, int], np.ndarray]


class ModelError(ValueError):
    """Raised when a model lacks structure a method needs or is misused."""


@dataclass(frozen=True, eq=False)
class SystemModel:
    """``x' = f(t, x, p)`` with optional growth dynamics and decomposition.

    ``growth_rhs(t, r, w, lo, hi)`` evaluates the half-width dynamics
    ``r' = g(r, w)`` where ``w`` is the input half-width.  ``decomposition``
    is ``d(t, x, p, x_hat, p_hat, lo, hi)`` with ``d(t, x, p, x, p) = f``.
    ``operating_box`` documents where the growth bound is valid (None means
    everywhere).
    """

    name: str
    dim: int
    input_dim: int
    rhs: BlockFn
    growth_rhs: Optional[BlockFn] = None
    decomposition: Optional[DecompFn] = None
    input_affine: bool = False
    sparsity_note: str = ""
    operating_box: Optional[IntervalVector] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ModelError(f"model dimension must be positive, got {self.dim}")
        if self.input_dim < 0:
            raise ModelError(f"input dimension must be nonnegative, got {self.input_dim}")

    def component(self, i: int, t: float, x, p) -> float:
        """Value of ``f_i(t, x, p)`` for a single unbatched state."""
        if not 0 <= i < self.dim:
            raise ModelError(f"component {i} outside [0, {self.dim})")
        x = np.asarray(x, dtype=np.float64)
        p = np.asarray(p, dtype=np.float64).reshape(self.input_dim)
        return float(self.rhs(t, x, p, i, i + 1)[..., 0])

    def full_rhs(self, t: float, x, p) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        p = np.asarray(p, dtype=np.float64)
        return self.rhs(t, x, p, 0, self.dim)


def eval_rhs_block(model: SystemModel, lo: int, hi: int, t: float,
                   x: np.ndarray, p: np.ndarray, out: np.ndarray) -> None:
    """Write ``f_i(t, x, p)`` into ``out[..., i]`` for ``lo <= i < hi``.

    Nothing outside the range is touched.
    """
    if not (0 <= lo <= hi <= model.dim):
        raise ModelError(f"index range [{lo}, {hi}) outside [0, {model.dim})")
    if x.shape[-1] != model.dim:
        raise ModelError(f"state has {x.shape[-1]} entries, model {model.name!r} has {model.dim}")
    if p.shape[-1] != model.input_dim:
        raise ModelError(
            f"input has {p.shape[-1]} entries, model {model.name!r} has {model.input_dim}")
    if hi > lo:
        out[..., lo:hi] = model.rhs(t, x, p, lo, hi)


@dataclass(frozen=True)
class EmbeddingState:
    """Lower and upper halves of an embedding-system state."""

    x: np.ndarray
    x_hat: np.ndarray

    @classmethod
    def split(cls, z: np.ndarray) -> "EmbeddingState":
        n = z.shape[-1] // 2
        return cls(z[..., :n], z[..., n:])

    def ordered(self) -> bool:
        return bool(np.all(self.x <= self.x_hat))


def embed(model: SystemModel) -> SystemModel:
    """The 2n-dimensional embedding system built from the decomposition.

    State is ``(x, x_hat)`` concatenated and input ``(p, p_hat)``.  Component
    ``i < n`` is ``d_i(t, x, p, x_hat, p_hat)``; component ``n + i`` is
    ``d_i(t, x_hat, p_hat, x, p)``.
    """
    d = model.decomposition
    if d is None:
        raise ModelError(f"model {model.name!r} has no decomposition function")
    n, k = model.dim, model.input_dim

    def rhs(t, z, q, lo, hi):
        x, xh = z[..., :n], z[..., n:]
        p, ph = q[..., :k], q[..., k:]
        parts = []
        if lo < n:
            parts.append(d(t, x, p, xh, ph, lo, min(hi, n)))
        if hi > n:
            parts.append(d(t, xh, ph, x, p, max(lo, n) - n, hi - n))
        if len(parts) == 1:
            return parts[0]
        return np.concatenate(parts, axis=-1)

    return SystemModel(
        name=f"embed({model.name})",
        dim=2 * n,
        input_dim=2 * k,
        rhs=rhs,
        input_affine=False,
        sparsity_note=model.sparsity_note,
        meta={"base": model},
    )


def growth_system(model: SystemModel) -> SystemModel:
    """The radius dynamics ``r' = g(r, w)`` packaged as an ordinary model."""
    if model.growth_rhs is None:
        raise ModelError(f"model {model.name!r} has no growth dynamics")
    return SystemModel(
        name=f"growth({model.name})",
        dim=model.dim,
        input_dim=model.input_dim,
        rhs=model.growth_rhs,
        sparsity_note=model.sparsity_note,
    )


def _dense_rows(M: np.ndarray, v: np.ndarray, lo: int, hi: int) -> np.ndarray:
    # fixed column order so every row sums the same way regardless of block
    rows = M[lo:hi]
    out = np.zeros(v.shape[:-1] + (hi - lo,))
    for j in range(M.shape[1]):
        col = rows[:, j]
        if np.any(col):
            out = out + col * v[..., j:j + 1]
    return out


def growth_from_matrix(C, input_gain=None) -> BlockFn:
    """Growth dynamics ``g(r, w) = C r + |B| w`` from an explicit dense C.

    Only sensible for small systems.  ``input_gain`` defaults to the identity
    when the input and state dimensions agree and to no input otherwise.
    """
    C = np.array(C, dtype=np.float64)
    n = C.shape[0]
    B = None if input_gain is None else np.abs(np.array(input_gain, dtype=np.float64))

    def g(t, r, w, lo, hi):
        out = _dense_rows(C, r, lo, hi)
        if B is not None:
            out = out + _dense_rows(B, w, lo, hi)
        elif w.shape[-1] == n:
            out = out + w[..., lo:hi]
        return out

    return g


def contraction_matrix(A) -> np.ndarray:
    """Diagonal kept, off-diagonal entries replaced by absolute values."""
    A = np.array(A, dtype=np.float64)
    C = np.abs(A)
    np.fill_diagonal(C, np.diag(A))
    return C


def linear_model(A, B=None, name: str = "linear") -> SystemModel:
    """``x' = A x + B p`` with its exact contraction matrix and decomposition.

    The decomposition routes positive off-diagonal couplings through ``x``
    and negative ones through ``x_hat`` (likewise for inputs), which is valid
    for any A.
    """
    A = np.atleast_2d(np.array(A, dtype=np.float64))
    n = A.shape[0]
    B = np.zeros((n, 0)) if B is None else np.atleast_2d(np.array(B, dtype=np.float64))
    k = B.shape[1]
    off = A - np.diag(np.diag(A))
    A_same = np.diag(np.diag(A)) + np.clip(off, 0, None)
    A_cross = np.clip(off, None, 0)
    B_same, B_cross = np.clip(B, 0, None), np.clip(B, None, 0)

    def rhs(t, x, p, lo, hi):
        out = _dense_rows(A, x, lo, hi)
        if k:
            out = out + _dense_rows(B, p, lo, hi)
        return out

    def decomposition(t, x, p, xh, ph, lo, hi):
        out = _dense_rows(A_same, x, lo, hi) + _dense_rows(A_cross, xh, lo, hi)
        if k:
            out = out + (_dense_rows(B_same, p, lo, hi) + _dense_rows(B_cross, ph, lo, hi))
        return out

    return SystemModel(
        name=name,
        dim=n,
        input_dim=k,
        rhs=rhs,
        growth_rhs=growth_from_matrix(contraction_matrix(A), B if k else None),
        decomposition=decomposition,
        input_affine=True,
        sparsity_note="dense linear",
    )


def check_decomposition(model: SystemModel, samples: int, seed: int,
                        state_box: IntervalVector,
                        input_box: Optional[IntervalVector] = None,
                        t_range: tuple[float, float] = (0.0, 0.0)) -> bool:
    """Sampled check that ``d(t, x, p, x, p)`` reproduces ``f(t, x, p)``.

    Tolerance is ``1e-9 * (1 + |f|)`` per component.  Deterministic for a
    fixed seed.
    """
    if model.decomposition is None:
        raise ModelError(f"model {model.name!r} has no decomposition function")
    if state_box.dim != model.dim:
        raise ModelError(f"state box has dimension {state_box.dim}, model has {model.dim}")
    rng = np.random.default_rng(seed)
    x = state_box.lower + (state_box.upper - state_box.lower) * rng.random((samples, model.dim))
    if model.input_dim:
        if input_box is None or input_box.dim != model.input_dim:
            raise ModelError(f"an input box of dimension {model.input_dim} is required")
        p = input_box.lower + (input_box.upper - input_box.lower) * rng.random(
            (samples, model.input_dim))
    else:
        p = np.zeros((samples, 0))
    ts = t_range[0] + (t_range[1] - t_range[0]) * rng.random(samples)
    for s in range(samples):
        f = model.rhs(ts[s], x[s], p[s], 0, model.dim)
        d = model.decomposition(ts[s], x[s], p[s], x[s], p[s], 0, model.dim)
        if not np.all(np.abs(d - f) <= 1e-9 * (1 + np.abs(f))):
            return False
    return True


@dataclass(frozen=True, eq=False)
class ReachProblem:
    """Initial box, input box, time window and step for one reach query."""

    model: SystemModel
    initial: IntervalVector
    inputs: Optional[IntervalVector]
    t0: float
    t1: float
    h: float
    tube_stride: int = 0

    def __post_init__(self):
        m = self.model
        if self.initial.dim != m.dim:
            raise ModelError(
                f"initial box has dimension {self.initial.dim}, model {m.name!r} has {m.dim}")
        in_dim = 0 if self.inputs is None else self.inputs.dim
        if in_dim != m.input_dim:
            raise ModelError(
                f"input box has dimension {in_dim}, model {m.name!r} has {m.input_dim} inputs")
        if not self.t1 > self.t0:
            raise ModelError(f"t1 ({self.t1}) must exceed t0 ({self.t0})")
        if not self.h > 0:
            raise ModelError(f"step size must be positive, got {self.h}")
        if self.tube_stride < 0:
            raise ModelError("tube_stride must be nonnegative")

    @property
    def input_lower(self) -> np.ndarray:
        return np.zeros(0) if self.inputs is None else self.inputs.lower

    @property
    def input_upper(self) -> np.ndarray:
        return np.zeros(0) if self.inputs is None else self.inputs.upper
