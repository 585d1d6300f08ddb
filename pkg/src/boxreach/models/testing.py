"""Small models with closed-form reach sets, used to check the methods."""
from __future__ import annotations

import numpy as np

from ..system import SystemModel, linear_model


def make_zero(n: int = 1, inputs: int = 0) -> SystemModel:
    """``x' = 0`` with zero growth and ``d = f``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")

    def zeros(t, x, p, lo, hi):
        return np.zeros(x.shape[:-1] + (hi - lo,))

    def d(t, x, p, xh, ph, lo, hi):
        return np.zeros(x.shape[:-1] + (hi - lo,))

    return SystemModel(name="zero", dim=n, input_dim=inputs, rhs=zeros, growth_rhs=zeros,
                       decomposition=d, input_affine=True, sparsity_note="no coupling")


def make_linear_scalar(a: float = 1.0) -> SystemModel:
    """``x' = a x + p`` with one state and one input."""
    m = linear_model([[a]], [[1.0]], name="linear")
    return m
