"""Axis-aligned boxes and point sets.

Boxes are closed, never empty, and stored as 64-bit float lower/upper
vectors.  Arithmetic here is plain floating point, not outward-rounded.
"""
from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np


class IntervalError(ValueError):
    """Raised for invalid boxes or mismatched dimensions."""


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise IntervalError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


class IntervalVector:
    """Closed box ``[lower, upper]`` in R^dim.

    Both bound vectors are copied and frozen on construction, so instances
    can be shared between worker threads.
    """

    __slots__ = ("_lower", "_upper")

    def __init__(self, lower, upper):
        lo = _as_vector(lower, "lower")
        hi = _as_vector(upper, "upper")
        if lo.shape != hi.shape:
            raise IntervalError(
                f"lower has {lo.size} entries but upper has {hi.size}")
        if lo.size == 0:
            raise IntervalError("box dimension must be positive")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise IntervalError("box bounds must be finite")
        bad = np.flatnonzero(lo > hi)
        if bad.size:
            i = int(bad[0])
            raise IntervalError(
                f"empty interval in component {i}: lower {lo[i]!r} > upper {hi[i]!r}")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self._lower = lo
        self._upper = hi

    @property
    def lower(self) -> np.ndarray:
        return self._lower

    @property
    def upper(self) -> np.ndarray:
        return self._upper

    @property
    def dim(self) -> int:
        return self._lower.size

    def __eq__(self, other):
        if not isinstance(other, IntervalVector):
            return NotImplemented
        return (np.array_equal(self._lower, other._lower)
                and np.array_equal(self._upper, other._upper))

    def __hash__(self):
        return hash((self._lower.tobytes(), self._upper.tobytes()))

    def __repr__(self):
        if self.dim <= 6:
            parts = ", ".join(f"[{float(a)!r}, {float(b)!r}]" for a, b in zip(self._lower, self._upper))
            return f"IntervalVector({parts})"
        return f"IntervalVector(dim={self.dim})"

    def to_dict(self) -> dict:
        return {"lower": self._lower.tolist(), "upper": self._upper.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "IntervalVector":
        return cls(data["lower"], data["upper"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "IntervalVector":
        return cls.from_dict(json.loads(text))

    @classmethod
    def point(cls, x) -> "IntervalVector":
        return cls(x, x)


def center(iv: IntervalVector) -> np.ndarray:
    return (iv.lower + iv.upper) / 2


def half_width(iv: IntervalVector) -> np.ndarray:
    return (iv.upper - iv.lower) / 2


def from_center_radius(c, r) -> IntervalVector:
    """Box with midpoint ``c`` and componentwise radius ``r >= 0``."""
    c = _as_vector(c, "center")
    r = _as_vector(r, "radius")
    if c.shape != r.shape:
        raise IntervalError(f"center has {c.size} entries but radius has {r.size}")
    neg = np.flatnonzero(r < 0)
    if neg.size:
        i = int(neg[0])
        raise IntervalError(f"negative radius {r[i]!r} in component {i}")
    return IntervalVector(c - r, c + r)


def _check_dims(a: int, b: int, what: str) -> None:
    if a != b:
        raise IntervalError(f"dimension mismatch in {what}: {a} vs {b}")


def contains(iv: IntervalVector, x) -> bool:
    x = _as_vector(x, "point")
    _check_dims(iv.dim, x.size, "contains")
    return bool(np.all(iv.lower <= x) and np.all(x <= iv.upper))


def subset_of(a: IntervalVector, b: IntervalVector) -> bool:
    _check_dims(a.dim, b.dim, "subset_of")
    return bool(np.all(b.lower <= a.lower) and np.all(a.upper <= b.upper))


class PointSet:
    """A finite list of points of common dimension, stored row-wise."""

    __slots__ = ("_points",)

    def __init__(self, points: Sequence[Sequence[float]] | np.ndarray):
        arr = np.array(points, dtype=np.float64, copy=True)
        if arr.size == 0:
            arr = arr.reshape(0, arr.shape[-1] if arr.ndim == 2 else 0)
        elif arr.ndim == 1:
            # a single point
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise IntervalError(f"points must form a 2-d array, got shape {arr.shape}")
        arr.flags.writeable = False
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self):
        return self._points.shape[0]

    def add(self, p) -> "PointSet":
        p = _as_vector(p, "point")
        if len(self):
            _check_dims(self.dim, p.size, "PointSet.add")
            return PointSet(np.vstack([self._points, p]))
        return PointSet(p.reshape(1, -1))


def hull(ps: PointSet | Iterable) -> IntervalVector:
    """Smallest box containing every point (elementwise min and max)."""
    if not isinstance(ps, PointSet):
        ps = PointSet(list(ps))
    if len(ps) == 0:
        raise IntervalError("hull of an empty point set")
    pts = ps.points
    return IntervalVector(pts.min(axis=0), pts.max(axis=0))
