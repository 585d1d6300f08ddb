"""Registry of library models: constructors, parameters, supported methods."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ..methods import GROWTH_BOUND, MIXED_MONOTONICITY, MONTE_CARLO
from ..system import ModelError, SystemModel
from .arch import make_arch_quadrotor, make_laub_loomis, make_vdp
from .heat import make_heat3d
from .quadrotor import make_quadrotor_apf, make_quadrotor_swarm
from .single_track import make_single_track
from .testing import make_linear_scalar, make_zero
from .traffic import make_traffic

PUBLISHED = "published"
BENCHMARK = "benchmark"
CHOSEN = "implementer-chosen"

ALL_METHODS = (GROWTH_BOUND, MIXED_MONOTONICITY, MONTE_CARLO)
NO_MM = (GROWTH_BOUND, MONTE_CARLO)


@dataclass(frozen=True)
class ParamSpec:
    name: str
    default: object
    kind: type = float
    provenance: str = CHOSEN
    doc: str = ""

    def coerce(self, value):
        if self.kind is int:
            f = float(value)
            if f != int(f):
                raise ModelError(f"parameter {self.name} must be an integer, got {value!r}")
            return int(f)
        return float(value)


@dataclass(frozen=True)
class ModelCatalogEntry:
    name: str
    constructor: Callable[..., SystemModel]
    params: Tuple[ParamSpec, ...]
    dim_formula: str
    methods: Tuple[str, ...]
    summary: str
    operating_box: str = "global: the growth bound holds on all of R^n"
    scale: Optional[Callable[[int], Dict[str, int]]] = None
    # resample(values, old_params, new_params) maps a per-state vector to a resized model
    resample: Optional[Callable[[Sequence[float], dict, dict], Tuple[float, ...]]] = None
    example: str = ""
    library: bool = True
    notes: str = ""

    def defaults(self) -> Dict[str, object]:
        return {p.name: p.default for p in self.params}

    def param(self, name: str) -> ParamSpec:
        for p in self.params:
            if p.name == name:
                return p
        known = ", ".join(p.name for p in self.params) or "none"
        raise ModelError(f"model {self.name!r} has no parameter {name!r} (known: {known})")

    def build(self, **overrides) -> SystemModel:
        kwargs = self.defaults()
        for k, v in overrides.items():
            kwargs[k] = self.param(k).coerce(v)
        return self.constructor(**kwargs)

    def methods_for(self, model: SystemModel) -> Tuple[str, ...]:
        """Methods usable on a constructed instance (some depend on parameters)."""
        out = []
        for m in self.methods:
            if m == GROWTH_BOUND and model.growth_rhs is None:
                continue
            if m == MIXED_MONOTONICITY and model.decomposition is None:
                continue
            out.append(m)
        return tuple(out)


def _cube_side(n: int) -> Dict[str, int]:
    side = round(n ** (1.0 / 3.0))
    return {"l": max(2, side)}


def _resample_grid(values, old: dict, new: dict) -> Tuple[float, ...]:
    """Nearest-neighbor resampling of a per-node vector between cubic grids."""
    lo, ln = int(old.get("l", 8)), int(new.get("l", 8))
    U = np.asarray(values, dtype=float).reshape(lo, lo, lo)
    idx = np.rint(np.arange(ln) * (lo - 1) / max(ln - 1, 1)).astype(int)
    return tuple(U[np.ix_(idx, idx, idx)].ravel().tolist())


def _resample_quads(values, old: dict, new: dict) -> Tuple[float, ...]:
    """Extend or cut per-quadrotor blocks that form an arithmetic progression."""
    ko, kn = int(old.get("K", 4)), int(new.get("K", 4))
    B = np.asarray(values, dtype=float).reshape(ko, 12)
    step = B[1] - B[0] if ko > 1 else np.zeros(12)
    if not np.allclose(B, B[0] + np.arange(ko)[:, None] * step, rtol=0, atol=1e-12):
        raise ModelError("per-quadrotor boxes must be identical or evenly spaced to rescale")
    out = B[0] + np.arange(kn)[:, None] * step
    return tuple(out.ravel().tolist())


def _quads(n: int) -> Dict[str, int]:
    return {"K": max(2, n // 12)}


_QUAD_PARAMS = (
    ParamSpec("K", 4, int, CHOSEN, "number of quadrotors"),
    ParamSpec("F", 1.4 * 9.81, float, CHOSEN, "thrust (default hovers: m g)"),
    ParamSpec("m", 1.4, float, CHOSEN, "mass"),
    ParamSpec("g", 9.81, float, CHOSEN, "gravity"),
    ParamSpec("Jx", 0.054, float, CHOSEN, "roll inertia"),
    ParamSpec("Jy", 0.054, float, CHOSEN, "pitch inertia"),
    ParamSpec("Jz", 0.104, float, CHOSEN, "yaw inertia"),
)

CATALOG: Dict[str, ModelCatalogEntry] = {}


def _register(entry: ModelCatalogEntry) -> None:
    CATALOG[entry.name] = entry


_register(ModelCatalogEntry(
    name="traffic",
    constructor=make_traffic,
    params=(
        ParamSpec("n", 50, int, CHOSEN, "road segments"),
        ParamSpec("v", 0.5, float, CHOSEN, "free-flow speed"),
        ParamSpec("w", 1.0 / 6.0, float, CHOSEN, "congestion wave speed"),
        ParamSpec("c", 40.0, float, CHOSEN, "segment capacity"),
        ParamSpec("xbar", 320.0, float, CHOSEN, "jam density"),
        ParamSpec("T", 30.0, float, CHOSEN, "time scale"),
        ParamSpec("beta", 0.75, float, CHOSEN, "fraction staying on the road"),
    ),
    dim_formula="n",
    methods=ALL_METHODS,
    summary="cell transmission road, inflow to segment 0 is the input",
    scale=lambda n: {"n": n},
    example="traffic.cfg",
    notes="segment 0 receives the exogenous inflow; the last segment drains min(c, v x)",
))

_register(ModelCatalogEntry(
    name="heat3d",
    constructor=make_heat3d,
    params=(
        ParamSpec("l", 8, int, CHOSEN, "grid points per axis"),
        ParamSpec("alpha", 1.0, float, CHOSEN, "diffusivity"),
        ParamSpec("h_exchange", 1.0, float, CHOSEN, "exchange coefficient on the top face"),
    ),
    dim_formula="l^3",
    methods=ALL_METHODS,
    summary="7-point heat stencil, five insulated faces, one exchanging face",
    scale=_cube_side,
    resample=_resample_grid,
    example="heat3d.cfg",
))

_register(ModelCatalogEntry(
    name="quadrotor-swarm",
    constructor=make_quadrotor_swarm,
    params=_QUAD_PARAMS,
    dim_formula="12 K",
    methods=NO_MM,
    summary="K decoupled quadrotors sharing three torque inputs",
    scale=_quads,
    resample=_resample_quads,
    example="quadrotor-swarm.cfg",
))

_register(ModelCatalogEntry(
    name="quadrotor-apf",
    constructor=make_quadrotor_apf,
    params=_QUAD_PARAMS + (
        ParamSpec("F_r", 1.0, float, CHOSEN, "repulsive gain"),
        ParamSpec("F_a", 0.1, float, CHOSEN, "attractive gain"),
    ),
    dim_formula="12 K",
    methods=NO_MM,
    summary="quadrotor swarm with nearest-neighbor potential-field forces (K >= 2)",
    scale=_quads,
    resample=_resample_quads,
    example="quadrotor-apf.cfg",
    notes="growth treats the coupling as dense; the sign jumps of the force are not covered",
))

_register(ModelCatalogEntry(
    name="single-track",
    constructor=make_single_track,
    params=(
        ParamSpec("l_wb", 2.5789, float, PUBLISHED, "wheelbase"),
        ParamSpec("m", 1093.3, float, PUBLISHED, "mass"),
        ParamSpec("mu", 1.0489, float, PUBLISHED, "friction coefficient"),
        ParamSpec("l_f", 1.156, float, PUBLISHED, "front axle to CoG"),
        ParamSpec("l_r", 1.422, float, PUBLISHED, "rear axle to CoG"),
        ParamSpec("h_cg", 0.6137, float, PUBLISHED, "CoG height"),
        ParamSpec("I_z", 1791.6, float, PUBLISHED, "yaw inertia"),
        ParamSpec("C_Sf", 20.89, float, PUBLISHED, "front cornering stiffness"),
        ParamSpec("C_Sr", 20.89, float, PUBLISHED, "rear cornering stiffness"),
        ParamSpec("maneuver", 1, int, CHOSEN, "1: fixed lane-change inputs, 0: free inputs"),
        ParamSpec("amplitude", 0.02, float, CHOSEN, "peak steering rate of the maneuver"),
        ParamSpec("period", 4.0, float, CHOSEN, "maneuver period"),
        ParamSpec("accel", 0.0, float, CHOSEN, "acceleration during the maneuver"),
        ParamSpec("v_min", 15.0, float, CHOSEN, "operating box: speed"),
        ParamSpec("v_max", 25.0, float, CHOSEN, "operating box: speed"),
        ParamSpec("steer_max", 0.1, float, CHOSEN, "operating box: |steering angle|"),
        ParamSpec("yaw_max", 0.5, float, CHOSEN, "operating box: |yaw|"),
        ParamSpec("yaw_rate_max", 1.0, float, CHOSEN, "operating box: |yaw rate|"),
        ParamSpec("slip_max", 0.2, float, CHOSEN, "operating box: |slip angle|"),
    ),
    dim_formula="7",
    methods=NO_MM,
    summary="hybrid kinematic/dynamic vehicle with tire slip, BMW 320i",
    operating_box=("speed in [v_min, v_max] (dynamic regime), |steer| <= steer_max, "
                   "|yaw| <= yaw_max, |yaw rate| <= yaw_rate_max, |slip| <= slip_max; "
                   "growth bound only with maneuver = 1"),
    example="single-track.cfg",
))

_register(ModelCatalogEntry(
    name="vdp",
    constructor=make_vdp,
    params=(
        ParamSpec("mu", 1.0, float, BENCHMARK, "damping"),
        ParamSpec("x_min", 1.2, float, CHOSEN, "operating box"),
        ParamSpec("x_max", 2.4, float, CHOSEN, "operating box"),
        ParamSpec("y_min", -0.6, float, CHOSEN, "operating box"),
        ParamSpec("y_max", 2.5, float, CHOSEN, "operating box"),
    ),
    dim_formula="2",
    methods=NO_MM,
    summary="Van der Pol oscillator",
    operating_box="[x_min, x_max] x [y_min, y_max]",
    example="vdp.cfg",
))

_register(ModelCatalogEntry(
    name="laub-loomis",
    constructor=make_laub_loomis,
    params=(),
    dim_formula="7",
    methods=NO_MM,
    summary="Laub-Loomis enzymatic activity network",
    operating_box="fixed box recorded in boxreach.models.arch.LAUB_LOOMIS_BOX",
    example="laub-loomis.cfg",
))

_register(ModelCatalogEntry(
    name="arch-quadrotor",
    constructor=make_arch_quadrotor,
    params=(),
    dim_formula="12",
    methods=NO_MM,
    summary="closed-loop 12-state quadrotor stabilizing at height 1",
    operating_box="fixed box recorded in boxreach.models.arch.ARCH_QUAD_BOX",
    example="arch-quadrotor.cfg",
))

_register(ModelCatalogEntry(
    name="linear",
    constructor=make_linear_scalar,
    params=(ParamSpec("a", 1.0, float, CHOSEN, "x' = a x + p"),),
    dim_formula="1",
    methods=ALL_METHODS,
    summary="scalar linear test model",
    example="linear.cfg",
    library=False,
))

_register(ModelCatalogEntry(
    name="zero",
    constructor=make_zero,
    params=(
        ParamSpec("n", 1, int, CHOSEN, "states"),
        ParamSpec("inputs", 0, int, CHOSEN, "inputs (ignored by the dynamics)"),
    ),
    dim_formula="n",
    methods=ALL_METHODS,
    summary="x' = 0 test model",
    library=False,
))


def get_entry(name: str) -> ModelCatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(CATALOG))
        raise ModelError(f"unknown model {name!r} (known: {known})") from None


def build_model(name: str, params: Optional[Dict[str, object]] = None) -> SystemModel:
    return get_entry(name).build(**(params or {}))
