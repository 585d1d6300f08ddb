"""Line-oriented run configuration.

One ``key = value`` per line, ``#`` starts a comment.  Vector values are
comma-separated; a single value is repeated to the model dimension and
``value*count`` repeats a value ``count`` times.  Model parameters use
``param.<name>``.

    model = vdp
    method = growth-bound
    initial.lower = 1.25, 2.35
    initial.upper = 1.55, 2.45
    t1 = 0.4
    h = 0.01
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .intervals import IntervalError, IntervalVector
from .methods import METHODS, MONTE_CARLO, MonteCarloSpec
from .models.catalog import get_entry
from .system import ModelError, ReachProblem, SystemModel

FORMATS = ("json", "csv")
REQUIRED = ("model", "method", "initial.lower", "initial.upper", "t1", "h")
SCALAR_KEYS = ("model", "method", "t0", "t1", "h", "tube_stride", "workers", "epsilon",
               "delta", "seed", "samples", "output", "format")
VECTOR_KEYS = ("initial.lower", "initial.upper", "input.lower", "input.upper")


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is 1-based, or None when not tied to a line."""

    def __init__(self, message: str, line: Optional[int] = None, source: str = "<config>"):
        self.message = message
        self.line = line
        self.source = source
        super().__init__(self.location() + ": " + message)

    def location(self) -> str:
        return f"{self.source}:{self.line}" if self.line is not None else self.source


@dataclass(frozen=True)
class RunConfig:
    model: str
    method: str
    initial_lower: Tuple[float, ...]
    initial_upper: Tuple[float, ...]
    t1: float
    h: float
    params: Dict[str, object] = field(default_factory=dict)
    input_lower: Optional[Tuple[float, ...]] = None
    input_upper: Optional[Tuple[float, ...]] = None
    t0: float = 0.0
    tube_stride: int = 0
    workers: int = 1
    epsilon: float = 0.05
    delta: float = 0.01
    seed: int = 0
    samples: Optional[int] = None
    output: Optional[str] = None
    format: str = "json"

    def build_model(self) -> SystemModel:
        return get_entry(self.model).build(**self.params)

    def resolved_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def problem(self, model: Optional[SystemModel] = None) -> ReachProblem:
        model = model or self.build_model()
        inputs = None
        if self.input_lower is not None:
            inputs = IntervalVector(self.input_lower, self.input_upper)
        return ReachProblem(model, IntervalVector(self.initial_lower, self.initial_upper),
                            inputs, self.t0, self.t1, self.h, self.tube_stride)

    def mc_spec(self) -> MonteCarloSpec:
        return MonteCarloSpec(self.epsilon, self.delta, self.seed, self.samples)

    def output_path(self, config_path: Optional[str] = None) -> str:
        if self.output:
            return self.output
        stem = "reach"
        if config_path:
            stem = os.path.splitext(os.path.basename(config_path))[0]
        return f"{stem}.tube.{self.format}"

    def to_text(self) -> str:
        """Serialize so that ``parse_config(cfg.to_text()) == cfg``."""
        vec = lambda v: ", ".join(repr(float(x)) for x in v)  # noqa: E731
        lines = [f"model = {self.model}"]
        for k in sorted(self.params):
            lines.append(f"param.{k} = {self.params[k]!r}")
        lines += [
            f"method = {self.method}",
            f"initial.lower = {vec(self.initial_lower)}",
            f"initial.upper = {vec(self.initial_upper)}",
        ]
        if self.input_lower is not None:
            lines += [f"input.lower = {vec(self.input_lower)}",
                      f"input.upper = {vec(self.input_upper)}"]
        lines += [
            f"t0 = {self.t0!r}", f"t1 = {self.t1!r}", f"h = {self.h!r}",
            f"tube_stride = {self.tube_stride}", f"workers = {self.workers}",
        ]
        if self.method == MONTE_CARLO:
            lines += [f"epsilon = {self.epsilon!r}", f"delta = {self.delta!r}",
                      f"seed = {self.seed}"]
            if self.samples is not None:
                lines.append(f"samples = {self.samples}")
        if self.output is not None:
            lines.append(f"output = {self.output}")
        lines.append(f"format = {self.format}")
        return "\n".join(lines) + "\n"


def _number(text: str, key: str, line: int, src: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line, src) from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: value must be finite, got {text!r}", line, src)
    return v


def _integer(text: str, key: str, line: int, src: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}", line, src) from None


def _vector(text: str, key: str, line: int, src: str) -> List[float]:
    out: List[float] = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            raise ConfigError(f"{key}: empty entry in vector", line, src)
        if "*" in tok:
            val, _, cnt = tok.partition("*")
            count = _integer(cnt.strip(), key, line, src)
            if count < 1:
                raise ConfigError(f"{key}: repeat count must be positive, got {count}", line, src)
            out += [_number(val.strip(), key, line, src)] * count
        else:
            out.append(_number(tok, key, line, src))
    return out


def _fit(values: List[float], dim: int, key: str, line: int, src: str, what: str):
    if len(values) == 1 and dim > 1:
        return tuple(values * dim)
    if len(values) != dim:
        raise ConfigError(
            f"{key}: dimension mismatch, got {len(values)} entries but the model has "
            f"{dim} {what}", line, src)
    return tuple(values)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate a run configuration."""
    raw: Dict[str, Tuple[str, int]] = {}
    params: Dict[str, Tuple[str, int]] = {}
    for no, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"syntax error, expected 'key = value' but got {line!r}", no, source)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError("syntax error, missing key before '='", no, source)
        if not value:
            raise ConfigError(f"{key}: missing value", no, source)
        if key.startswith("param."):
            name = key[len("param."):]
            if not name:
                raise ConfigError("empty parameter name", no, source)
            target = params
            key = name
        elif key in SCALAR_KEYS or key in VECTOR_KEYS:
            target = raw
        else:
            raise ConfigError(f"unknown key {key!r}", no, source)
        if key in target:
            raise ConfigError(f"duplicate key {key!r} (first set on line {target[key][1]})",
                              no, source)
        target[key] = (value, no)

    eof = len(text.splitlines()) + 1
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}", eof, source)

    def get(key):
        return raw[key] if key in raw else (None, None)

    name, no = raw["model"]
    try:
        entry = get_entry(name)
    except ModelError as exc:
        raise ConfigError(str(exc), no, source) from None

    param_values: Dict[str, object] = {}
    for pname, (pval, pno) in params.items():
        try:
            spec = entry.param(pname)
            param_values[pname] = spec.coerce(_number(pval, "param." + pname, pno, source))
        except ModelError as exc:
            raise ConfigError(str(exc), pno, source) from None
    try:
        model = entry.build(**param_values)
    except (ModelError, ValueError) as exc:
        line = min((p[1] for p in params.values()), default=no)
        raise ConfigError(f"cannot build model {name!r}: {exc}", line, source) from None

    method, mno = raw["method"]
    if method not in METHODS:
        raise ConfigError(f"invalid method {method!r}; expected one of {', '.join(METHODS)}",
                          mno, source)
    usable = entry.methods_for(model)
    if method not in usable:
        raise ConfigError(
            f"method {method!r} is not supported by model {name!r} with these parameters "
            f"(supported: {', '.join(usable)})", mno, source)

    def vec(key, dim, what):
        text_, lno = raw[key]
        return _fit(_vector(text_, key, lno, source), dim, key, lno, source, what)

    init_lo = vec("initial.lower", model.dim, "states")
    init_hi = vec("initial.upper", model.dim, "states")
    try:
        IntervalVector(init_lo, init_hi)
    except IntervalError as exc:
        raise ConfigError(f"initial box: {exc}", raw["initial.upper"][1], source) from None

    in_lo = in_hi = None
    has_in = [k for k in ("input.lower", "input.upper") if k in raw]
    if model.input_dim == 0:
        if has_in:
            raise ConfigError(f"{has_in[0]}: model {name!r} has no inputs", raw[has_in[0]][1],
                              source)
    else:
        if len(has_in) < 2:
            need = [k for k in ("input.lower", "input.upper") if k not in raw]
            raise ConfigError(
                f"missing required key(s): {', '.join(need)} (model {name!r} has "
                f"{model.input_dim} input(s))", eof, source)
        in_lo = vec("input.lower", model.input_dim, "inputs")
        in_hi = vec("input.upper", model.input_dim, "inputs")
        try:
            IntervalVector(in_lo, in_hi)
        except IntervalError as exc:
            raise ConfigError(f"input box: {exc}", raw["input.upper"][1], source) from None

    def num(key, default):
        v, lno = get(key)
        return default if v is None else _number(v, key, lno, source)

    def integer(key, default):
        v, lno = get(key)
        return default if v is None else _integer(v, key, lno, source)

    t0 = num("t0", 0.0)
    t1 = num("t1", None)
    h = num("h", None)
    if not t1 > t0:
        raise ConfigError(f"t1 ({t1!r}) must exceed t0 ({t0!r})", raw["t1"][1], source)
    if not h > 0:
        raise ConfigError(f"h must be positive, got {h!r}", raw["h"][1], source)
    stride = integer("tube_stride", 0)
    if stride < 0:
        raise ConfigError("tube_stride must be nonnegative", get("tube_stride")[1], source)
    workers = integer("workers", 1)
    if workers < 0:
        raise ConfigError("workers must be nonnegative (0 means all)", get("workers")[1], source)

    epsilon = num("epsilon", 0.05)
    delta = num("delta", 0.01)
    seed = integer("seed", 0)
    samples = integer("samples", None) if "samples" in raw else None
    if not 0 < epsilon < 1:
        raise ConfigError(f"epsilon must lie in (0, 1), got {epsilon!r}", get("epsilon")[1], source)
    if not 0 < delta < 1:
        raise ConfigError(f"delta must lie in (0, 1), got {delta!r}", get("delta")[1], source)
    if samples is not None and samples < 1:
        raise ConfigError(f"samples must be positive, got {samples}", get("samples")[1], source)
    if method != MONTE_CARLO:
        for k in ("epsilon", "delta", "seed", "samples"):
            if k in raw:
                raise ConfigError(f"{k} only applies to {MONTE_CARLO}", raw[k][1], source)

    fmt = get("format")[0] or "json"
    if fmt not in FORMATS:
        raise ConfigError(f"invalid format {fmt!r}; expected one of {', '.join(FORMATS)}",
                          get("format")[1], source)

    return RunConfig(
        model=name, method=method, initial_lower=init_lo, initial_upper=init_hi,
        t1=t1, h=h, params=param_values, input_lower=in_lo, input_upper=in_hi, t0=t0,
        tube_stride=stride, workers=workers, epsilon=epsilon, delta=delta, seed=seed,
        samples=samples, output=get("output")[0], format=fmt)


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=path)
