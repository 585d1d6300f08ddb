"""Command-line front end: ``run``, ``bench`` and ``list-models``.

Every failure prints exactly one line to stderr of the form

    error[<kind>] <location>: <message>

and exits nonzero (2 for usage and configuration errors, 3 for failures
while computing, 4 for file errors).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import List, Optional

from .bench import bench, rows_to_csv
from .config import ConfigError, load_config
from .intervals import IntervalError
from .methods import ReachError, run_method
from .models.catalog import CATALOG
from .rk4 import IntegrationError
from .system import ModelError

EXIT_USAGE = 2
EXIT_RUN = 3
EXIT_IO = 4


class CliError(Exception):
    def __init__(self, kind: str, location: str, message: str, code: int):
        super().__init__(message)
        self.kind, self.location, self.message, self.code = kind, location, message, code

    def line(self) -> str:
        msg = " ".join(self.message.split())
        return f"error[{self.kind}] {self.location}: {msg}"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", self.prog, message, EXIT_USAGE)


def _int_list(text: str) -> List[int]:
    try:
        vals = [int(float(t)) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _load(path: str):
    try:
        return load_config(path)
    except ConfigError as exc:
        raise CliError("config", exc.location(), exc.message, EXIT_USAGE) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError("io", path, str(exc), EXIT_IO) from None


def _write(path: str, text: str) -> None:
    try:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError("io", path, str(exc), EXIT_IO) from None


def report_path(tube_path: str) -> str:
    root, _ = os.path.splitext(tube_path)
    if root.endswith(".tube"):
        root = root[:-len(".tube")]
    return root + ".report.json"


def cmd_run(args) -> int:
    cfg = _load(args.config)
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    workers = cfg.resolved_workers()
    where = f"model={cfg.model} method={cfg.method}"
    phase = "setup"
    try:
        model = cfg.build_model()
        problem = cfg.problem(model)
        phase = "integration"
        tube = run_method(cfg.method, problem, workers, cfg.mc_spec())
    except (ReachError, IntegrationError, ModelError, IntervalError, ValueError) as exc:
        raise CliError("run", f"{where} phase={phase}", str(exc), EXIT_RUN) from None
    except MemoryError:
        raise CliError("run", f"{where} phase={phase}", "out of memory", EXIT_RUN) from None

    out = args.output or cfg.output_path(args.config)
    _write(out, tube.to_json() if cfg.format == "json" else tube.to_csv())
    rep = dict(tube.report.to_dict(), model=cfg.model, params=cfg.params,
               config=os.path.abspath(args.config), tube=os.path.abspath(out))
    rpath = report_path(out)
    _write(rpath, json.dumps(rep, indent=2) + "\n")
    final = tube.final
    print(f"{cfg.model} {cfg.method}: n={tube.report.n} steps={tube.report.steps} "
          f"workers={workers} total={tube.report.total_s:.3f}s")
    if final.dim <= 12:
        for i, (lo, hi) in enumerate(zip(final.lower, final.upper)):
            print(f"  x{i}: [{lo!r}, {hi!r}]")
    print(f"tube: {out}")
    print(f"report: {rpath}")
    return 0


def cmd_bench(args) -> int:
    cfg = _load(args.config)
    log = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    try:
        rows = bench(cfg, args.dims, args.workers, args.reps, steps=args.steps, log=log)
    except ConfigError as exc:
        raise CliError("config", args.config, exc.message, EXIT_USAGE) from None
    except (ModelError, ValueError) as exc:
        raise CliError("run", f"model={cfg.model} method={cfg.method} phase=bench", str(exc),
                       EXIT_RUN) from None
    text = rows_to_csv(rows)
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_list_models(args) -> int:
    for name, e in CATALOG.items():
        if not e.library and not args.all:
            continue
        tag = "" if e.library else "  (test model)"
        print(f"{name}{tag}")
        print(f"  {e.summary}")
        print(f"  dimension: {e.dim_formula}")
        print(f"  methods: {', '.join(e.methods)}")
        print(f"  operating box: {e.operating_box}")
        if e.params:
            print("  parameters:")
            for p in e.params:
                print(f"    {p.name} = {p.default!r}  [{p.provenance}]  {p.doc}")
        if e.notes:
            print(f"  notes: {e.notes}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="boxreach", description="Interval reachability for nonlinear ODEs.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    r = sub.add_parser("run", help="compute a reach tube from a config file")
    r.add_argument("config")
    r.add_argument("--output", help="tube file (overrides the config's output key)")
    r.add_argument("--workers", type=int, help="worker count (0 = all cores)")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="time a config over dimensions and worker counts")
    b.add_argument("config")
    b.add_argument("--dims", type=_int_list, required=True, help="e.g. 10000,100000")
    b.add_argument("--workers", type=_int_list, default=[1], help="e.g. 1,4 (0 = all cores)")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--steps", type=int, help="override the horizon to this many steps")
    b.add_argument("--output", help="CSV file (default: stdout)")
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)

    lm = sub.add_parser("list-models", help="describe the model catalog")
    lm.add_argument("--all", action="store_true", help="include test models")
    lm.set_defaults(func=cmd_list_models)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "reps", 1) < 1:
            raise CliError("usage", "boxreach bench", "--reps must be positive", EXIT_USAGE)
        return args.func(args)
    except CliError as exc:
        print(exc.line(), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
