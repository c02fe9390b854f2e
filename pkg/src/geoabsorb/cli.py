"""Command-line front end.

Usage::

    geoabsorb solve1d --p 0.7 --alpha 0.8 --range -5 5 --format csv
    geoabsorb solvend --dim 2 --alpha 0.2 --window 3
    geoabsorb twolevel --alpha 0.2 --range -3 3 --format json
    geoabsorb mc --model 1d --p 0.7 --alpha 0.8 --walks 100000 --seed 1 --window 5
    geoabsorb truncate --model twolevel --alpha 0.2 --radius 30 --tol 1e-12
    geoabsorb validate --model nd --dim 3 --alpha 0.1 --profile quick

Tables go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from . import __version__
from .closed_form import (
    absorption_prob_1d,
    expected_visits_1d,
    expected_visits_two_level,
)
from .errors import DomainError, GeoAbsorbError
from .models import (
    LatticeState,
    Model,
    TwoLevelModel,
    WalkNDModel,
    make_two_level,
    make_walk_1d,
    make_walk_nd,
    survival_factor,
)
from .oracles import run_walks, truncated_fixed_point, window_states
from .quadrature import QuadratureConfig, default_config, expected_visits_nd_many, min_nodes

__all__ = ["OutputRecord", "run", "main", "to_csv", "to_json", "COLUMNS"]

COLUMNS = [
    "model",
    "params",
    "state",
    "level",
    "expected_visits",
    "absorption_prob",
    "method",
    "error_bar",
]
METHODS = ("closed_form", "quadrature", "monte_carlo", "truncated")


@dataclass(frozen=True)
class OutputRecord:
    model: str
    params: dict
    state: tuple[int, ...]
    level: int | None
    expected_visits: float
    absorption_prob: float
    method: str
    error_bar: float | None = None

    def csv_row(self) -> list[str]:
        return [
            self.model,
            ";".join(f"{k}={v!r}" for k, v in self.params.items()),
            ",".join(str(c) for c in self.state),
            "" if self.level is None else str(self.level),
            _fmt(self.expected_visits),
            _fmt(self.absorption_prob),
            self.method,
            "" if self.error_bar is None else _fmt(self.error_bar),
        ]

    def json_obj(self) -> dict:
        return {
            "model": self.model,
            "params": self.params,
            "state": list(self.state),
            "level": self.level,
            "expected_visits": self.expected_visits,
            "absorption_prob": self.absorption_prob,
            "method": self.method,
            "error_bar": self.error_bar,
        }


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def _record(model: Model, state: LatticeState, visits: float, method: str, error_bar=None, absorption=None):
    if absorption is None:
        absorption = (1.0 - survival_factor(model)) * visits
    return OutputRecord(
        model=model.kind,
        params=dict(model.params),
        state=state.coords,
        level=state.level,
        expected_visits=float(visits),
        absorption_prob=float(absorption),
        method=method,
        error_bar=None if error_bar is None else float(error_bar),
    )


def to_csv(records: Sequence[OutputRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def to_json(records: Sequence[OutputRecord], meta: dict) -> str:
    return json.dumps({"meta": meta, "records": [r.json_obj() for r in records]}, indent=2) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def _range(args) -> range:
    lo, hi = args.range
    if lo > hi:
        raise DomainError(f"--range LO HI needs LO <= HI, got {lo} {hi}")
    return range(lo, hi + 1)


def _cmd_solve1d(args) -> list[OutputRecord]:
    model = make_walk_1d(args.p, args.alpha)
    return [
        _record(
            model,
            LatticeState((n,)),
            expected_visits_1d(model, n),
            "closed_form",
            absorption=absorption_prob_1d(model, n),
        )
        for n in _range(args)
    ]


def _cmd_twolevel(args) -> list[OutputRecord]:
    model = make_two_level(args.alpha)
    return [
        _record(model, LatticeState((n,), lvl), expected_visits_two_level(model, lvl, n), "closed_form")
        for lvl in (0, 1)
        for n in _range(args)
    ]


def _parse_point(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError as exc:
        raise DomainError(f"--at expects comma-separated integers, got {text!r}") from exc


def _cmd_solvend(args) -> list[OutputRecord]:
    model = make_walk_nd(args.dim, args.alpha)
    if args.at is not None:
        states = [LatticeState(_parse_point(args.at))]
    else:
        states = window_states(model, args.window)
    if args.nodes is not None:
        config = QuadratureConfig(args.nodes)
    else:
        need = max(min_nodes(s.coords) for s in states)
        config = QuadratureConfig(max(default_config(model.n).nodes_per_axis, need))
    values = expected_visits_nd_many(model, states, config)
    return [_record(model, s, v, "quadrature") for s, v in zip(states, values)]


def _model_from_args(args) -> Model:
    if args.model == "1d":
        if args.p is None:
            raise DomainError("--model 1d requires --p")
        return make_walk_1d(args.p, args.alpha)
    if args.model == "nd":
        if args.dim is None:
            raise DomainError("--model nd requires --dim")
        return make_walk_nd(args.dim, args.alpha)
    return make_two_level(args.alpha)


def _cmd_mc(args) -> list[OutputRecord]:
    model = _model_from_args(args)
    if args.walks < 1:
        raise DomainError(f"--walks must be >= 1, got {args.walks}")
    if args.window < 0:
        raise DomainError(f"--window must be >= 0, got {args.window}")
    d = model.n if isinstance(model, WalkNDModel) else 1
    lo, hi = [-args.window] * d, [args.window] * d
    if isinstance(model, TwoLevelModel):
        lo, hi = lo + [0], hi + [1]
    stats = run_walks(model, args.walks, args.seed, lo, hi, workers=args.workers)
    by_state = {s: (v, a) for s, v, a in zip(stats.states, stats.visits, stats.absorption)}
    out = []
    for s in window_states(model, args.window):
        v, a = by_state[s]
        out.append(_record(model, s, v.mean, "monte_carlo", error_bar=v.std_error, absorption=a.mean))
    return out


def _cmd_truncate(args) -> list[OutputRecord]:
    model = _model_from_args(args)
    sol = truncated_fixed_point(model, args.radius, args.tol, args.max_iter)
    return [
        _record(model, s, sol[s], "truncated", error_bar=sol.final_residual)
        for s in window_states(model, args.radius)
    ]


def _cmd_validate(args, stdout) -> int:
    from .validation import validate_model

    model = _model_from_args(args)
    checks = validate_model(model, profile=args.profile, seed=args.seed)
    for c in checks:
        print(c.line(), file=stdout)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed", file=sys.stderr)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _add_format(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_model_flags(p):
    p.add_argument("--model", choices=("1d", "nd", "twolevel"), required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--alpha", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="geoabsorb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve1d", help="closed-form table for the 1-D walk")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--range", type=int, nargs=2, metavar=("LO", "HI"), required=True)
    _add_format(p)

    p = sub.add_parser("solvend", help="quadrature values for the n-dimensional walk")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--at", metavar="c1,...,cN")
    where.add_argument("--window", type=int, metavar="R")
    p.add_argument("--nodes", type=int, metavar="K")
    _add_format(p)

    p = sub.add_parser("twolevel", help="closed-form table for the two-level walk")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--range", type=int, nargs=2, metavar=("LO", "HI"), required=True)
    _add_format(p)

    p = sub.add_parser("mc", help="Monte Carlo visit and absorption estimates")
    _add_model_flags(p)
    p.add_argument("--walks", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--window", type=int, required=True, metavar="R")
    p.add_argument("--workers", type=int, default=1)
    _add_format(p)

    p = sub.add_parser("truncate", help="truncated-lattice fixed-point solution")
    _add_model_flags(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--max-iter", type=int, default=100_000)
    _add_format(p)

    p = sub.add_parser("validate", help="oracle and invariant checks for one parameter point")
    _add_model_flags(p)
    p.add_argument("--profile", choices=("quick", "full"), default="quick")
    p.add_argument("--seed", type=int, default=20240601)
    return parser


_TABLES: dict[str, Callable] = {
    "solve1d": _cmd_solve1d,
    "solvend": _cmd_solvend,
    "twolevel": _cmd_twolevel,
    "mc": _cmd_mc,
    "truncate": _cmd_truncate,
}


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    """Run the CLI; returns 0 on success, 1 on computation errors, 2 on bad usage."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = sys.stdout if stdout is None else stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "validate":
            return _cmd_validate(args, stdout)
        records = _TABLES[args.command](args)
    except GeoAbsorbError as exc:
        print(f"geoabsorb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        meta = {
            "invocation": ["geoabsorb", *argv],
            "command": args.command,
            "seed": getattr(args, "seed", None),
            "version": __version__,
        }
        stdout.write(to_json(records, meta))
    else:
        stdout.write(to_csv(records))
    return 0


def main() -> None:
    sys.exit(run())


def read_csv(text: str) -> list[dict]:
    """Parse CSV emitted by :func:`to_csv` back into JSON-shaped records."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        params = {}
        for item in filter(None, row["params"].split(";")):
            key, val = item.split("=")
            params[key] = int(val) if key == "dim" else float(val)
        out.append(
            {
                "model": row["model"],
                "params": params,
                "state": [int(c) for c in row["state"].split(",")],
                "level": int(row["level"]) if row["level"] else None,
                "expected_visits": float(row["expected_visits"]),
                "absorption_prob": float(row["absorption_prob"]),
                "method": row["method"],
                "error_bar": float(row["error_bar"]) if row["error_bar"] else None,
            }
        )
    return out

