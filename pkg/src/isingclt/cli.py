"""Command-line entry point: ``isingclt {vn,series,simulate,gibbs-exact,verify}``.

Results go to stdout as a human table, or as one JSON document with
``--json``. Progress and log messages go to stderr. Any option may also be
given in a ``--config`` file of ``key = value`` lines; flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .cumulants import OrderCapExceeded
from .families import EnumerationCapExceeded
from .gibbs import (MAX_EXACT_SITES, GibbsSpec, chain_semi_invariant, exact_semi_invariant,
                    run_block_experiment)
from .lattice import full_blocks
from .series import _frac_str, coefficient_Vn, semi_invariant_series, variance_series
from .verify import SUITES, run_suite

log = logging.getLogger("isingclt")


# -- value parsers -----------------------------------------------------------

def _int(text: str) -> int:
    return int(str(text).strip())


def _pos_int(text: str) -> int:
    v = _int(text)
    if v < 1:
        raise ValueError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    v = _int(text)
    if v < 0:
        raise ValueError(f"expected a non-negative integer, got {v}")
    return v


def _finite(text: str) -> float:
    v = float(str(text).strip())
    if not math.isfinite(v):
        raise ValueError(f"expected a finite number, got {text!r}")
    return v


def _int_list(text: str) -> list[int]:
    vals = [_pos_int(t) for t in str(text).split(",") if t.strip()]
    if not vals:
        raise ValueError("expected a comma-separated list of integers")
    return vals


def parse_points(text: str) -> list[tuple[int, ...]]:
    """``"0;1"`` -> [(0,), (1,)], ``"0,0;1,0"`` -> [(0, 0), (1, 0)]."""
    pts = [tuple(int(c) for c in chunk.split(",")) for chunk in str(text).split(";") if chunk.strip()]
    if not pts:
        raise ValueError("expected points separated by ';'")
    if len({len(p) for p in pts}) != 1:
        raise ValueError("points have mixed dimensions")
    return pts


def _wrap(fn: Callable[[str], Any]) -> Callable[[str], Any]:
    """Turn ValueError into argparse's usage error."""

    def conv(text):
        try:
            return fn(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    conv.__name__ = fn.__name__.strip("_")
    return conv


# -- options -----------------------------------------------------------------

@dataclass(frozen=True)
class Opt:
    name: str
    conv: Callable[[str], Any]
    default: Any = None
    required: bool = False
    help: str = ""

    @property
    def flag(self) -> str:
        return "--" + ("lambda" if self.name == "lam" else self.name.replace("_", "-"))


NU = Opt("nu", _pos_int, 1, help="lattice dimension")
LAM = Opt("lam", _finite, None, True, "coupling lambda")
N_MAX = Opt("n_max", _nonneg_int, 4, help="series truncation order")

COMMAND_OPTS: dict[str, list[Opt]] = {
    "vn": [NU, Opt("n_max", _pos_int, 4, help="largest n")],
    "series": [NU, LAM, N_MAX,
               Opt("b", parse_points, None, help="points 't1;t2;...' (default: block variance)")],
    "simulate": [
        NU, LAM,
        Opt("N", _pos_int, None, True, "cube half-width"),
        Opt("k", _int_list, None, True, "block sides, comma separated"),
        Opt("alpha", _finite, None, help="block scaling exponent (default nu)"),
        Opt("seed", _nonneg_int, 0),
        Opt("sweeps", _pos_int, None, True),
        Opt("burn_in", _nonneg_int, 0),
        Opt("thin", _pos_int, 1),
        Opt("bins", _pos_int, 50, help="jackknife bins"),
        Opt("max_order", _pos_int, 4, help="highest cumulant order"),
        Opt("observables", str, "0", help="block labels written to --out, 't1;t2;...'"),
        Opt("out", str, None, help="CSV file for per-emission samples"),
    ],
    "gibbs-exact": [NU, LAM, Opt("N", _pos_int, None, True, "cube half-width"),
                    Opt("b", parse_points, None, True, "points 't1;t2;...'")],
    "verify": [],
}


class ConfigError(ValueError):
    pass


def read_config(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; dashes in keys become
    underscores and ``lambda`` becomes ``lam``."""
    out = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "lambda":
            key = "lam"
        out[key] = value
    return out


def _resolve(cmd: str, args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill unset options from the config file, then defaults; check required."""
    opts = {o.name: o for o in COMMAND_OPTS[cmd]}
    if args.config:
        try:
            cfg = read_config(args.config)
        except (OSError, ConfigError) as exc:
            parser.error(str(exc))
        for key, value in cfg.items():
            if key not in opts:
                parser.error(f"unknown config key {key!r} for {cmd}")
            if getattr(args, key) is None:
                try:
                    setattr(args, key, opts[key].conv(value))
                except ValueError as exc:
                    parser.error(f"config key {key}: {exc}")
    for o in opts.values():
        if getattr(args, o.name) is None:
            if o.required:
                parser.error(f"{o.flag} is required (flag or config key)")
            setattr(args, o.name, o.default)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")
    common.add_argument("--config", help="key = value file; flags take precedence")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="isingclt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "vn": "exact block-variance coefficients V_n",
        "series": "truncated lambda-series with tail estimates",
        "simulate": "Metropolis block-spin cumulants",
        "gibbs-exact": "exact finite-volume semi-invariant",
        "verify": "run a property suite",
    }
    for cmd, opts in COMMAND_OPTS.items():
        p = sub.add_parser(cmd, parents=[common], help=helps[cmd])
        for o in opts:
            # defaults are applied after the config file is merged
            p.add_argument(o.flag, dest=o.name, type=_wrap(o.conv), default=None, help=o.help)
        if cmd == "verify":
            p.add_argument("suite", choices=SUITES)
    return parser


# -- commands ----------------------------------------------------------------

def _num(x: float):
    """JSON-safe float: infinities become null."""
    return x if math.isfinite(x) else None


def cmd_vn(args) -> tuple[dict, str]:
    rows = []
    for n in range(1, args.n_max + 1):
        log.info("V_%d", n)
        v = coefficient_Vn(args.nu, n)
        rows.append({"n": n, "value": _frac_str(v), "float": float(v)})
    doc = {"command": "vn", "nu": args.nu, "rows": rows}
    lines = [f"{'n':>3}  {'V_n':>20}  {'float':>14}"]
    lines += [f"{r['n']:>3}  {r['value']:>20}  {r['float']:>14.10g}" for r in rows]
    return doc, "\n".join(lines)


def cmd_series(args) -> tuple[dict, str]:
    if args.b is None:
        res = variance_series(args.nu, args.lam, args.n_max)
        kind = "variance"
    else:
        if len(args.b[0]) != args.nu:
            raise ValueError(f"points of b have dimension {len(args.b[0])}, expected nu={args.nu}")
        res = semi_invariant_series(args.b, args.lam, args.n_max)
        kind = "semi_invariant"
    doc = {
        "command": "series", "kind": kind, "nu": args.nu, "lambda": args.lam,
        "n_max": args.n_max, "b": None if args.b is None else [list(p) for p in args.b],
        "terms": res.as_records(), "partial_sum": res.partial_sum,
        "rigorous_tail": _num(res.rigorous_tail), "empirical_tail": _num(res.empirical_tail),
    }
    lines = [f"{'n':>3}  {'coefficient':>24}  {'term':>14}"]
    lines += [f"{r['n']:>3}  {r['coefficient']:>24}  {r['term']:>14.8g}" for r in doc["terms"]]
    lines.append(f"partial sum     {res.partial_sum:.12g}")
    lines.append(f"rigorous tail   {res.rigorous_tail:.3g}")
    lines.append(f"empirical tail  {res.empirical_tail:.3g}")
    return doc, "\n".join(lines)


def _csv_sink(path: str, spec: GibbsSpec, ks: list[int], labels: list[tuple[int, ...]]):
    """Open ``path`` and return (sink, close) writing one row per emission."""
    cube = spec.cube
    cols = []
    for k in ks:
        blocks = full_blocks(cube, k)
        first = blocks[0][0]
        for tau in labels:
            if len(tau) != spec.nu or tuple(tau) not in set(blocks):
                raise ValueError(f"block {tau} is not a full block of side {k}")
            name = "Y_k{}_t{}".format(k, "_".join(str(c) for c in tau))
            cols.append((k, tuple(c - first for c in tau), name))
    fh = open(path, "w", newline="")
    writer = csv.writer(fh)
    writer.writerow(["sweep"] + [c[2] for c in cols])

    def sink(sweep, per_k):
        writer.writerow([sweep] + [repr(float(per_k[k][idx])) for k, idx, _ in cols])

    return sink, fh.close


def cmd_simulate(args) -> tuple[dict, str]:
    alpha = float(args.nu) if args.alpha is None else args.alpha
    spec = GibbsSpec(args.nu, args.N, args.lam)
    sink, close = None, None
    if args.out:
        sink, close = _csv_sink(args.out, spec, args.k, parse_points(args.observables))
    try:
        res = run_block_experiment(spec, args.k, alpha, args.seed, args.sweeps, args.burn_in,
                                   args.thin, max_order=args.max_order, n_bins=args.bins,
                                   sample_sink=sink)
    finally:
        if close is not None:
            close()

    def est(e):
        return {"order": e.order, "value": e.value, "std_error": e.std_error, "n_samples": e.n_samples}

    results = []
    for k in args.k:
        s = res[k]
        results.append({
            "k": k, "n_blocks": s.n_blocks, "n_emissions": s.n_emissions,
            "cumulants": [est(c) for c in s.cumulants],
            "adjacent_cov": None if s.adjacent_cov is None else est(s.adjacent_cov),
        })
    doc = {
        "command": "simulate",
        "params": {"nu": args.nu, "N": args.N, "lambda": args.lam, "k": args.k, "alpha": alpha,
                   "seed": args.seed, "sweeps": args.sweeps, "burn_in": args.burn_in,
                   "thin": args.thin, "bins": args.bins},
        "results": results,
    }
    lines = [f"{'k':>5}  {'order':>5}  {'estimate':>12}  {'std err':>10}  {'samples':>9}"]
    for r in results:
        for c in r["cumulants"]:
            lines.append(f"{r['k']:>5}  {c['order']:>5}  {c['value']:>12.6f}  "
                         f"{c['std_error']:>10.6f}  {c['n_samples']:>9}")
        a = r["adjacent_cov"]
        if a is not None:
            lines.append(f"{r['k']:>5}  {'adj':>5}  {a['value']:>12.6f}  "
                         f"{a['std_error']:>10.6f}  {a['n_samples']:>9}")
    return doc, "\n".join(lines)


def cmd_gibbs_exact(args) -> tuple[dict, str]:
    if len(args.b[0]) != args.nu:
        raise ValueError(f"points of b have dimension {len(args.b[0])}, expected nu={args.nu}")
    spec = GibbsSpec(args.nu, args.N, args.lam)
    if spec.cube.size <= MAX_EXACT_SITES:
        method = "enumeration"
        value = exact_semi_invariant(spec, args.b)
    elif args.nu == 1:
        method = "transfer_matrix"
        if any(abs(p[0]) > args.N for p in args.b):
            raise ValueError("points of b lie outside the cube")
        value = chain_semi_invariant(args.lam, args.N, args.b)
    else:
        raise ValueError(f"cube has {spec.cube.size} sites; exact enumeration is limited to "
                         f"{MAX_EXACT_SITES} and the transfer matrix needs nu=1")
    doc = {"command": "gibbs-exact", "nu": args.nu, "N": args.N, "lambda": args.lam,
           "b": [list(p) for p in args.b], "method": method, "semi_invariant": value}
    return doc, f"semi-invariant  {value:.15g}  ({method}, N={args.N})"


def cmd_verify(args) -> tuple[dict, str]:
    checks = run_suite(args.suite)
    passed = all(c.passed for c in checks)
    doc = {"command": "verify", "suite": args.suite, "passed": passed,
           "checks": [{"name": c.name, "passed": bool(c.passed), "detail": c.detail} for c in checks]}
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}".rstrip() for c in checks]
    lines.append(f"suite {args.suite}: {'PASS' if passed else 'FAIL'}")
    return doc, "\n".join(lines)


COMMANDS = {"vn": cmd_vn, "series": cmd_series, "simulate": cmd_simulate,
            "gibbs-exact": cmd_gibbs_exact, "verify": cmd_verify}


# -- JSON schemas (draft 2020-12) --------------------------------------------

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}
_FRAC = {"type": "string", "pattern": r"^-?\d+/\d+$"}
_POINTS = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}
_EST = {"type": "object", "required": ["order", "value", "std_error", "n_samples"],
        "properties": {"order": {"type": "integer"}, "value": _NUM, "std_error": _NUM,
                       "n_samples": {"type": "integer"}}}

SCHEMAS: dict[str, dict] = {
    "vn": {
        "type": "object", "required": ["command", "nu", "rows"],
        "properties": {
            "command": {"const": "vn"}, "nu": {"type": "integer"},
            "rows": {"type": "array", "items": {
                "type": "object", "required": ["n", "value", "float"],
                "properties": {"n": {"type": "integer"}, "value": _FRAC, "float": _NUM}}},
        },
    },
    "series": {
        "type": "object",
        "required": ["command", "kind", "nu", "lambda", "n_max", "b", "terms", "partial_sum",
                     "rigorous_tail", "empirical_tail"],
        "properties": {
            "command": {"const": "series"}, "kind": {"enum": ["variance", "semi_invariant"]},
            "nu": {"type": "integer"}, "lambda": _NUM, "n_max": {"type": "integer"},
            "b": {"anyOf": [{"type": "null"}, _POINTS]},
            "terms": {"type": "array", "items": {
                "type": "object", "required": ["n", "coefficient", "term"],
                "properties": {"n": {"type": "integer"}, "coefficient": _FRAC, "term": _NUM}}},
            "partial_sum": _NUM, "rigorous_tail": _NUM_OR_NULL, "empirical_tail": _NUM_OR_NULL,
        },
    },
    "simulate": {
        "type": "object", "required": ["command", "params", "results"],
        "properties": {
            "command": {"const": "simulate"}, "params": {"type": "object"},
            "results": {"type": "array", "items": {
                "type": "object",
                "required": ["k", "n_blocks", "n_emissions", "cumulants", "adjacent_cov"],
                "properties": {
                    "k": {"type": "integer"}, "n_blocks": {"type": "integer"},
                    "n_emissions": {"type": "integer"},
                    "cumulants": {"type": "array", "items": _EST},
                    "adjacent_cov": {"anyOf": [{"type": "null"}, _EST]}}}},
        },
    },
    "gibbs-exact": {
        "type": "object",
        "required": ["command", "nu", "N", "lambda", "b", "method", "semi_invariant"],
        "properties": {
            "command": {"const": "gibbs-exact"}, "nu": {"type": "integer"},
            "N": {"type": "integer"}, "lambda": _NUM, "b": _POINTS,
            "method": {"enum": ["enumeration", "transfer_matrix"]}, "semi_invariant": _NUM},
    },
    "verify": {
        "type": "object", "required": ["command", "suite", "passed", "checks"],
        "properties": {
            "command": {"const": "verify"}, "suite": {"enum": list(SUITES)},
            "passed": {"type": "boolean"},
            "checks": {"type": "array", "items": {
                "type": "object", "required": ["name", "passed", "detail"],
                "properties": {"name": {"type": "string"}, "passed": {"type": "boolean"},
                               "detail": {"type": "string"}}}},
        },
    },
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    _resolve(args.command, args, parser)
    try:
        doc, text = COMMANDS[args.command](args)
    except (OrderCapExceeded, EnumerationCapExceeded, ValueError, OverflowError, OSError) as exc:
        print(f"isingclt {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(doc, indent=2, allow_nan=False))
    else:
        print(text)
    if args.command == "verify" and not doc["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
