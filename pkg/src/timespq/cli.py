"""Command-line front end: every experiment is a subcommand emitting CSV/JSON.

Exit codes: 0 success, 2 configuration error, 3 precision exhaustion.
CSV is the stable machine interface (header row, RFC 4180 quoting, floats as
shortest round-trip decimals, exact rationals as ``num/den`` strings); JSON
mirrors the rows and adds metadata sufficient to replay the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from .cantor import cantor_fraction, lipschitz_witness, self_similarity_check
from .kernels import BACKEND
from .measures import build_atomic_measure, generic_point_check, measure_moment
from .mod1 import (Mod1Fixed, Mod1Point, Mod1Rational, OrbitGrid,
                   PrecisionExhausted, check_pq, fixed_bits_budget, mod1,
                   random_point)
from .equidist import weyl_sum_square
from .transfer import (CantorMap, GridFunction, Polynomial,
                       fixpoint_search, integral_identity_check,
                       transfer_residual)

__all__ = ["main", "RunConfig", "Report", "ConfigError", "parse_base"]


class ConfigError(ValueError):
    """Invalid run configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    subcommand: str
    p: int = 2
    q: int = 3
    base: str = "1/5"
    N: int = 64
    K: int = 216
    k_max: int = 4
    depth: int = 12
    iters: int = 50
    tol: Optional[float] = None
    seed: int = 0
    bits: Optional[int] = None
    f0: str = "x2"
    mode: str = "mean"
    out: Optional[str] = None
    format: str = "csv"


@dataclass
class Report:
    metadata: dict
    columns: List[str]
    rows: List[list]
    summary: dict


def parse_base(text: str, bits: Optional[int], p: int, q: int, N: int,
               seed: int = 0) -> Mod1Point:
    """Parse a base point: 'a/b' exact rational, '0x<hex>@<bits>' exact
    fixed-point, a decimal string rounded to a budgeted bit count, or
    'random' for a seeded uniform point at the budgeted bits."""
    text = text.strip()
    budget = bits if bits is not None else fixed_bits_budget(p, q, N - 1, N - 1)
    try:
        if text == "random":
            return random_point(max(budget, 64), seed)
        if "/" in text:
            num, den = text.split("/", 1)
            return mod1(int(num), int(den))
        if text.startswith("0x") and "@" in text:
            mant, width = text[2:].split("@", 1)
            return Mod1Fixed(int(mant, 16), int(width))
        return Mod1Fixed.from_fraction(Fraction(text), budget)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse base point {text!r}: {exc}") from exc


def _canonical_base(point: Mod1Point) -> str:
    return str(point)


def _cell(value) -> object:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return repr(value)
    return value


def _write_report(report: Report, out: Optional[str], fmt: str) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_cell(v) for v in row])
        text = buf.getvalue()
    else:
        payload = {
            "metadata": report.metadata,
            "columns": report.columns,
            "rows": [[_cell(v) for v in row] for row in report.rows],
            "summary": report.summary,
        }
        text = json.dumps(payload, indent=2, default=str) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _metadata(cfg: RunConfig, base_echo: Optional[str], elapsed: float) -> dict:
    meta = asdict(cfg)
    if base_echo is not None:
        meta["base"] = base_echo
    meta["version"] = __version__
    meta["backend"] = BACKEND
    meta["elapsed_s"] = elapsed
    return meta


def _n_ladder(n_max: int) -> List[int]:
    ladder = []
    n = 4
    while n < n_max:
        ladder.append(n)
        n *= 2
    ladder.append(n_max)
    return sorted(set(ladder))


def cmd_weyl(cfg: RunConfig) -> Report:
    check_pq(cfg.p, cfg.q)
    if cfg.k_max < 1 or cfg.N < 1:
        raise ConfigError("k-max and N must be positive")
    base = parse_base(cfg.base, cfg.bits, cfg.p, cfg.q, cfg.N, cfg.seed)
    start = time.perf_counter()
    rows = []
    for N in _n_ladder(cfg.N):
        grid = OrbitGrid(base, cfg.p, cfg.q, N)
        for k in range(1, cfg.k_max + 1):
            w = weyl_sum_square(grid, k)
            rows.append([k, N, w.value.real, w.value.imag, abs(w.value), w.err])
    summary = {"final_N": cfg.N,
               "max_modulus": max(r[4] for r in rows if r[1] == cfg.N)}
    meta = _metadata(cfg, _canonical_base(base), time.perf_counter() - start)
    return Report(meta, ["k", "N", "re", "im", "modulus", "err"], rows, summary)


def cmd_generic(cfg: RunConfig) -> Report:
    check_pq(cfg.p, cfg.q)
    if cfg.k_max < 1 or cfg.N < 1:
        raise ConfigError("k-max and N must be positive")
    base = parse_base(cfg.base, cfg.bits, cfg.p, cfg.q, cfg.N, cfg.seed)
    if not isinstance(base, Mod1Rational):
        raise ConfigError("the genericity check needs a rational base a/b")
    start = time.perf_counter()
    measure = build_atomic_measure(base, cfg.p, cfg.q)
    rows = []
    for N in _n_ladder(cfg.N):
        for k in range(1, cfg.k_max + 1):
            rep = generic_point_check(base, measure, k, N)
            rows.append([N, k, rep.gap])
    targets = {str(k): _cell(measure_moment(measure, k).real)
               for k in range(1, cfg.k_max + 1)}
    summary = {
        "modulus": measure.modulus,
        "support": [str(pt) for pt, _ in measure.atoms()],
        "target_re": targets,
        "final_gaps": {str(row[1]): row[2] for row in rows if row[0] == cfg.N},
    }
    meta = _metadata(cfg, _canonical_base(base), time.perf_counter() - start)
    return Report(meta, ["N", "k", "gap"], rows, summary)


QUAD_LABEL = 3 ** 8 + 1

_F0_CHOICES = {
    "identity": lambda K: GridFunction.identity(K),
    "x2": lambda K: GridFunction.from_evaluable(Polynomial([0, 0, 1]), K),
    "x3": lambda K: GridFunction.from_evaluable(Polynomial([0, 0, 0, 1]), K),
    "cantor": lambda K: GridFunction.from_evaluable(CantorMap(), K),
}


def cmd_fixpoint(cfg: RunConfig) -> Report:
    check_pq(cfg.p, cfg.q)
    if cfg.K % (cfg.p * cfg.q) != 0:
        raise ConfigError(
            f"grid not commensurate: {cfg.p * cfg.q} must divide K={cfg.K}")
    if cfg.f0 not in _F0_CHOICES:
        raise ConfigError(f"unknown start function {cfg.f0!r}")
    if cfg.iters < 0:
        raise ConfigError("iters must be nonnegative")
    start = time.perf_counter()
    f0 = _F0_CHOICES[cfg.f0](cfg.K)
    trace = fixpoint_search(f0, cfg.p, cfg.q, K=cfg.K, iters=cfg.iters,
                            tol=cfg.tol, mode=cfg.mode)
    rows = [[i, trace.residuals[i], trace.distances[i]]
            for i in range(len(trace.residuals))]
    summary = {
        "initial_residual": trace.residuals[0],
        "final_residual": trace.residuals[-1],
        "final_distance_to_identity": trace.distances[-1],
        "max_interp_bound": max(trace.interp_bounds),
        "iterations": trace.iterations,
        "converged": trace.converged,
        "all_feasible": all(trace.feasible),
    }
    meta = _metadata(cfg, None, time.perf_counter() - start)
    return Report(meta, ["iter", "residual", "distance_to_identity"], rows, summary)


def cmd_cantor(cfg: RunConfig) -> Report:
    if cfg.depth < 1 or cfg.K < 1:
        raise ConfigError("depth and K must be positive")
    start = time.perf_counter()
    c = CantorMap()
    rows = []
    residual = transfer_residual(c, [3], cfg.K)
    rows.append(["t3_invariance_max_residual", cfg.K, residual, Fraction(0),
                 residual == 0])
    for N in range(1, cfg.depth + 1):
        wit = lipschitz_witness(N)
        expected = Fraction(1, 2) * Fraction(3, 2) ** N
        rows.append(["lipschitz_quotient", N, wit.quotient, expected,
                     wit.quotient == expected])
    for frac, label in [(Fraction(0), "0"), (Fraction(1, 4), "1/4"),
                        (Fraction(1), "1")]:
        checks = self_similarity_check(frac)
        rows.append(["self_similarity", label, all(checks), True, all(checks)])
    ic = integral_identity_check(c, 3)
    rhs = ic.rhs
    rows.append(["integral_rhs", 3, rhs, Fraction(1, 2),
                 rhs == Fraction(1, 2)])
    rows.append(["integral_quadrature", QUAD_LABEL, ic.lhs, Fraction(1, 2),
                 abs(ic.lhs - 0.5) <= 1e-5])
    summary = {
        "all_pass": all(bool(r[4]) for r in rows),
        "cantor_third": _cell(cantor_fraction(Fraction(1, 3))),
    }
    meta = _metadata(cfg, None, time.perf_counter() - start)
    return Report(meta, ["check", "param", "lhs", "rhs", "pass"], rows, summary)


_COMMANDS = {
    "weyl": cmd_weyl,
    "generic": cmd_generic,
    "fixpoint": cmd_fixpoint,
    "cantor": cmd_cantor,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timespq",
        description="Orbit statistics, invariant measures and operator "
                    "experiments for the two multiplication maps on the circle.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    specs = {
        "weyl": "exponential-sum averages over the N x N orbit block",
        "generic": "orbit averages of a rational point against its atomic measure",
        "fixpoint": "projected fixed-point search for common invariant functions",
        "cantor": "exact Cantor-function property suite",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--p", type=int, default=2)
        p.add_argument("--q", type=int, default=3)
        p.add_argument("--base", type=str, default="1/5",
                       help="a/b exact, 0x<hex>@<bits> exact, decimal, "
                            "or 'random' (seeded)")
        p.add_argument("--N", type=int, default=64)
        p.add_argument("--K", type=int, default=216 if name != "cantor" else 3 ** 7)
        p.add_argument("--k-max", dest="k_max", type=int, default=4)
        p.add_argument("--depth", type=int, default=12 if name != "cantor" else 30)
        p.add_argument("--iters", type=int, default=50)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bits", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "fixpoint":
            p.add_argument("--f0", choices=sorted(_F0_CHOICES), default="x2")
            p.add_argument("--mode", choices=("mean", "alternate"),
                           default="mean")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = RunConfig(
        subcommand=args.subcommand, p=args.p, q=args.q, base=args.base,
        N=args.N, K=args.K, k_max=args.k_max, depth=args.depth,
        iters=args.iters, tol=args.tol, seed=args.seed, bits=args.bits,
        f0=getattr(args, "f0", "x2"), mode=getattr(args, "mode", "mean"),
        out=args.out, format=args.format)
    try:
        report = _COMMANDS[cfg.subcommand](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 3
    _write_report(report, cfg.out, cfg.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
