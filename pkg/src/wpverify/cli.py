"""Command-line front end.

    wpverify list
    wpverify verify qgauss --order 60 --trials 5
    wpverify verify main --pair unit
    wpverify verify-all --format json
    wpverify pairs --nmax 8
    wpverify cross-checks
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .errors import SamplerExhausted, UnknownIdentity
from .report import REJECTED, VerificationReport
from .wpbailey import (
    SINGH,
    TRIVIAL,
    UNIT,
    builtin_pairs,
    construct_andrews_1,
    construct_andrews_2,
    get_pair,
    verify_wp_relation,
)
from . import identities as ids

COMMANDS = ("list", "verify", "verify-all", "pairs", "cross-checks")
CLASSICAL_ORDER = 60
DEFAULT_ORDER = 40

# extra instantiations of the pair-generic identities run by verify-all
EXTRA_INSTANCES = (("main", "trivial"), ("main", "unit"), ("wpbt1", "unit"), ("wpbt2", "unit"))


@dataclass(frozen=True)
class RunConfig:
    command: str
    identity: str | None = None
    pair: str | None = None
    order: int | None = None
    seed: int = 1
    trials: int | None = None
    fmt: str = "text"
    jobs: int = 1
    nmax: int = 8
    constructions: bool = False
    timing: bool = False

    def seeds(self, default_trials: int) -> list[int]:
        n = self.trials if self.trials is not None else default_trials
        return list(range(self.seed, self.seed + n))


# Work items are plain tuples so they pickle across worker processes.
Item = tuple


def _order_for(name: str, config: RunConfig) -> int:
    if config.order is not None:
        return config.order
    return CLASSICAL_ORDER if name in ("qgauss", "qwatson") else DEFAULT_ORDER


def _pair_for(name: str):
    base, _, construction = name.partition("+")
    pair = get_pair(base)
    if construction == "andrews1":
        return construct_andrews_1(pair)
    if construction == "andrews2":
        return construct_andrews_2(pair)
    return pair


def run_item(item: Item) -> VerificationReport:
    kind, name, pair, seed, N, nmax, timing = item
    try:
        if kind == "identity":
            d = ids.get_identity(name, pair)
            report = ids.verify_seeded(d, seed, N, timing=timing)
        elif kind == "pair":
            p = _pair_for(name)
            env = ids.sample_pair_env(p, seed, nmax=nmax, order=N)
            report = verify_wp_relation(p, env, nmax, N, seed=seed)
        elif kind == "cross":
            report = {
                "singh-y1": ids.cross_check_singh_y1,
                "mz1-k": ids.cross_check_mz1_k,
                "main-trivial": ids.cross_check_main_trivial,
            }[name](seed, N)
        else:
            raise ValueError(kind)
    except SamplerExhausted as exc:
        label = name if pair is None else f"{name}[{pair}]"
        report = VerificationReport(label, N, REJECTED, seed=seed, detail=f"SamplerExhausted: {exc}")
    if not timing:
        report.elapsed_ms = None
    return report


def plan(config: RunConfig) -> list[Item]:
    t = config.timing
    if config.command == "verify":
        d = ids.get_identity(config.identity, config.pair)
        N = _order_for(d.name, config)
        return [("identity", d.name, config.pair, s, N, 0, t) for s in config.seeds(3)]
    if config.command == "verify-all":
        items = []
        for d in ids.registry():
            N = _order_for(d.name, config)
            items += [("identity", d.name, None, s, N, 0, t) for s in config.seeds(3)]
        for name, pair in EXTRA_INSTANCES:
            N = _order_for(name, config)
            items += [("identity", name, pair, s, N, 0, t) for s in config.seeds(3)]
        return items
    if config.command == "pairs":
        names = [p.name for p in builtin_pairs()]
        if config.constructions:
            names += [f"{p.name}+{c}" for p in (TRIVIAL, UNIT, SINGH) for c in ("andrews1", "andrews2")]
        N = config.order or DEFAULT_ORDER
        return [("pair", n, None, s, N, config.nmax, t) for n in names for s in config.seeds(1)]
    if config.command == "cross-checks":
        N = config.order or DEFAULT_ORDER
        return [("cross", n, None, s, N, 0, t) for n in ("singh-y1", "mz1-k", "main-trivial") for s in config.seeds(1)]
    raise ValueError(f"no work plan for {config.command!r}")


def execute(items: Sequence[Item], jobs: int) -> list[VerificationReport]:
    if jobs <= 1 or len(items) <= 1:
        reports = [run_item(it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run_item, items, chunksize=1))
    return sorted(reports, key=VerificationReport.sort_key)


def report_dict(r: VerificationReport) -> dict:
    out = {
        "name": r.name,
        "seed": r.seed,
        "order": r.order,
        "outcome": r.outcome,
        "mismatch_index": r.mismatch_index,
        "env": dict(sorted(r.env.items())),
        "elapsed_ms": r.elapsed_ms,
    }
    if r.lhs_coeff is not None:
        out["lhs_coeff"] = r.lhs_coeff
        out["rhs_coeff"] = r.rhs_coeff
    if r.detail:
        out["detail"] = r.detail
    return out


def text_line(r: VerificationReport) -> str:
    status = "PASS" if r.passed else "FAIL"
    line = f"{status} {r.name} seed={r.seed} N={r.order}"
    if r.mismatch_index is not None:
        line += f" [{r.mismatch_index}]"
    elif not r.passed:
        line += f" [{r.outcome}]"
    return line


def emit_report(reports: Sequence[VerificationReport], fmt: str = "text") -> str:
    if fmt == "json":
        if not reports:
            return "[]"
        rows = [json.dumps(report_dict(r), separators=(",", ":")) for r in reports]
        return "[\n" + ",\n".join(rows) + "\n]"
    return "\n".join(text_line(r) for r in reports)


def list_text() -> str:
    lines = []
    for d in ids.registry():
        params = ", ".join(
            f"{p.name}={p.value}" if p.value is not None else (p.name if p.root == 1 else f"{p.name}^(1/{p.root})")
            for p in d.params
        )
        pair = f" pair={d.pair}" if d.pair else ""
        lines.append(f"{d.name:<9} sides={d.n_sides}{pair} params: {params}")
    return "\n".join(lines)


def run(config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if config.command == "list":
        print(list_text(), file=out)
        return 0
    reports = execute(plan(config), config.jobs)
    print(emit_report(reports, config.fmt), file=out)
    return 0 if all(r.passed for r in reports) else 1


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpverify", description="Exact series checks of WP-Bailey identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--order", "-N", type=_positive, default=None, help="truncation order (default 40, 60 for qgauss/qwatson)")
        p.add_argument("--seed", type=int, default=1, help="first seed")
        p.add_argument("--trials", type=_positive, default=None, help="number of seeded environments")
        p.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
        p.add_argument("--jobs", "-j", type=_positive, default=os.cpu_count() or 1, help="worker processes")
        p.add_argument("--timing", action="store_true", help="record wall time (makes json non-reproducible)")

    sub.add_parser("list", help="list registered identities")
    p = sub.add_parser("verify", help="verify one identity")
    p.add_argument("identity")
    p.add_argument("--pair", default=None, help="WP-Bailey pair for wpbt1, wpbt2, main, baileyeq")
    common(p)
    common(sub.add_parser("verify-all", help="verify every registered identity"))
    p = sub.add_parser("pairs", help="check the defining relation of the builtin pairs")
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--constructions", action="store_true", help="also check both constructions on trivial, unit, singh")
    common(p)
    common(sub.add_parser("cross-checks", help="run the specialization checks"))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    kw = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    config = RunConfig(**kw)
    try:
        return run(config)
    except UnknownIdentity as exc:
        parser.error(str(exc.args[0] if exc.args else exc))
    except KeyError as exc:
        parser.error(str(exc.args[0] if exc.args else exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())
