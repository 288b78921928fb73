"""Command-line surface: solve, fptas, oracle, tps, gen, verify, campaign.

Exit codes: 0 full success, 2 when the allocator reports failed agents,
1 on errors (unreadable files, malformed JSON, oracle capacity, ...).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .allocator import run_alg
from .fptas import FptasConfig, run_fptas
from .harness import GeneratorSpec, campaign, gen_instance, summarize, verify_allocation
from .model import (
    AllocationError,
    as_thresholds,
    lift_allocation,
    load_allocation,
    load_instance,
    order_instance,
    rational_to_json,
    save_instance,
    to_fraction,
)
from .shares import CapacityError, mms_exact, tps


def _fmt(x: Fraction, approx: bool) -> str:
    return f"{x} (~{float(x):.6g})" if approx else str(x)


def _load_alpha(path, n: int):
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["alpha"]
    return as_thresholds([to_fraction(v) for v in data], n)


def _resolve_alpha(args, inst):
    if args.alpha is not None:
        return _load_alpha(args.alpha, inst.n)
    if args.alpha_mode == "oracle":
        return [mms_exact(row, inst.n)[0] for row in inst.valuations]
    return [tps(row, inst.n) for row in inst.valuations]


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    alpha = _resolve_alpha(args, inst)
    ordered = order_instance(inst)
    outcome = run_alg(ordered, alpha, debug=args.debug)
    lifted = lift_allocation(outcome.allocation, ordered)
    report = verify_allocation(inst, lifted, alpha=alpha)

    if args.json:
        payload = {
            "allocation": lifted.to_json_dict(),
            "failed_agents": sorted(outcome.failed_agents),
            "alpha": [rational_to_json(a) for a in as_thresholds(alpha, inst.n)],
            "report": report.to_json_dict(),
            "trace": outcome.trace,
        }
        print(json.dumps(payload, indent=2))
    else:
        for agent in report.agents:
            ratio = agent.ratio_vs_alpha
            ratio_s = _fmt(ratio, args.float) if ratio is not None else "n/a"
            print(f"agent {agent.agent}: items {list(agent.bundle)} "
                  f"value {_fmt(agent.value, args.float)} ratio {ratio_s}")
        print(f"unallocated: {sorted(lifted.unallocated)}")
        if report.min_ratio is not None:
            print(f"min ratio: {_fmt(report.min_ratio, args.float)}")
        fired = sum(1 for ev in outcome.trace if ev["event"] == "reduction")
        print(f"reductions fired: {fired}")
        if outcome.failed_agents:
            print(f"FAILED agents: {sorted(outcome.failed_agents)}")
        else:
            print("all agents satisfied")
    return 2 if outcome.failed_agents else 0


def _cmd_fptas(args) -> int:
    inst = load_instance(args.instance)
    cfg = FptasConfig(epsilon=to_fraction(args.epsilon))
    result = run_fptas(inst, cfg, debug=args.debug)
    report = verify_allocation(inst, result.allocation, alpha=tuple(result.final_alpha))
    if args.json:
        payload = result.to_json_dict()
        payload["report"] = report.to_json_dict()
        print(json.dumps(payload, indent=2))
    else:
        print(f"iterations: {result.iterations}")
        print(f"final alpha: {[str(a) for a in result.final_alpha]}")
        for agent in report.agents:
            print(f"agent {agent.agent}: items {list(agent.bundle)} "
                  f"value {_fmt(agent.value, args.float)}")
        if report.min_ratio is not None:
            print(f"min ratio vs final alpha: {_fmt(report.min_ratio, args.float)}")
    return 0


def _cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    if not (0 <= args.agent < inst.n):
        raise ValueError(f"agent must be in [0, {inst.n})")
    value, partition = mms_exact(inst.valuations[args.agent], inst.n)
    if args.json:
        print(json.dumps({
            "agent": args.agent,
            "mms": rational_to_json(value),
            "partition": [list(b) for b in partition],
        }))
    else:
        print(f"MMS of agent {args.agent}: {_fmt(value, args.float)}")
        for idx, bundle in enumerate(partition):
            bval = inst.value(args.agent, bundle)
            print(f"  bundle {idx}: {list(bundle)} value {_fmt(bval, args.float)}")
    return 0


def _cmd_tps(args) -> int:
    inst = load_instance(args.instance)
    if not (0 <= args.agent < inst.n):
        raise ValueError(f"agent must be in [0, {inst.n})")
    value = tps(inst.valuations[args.agent], inst.n)
    if args.json:
        print(json.dumps({"agent": args.agent, "tps": rational_to_json(value)}))
    else:
        print(_fmt(value, args.float))
    return 0


def _cmd_gen(args) -> int:
    fields = {
        "family": args.family, "seed": args.seed,
        "low": args.low, "high": args.high, "denominator": args.denominator,
        "high_prob": args.high_prob,
    }
    if args.family == "tightness":
        fields["water_count"] = args.water_count
    else:
        fields.update(n=args.n, m=args.m)
    if args.value is not None:
        fields["value"] = args.value
    spec = GeneratorSpec.from_dict(fields)
    inst = gen_instance(spec)
    if args.out:
        save_instance(inst, args.out)
        print(f"wrote {inst.n}x{inst.m} instance to {args.out}")
    else:
        print(json.dumps(inst.to_json_dict(), indent=2))
    return 0


def _cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    alloc = load_allocation(args.allocation)
    alpha = _load_alpha(args.alpha, inst.n) if args.alpha else None
    report = verify_allocation(inst, alloc, alpha=alpha, with_oracle=args.oracle)
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2))
    else:
        for agent in report.agents:
            parts = [f"agent {agent.agent}: value {_fmt(agent.value, args.float)}"]
            if agent.ratio_vs_alpha is not None:
                parts.append(f"ratio vs alpha {_fmt(agent.ratio_vs_alpha, args.float)}")
            if agent.ratio_vs_mms is not None:
                parts.append(f"ratio vs MMS {_fmt(agent.ratio_vs_mms, args.float)}")
            if agent.census is not None:
                parts.append(f"census {agent.census}")
            print("  ".join(parts))
        if report.min_ratio is not None:
            print(f"min ratio: {_fmt(report.min_ratio, args.float)}")
    return 0


def _seed_list(raw) -> list[int]:
    if isinstance(raw, list):
        return [int(s) for s in raw]
    if isinstance(raw, dict):
        start = int(raw.get("start", 0))
        return list(range(start, start + int(raw["count"])))
    raise ValueError("seeds must be a list or {start, count}")


def _cmd_campaign(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    seeds = _seed_list(config.get("seeds", [0]))
    specs = [
        GeneratorSpec.from_dict({**family, "seed": seed})
        for family in config["families"]
        for seed in seeds
    ]
    rows = campaign(
        specs,
        epsilons=[to_fraction(e) for e in config.get("epsilons", [])],
        alpha_mode=config.get("alpha_mode", "oracle"),
        with_oracle=config.get("with_oracle", True),
        debug=config.get("debug", False),
        workers=args.workers if args.workers else int(config.get("workers", 1)),
        oracle_max_items=config.get("oracle_max_items"),
    )

    from .report import render_figures, write_csv

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(rows, out_dir / config.get("out_csv", "campaign.csv"))
    print(f"wrote {len(rows)} rows to {csv_path}")
    if config.get("figures", True) and not args.no_figures:
        for path in render_figures(rows, out_dir):
            print(f"wrote figure {path}")
    stats = summarize(rows)
    print(f"min ratio overall: {stats['min_ratio']}")
    print(f"total failures: {stats['total_failures']}")
    print(f"total reductions fired: {stats['total_reductions']}")
    print(f"iteration histogram: {stats['iteration_histogram']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmsalloc",
        description="7/9-approximate maximin-share allocations with exact rationals")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, floats=True):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if floats:
            p.add_argument("--float", action="store_true",
                           help="append decimal approximations to rationals")

    p = sub.add_parser("solve", help="run the allocator at fixed thresholds")
    p.add_argument("--instance", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--alpha", help="JSON file with per-agent thresholds")
    group.add_argument("--alpha-mode", choices=("tps", "oracle"), default="tps",
                       help="derive thresholds from TPS (default) or exact MMS")
    p.add_argument("--debug", action="store_true",
                   help="check reduction-bound invariants while running")
    common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("fptas", help="threshold descent to a (7/9 - eps)-MMS allocation")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", required=True, help="accuracy in (0, 1/2], e.g. 1/10")
    p.add_argument("--debug", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_fptas)

    p = sub.add_parser("oracle", help="exact MMS of one agent (brute force)")
    p.add_argument("--instance", required=True)
    p.add_argument("--agent", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("tps", help="truncated proportional share of one agent")
    p.add_argument("--instance", required=True)
    p.add_argument("--agent", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_tps)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--family", required=True,
                   choices=("uniform", "bimodal", "tightness", "identical"))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--low", default="0")
    p.add_argument("--high", default="1")
    p.add_argument("--denominator", type=int, default=90)
    p.add_argument("--high-prob", default="3/10", dest="high_prob")
    p.add_argument("--water-count", type=int, default=4, dest="water_count")
    p.add_argument("--value", default=None, help="constant value for the identical family")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("verify", help="check an allocation against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--alpha", help="JSON file with per-agent thresholds")
    p.add_argument("--oracle", action="store_true",
                   help="also compare against exact MMS (oracle-sized only)")
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("campaign", help="batch run from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".", dest="out_dir")
    p.add_argument("--workers", type=int, default=0,
                   help="parallel instances (default: from the config)")
    p.add_argument("--no-figures", action="store_true", dest="no_figures")
    p.set_defaults(func=_cmd_campaign)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CapacityError, AllocationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
