"""Command-line entry point: ``busbalance {gen,solve,export-mip,oracle,bench}``.

Exit codes: 0 success, 2 bad input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .balancing import rebalance
from .blocking import block
from .errors import InputError
from .instances import (
    PRESETS,
    generate,
    load_instance,
    params_to_dict,
    preset,
    save_instance,
    save_schedule,
)
from .kpi import compare, kpi, render_table
from .mip import build_mip, estimate_size, exact_solve_small, export_lp
from .model import CostModel, minutes, total_excess, validate_schedule

log = logging.getLogger("busbalance")

EXIT_INPUT = 2
EXIT_BUG = 3


class InvariantError(RuntimeError):
    pass


def _positive_int(text):
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return val


def _overrides(inst, args):
    changes = {}
    if getattr(args, "goal", None) is not None:
        changes["goal"] = minutes(args.goal)
    if getattr(args, "mbus", None) is not None:
        changes["bus_penalty"] = args.mbus
    if getattr(args, "mg", None) is not None:
        changes["excess_penalty"] = args.mg
    if getattr(args, "max_chain", None) is not None:
        changes["max_chain"] = args.max_chain
    return inst.replace(**changes) if changes else inst


def _write_json(path: Path, payload):
    path.write_text(json.dumps(payload, indent=2) + "\n")


def cmd_gen(args):
    fields = {}
    if args.n is not None:
        fields["n_trips"] = args.n
    for name in ("seed", "goal", "n_schools"):
        val = getattr(args, name)
        if val is not None:
            fields[name] = val
    params = preset(args.preset, **fields)
    inst = generate(params)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_instance(inst, out)
    sidecar = out.with_name(out.stem + ".provenance.json")
    _write_json(sidecar, {"tool": "busbalance", "version": __version__, "preset": args.preset,
                          "params": params_to_dict(params)})
    print(f"wrote {out} ({inst.n} trips)")
    return 0


def solve_pipeline(inst, stage1_only=False, passes=1):
    """Block, optionally rebalance, check invariants; returns schedules and timings."""
    t0 = time.perf_counter()
    stage1 = block(inst)
    t1 = time.perf_counter()
    final = stage1 if stage1_only else rebalance(stage1, inst, passes=passes)
    t2 = time.perf_counter()
    # the heuristic does not cap chain length; block() warns about that separately
    unbounded = inst if inst.max_chain is None else inst.replace(max_chain=None)
    for label, sched in (("stage 1", stage1), ("final", final)):
        bad = validate_schedule(sched, unbounded)
        if bad:
            raise InvariantError(f"{label} schedule invalid: {bad[0]}")
    if len(final) != len(stage1):
        raise InvariantError("balancing changed the number of tours")
    if total_excess(final, inst) > total_excess(stage1, inst):
        raise InvariantError("balancing increased aggregate excess")
    return stage1, final, {"blocking_s": t1 - t0, "balancing_s": t2 - t1}


def cmd_solve(args):
    inst = _overrides(load_instance(args.instance), args)
    stage1, final, timing = solve_pipeline(inst, args.stage1_only, args.passes)
    cm = CostModel(annual_bus_cost=inst.bus_penalty, per_minute_year=inst.excess_penalty)
    report = compare(kpi(stage1, inst, cm), kpi(final, inst, cm))
    report["timing"] = timing
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    save_schedule(final, inst, out / "schedule.json")
    _write_json(out / "report.json", report)
    table = render_table(report)
    (out / "report.txt").write_text(table + "\n")
    print(table)
    print(f"blocking {timing['blocking_s']:.2f}s  balancing {timing['balancing_s']:.2f}s")
    return 0


def cmd_export_mip(args):
    inst = _overrides(load_instance(args.instance), args)
    size = estimate_size(inst)
    if size > args.max_vars:
        raise InputError(
            f"model would have {size} variables (limit {args.max_vars}); "
            "use the heuristic (solve) for instances this large or raise --max-vars"
        )
    model = build_mip(inst)
    text = export_lp(model)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    nnz = sum(len(r.terms) for r in model.rows)
    print(f"wrote {out}: {model.n_vars} variables ({len(model.binaries)} binary), "
          f"{len(model.rows)} constraints, {nnz} nonzeros")
    return 0


def cmd_oracle(args):
    inst = _overrides(load_instance(args.instance), args)
    res = exact_solve_small(inst, node_limit=args.node_limit)
    payload = asdict(res)
    payload["schedule"] = [list(t) for t in res.schedule.tours]
    status = "proven optimal" if res.proven_optimal else "NOT proven (node limit hit)"
    print(f"buses {res.buses}  excess {res.excess_total:.2f} min  objective {res.objective:,.2f}  "
          f"[{status}, {res.nodes} nodes]")
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "oracle.json", payload)
    return 0


def _bench_one(job):
    name, n, seed, goal = job
    inst = generate(preset(name, n_trips=n, seed=seed, goal=goal))
    stage1, final, timing = solve_pipeline(inst)
    return {"seed": seed, "n": n, **compare(kpi(stage1, inst), kpi(final, inst)), "timing": timing}


def cmd_bench(args):
    jobs = [(args.preset, args.n, s, args.goal) for s in range(args.seed, args.seed + args.seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    for r in rows:
        print(f"seed {r['seed']:>4}  tours {r['old']['n_tours']:>4}  "
              f"SD {r['old']['duration_sd']:7.2f} -> {r['new']['duration_sd']:7.2f}  "
              f"exceed {r['old']['exceed_minutes']:9.2f} -> {r['new']['exceed_minutes']:9.2f}")
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "bench.json", rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="busbalance", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def penalties(sp):
        sp.add_argument("--goal", type=float, help="goal tour duration, minutes")
        sp.add_argument("--mbus", type=float, help="penalty per bus")
        sp.add_argument("--mg", type=float, help="penalty per excess minute")
        sp.add_argument("--max-chain", type=int, help="max trips per tour (B)")

    g = sub.add_parser("gen", help="generate a synthetic instance")
    g.add_argument("--preset", choices=sorted(PRESETS), default="hcpss")
    g.add_argument("-n", type=int, help="number of trips")
    g.add_argument("--seed", type=int)
    g.add_argument("--goal", type=float)
    g.add_argument("--n-schools", type=int)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="stage-1 blocking then stage-2 balancing")
    s.add_argument("instance")
    penalties(s)
    s.add_argument("--stage1-only", action="store_true")
    s.add_argument("--passes", type=_positive_int, default=1)
    s.add_argument("-o", "--output", default="out")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("export-mip", help="write the MIP in LP format")
    e.add_argument("instance")
    penalties(e)
    e.add_argument("--max-vars", type=int, default=5_000_000)
    e.add_argument("-o", "--output", default="model.lp")
    e.set_defaults(func=cmd_export_mip)

    o = sub.add_parser("oracle", help="exhaustive search for small instances")
    o.add_argument("instance")
    penalties(o)
    o.add_argument("--node-limit", type=_positive_int, default=2_000_000)
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="solve a sweep of generated instances")
    b.add_argument("--preset", choices=sorted(PRESETS), default="hcpss")
    b.add_argument("-n", type=_positive_int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--seeds", type=_positive_int, default=10)
    b.add_argument("--goal", type=float, default=75.0)
    b.add_argument("--jobs", type=_positive_int, default=1)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_BUG
    except (InputError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
