"""Command line interface: defect | stabilize | test | gen | oracle | bench.

All machine-readable output is JSON (CSV for bench).  Every report embeds
the constants used, the mode, and the pass/fail vector of the bounds that
were verified at runtime; reports are schema-validated before writing.

Exit codes: 0 ok; 1 a runtime-verified bound failed (a bug, surfaced
loudly); 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import jsonschema

from . import instances, tester
from .actions import ActionSpace, load, local_defect, store
from .errors import BudgetExceeded, CertificateError, PreconditionError
from .oracles import oracle_ds, oracle_eta, oracle_g
from .presentation import (
    build_presentation,
    build_E,
    certified_constants,
    commutator_set,
    load_presentation,
    scaled_constants,
)
from .rng import SplitMix64
from .tiling import TileContext, repair

REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "mode", "constants", "checks", "data"],
    "properties": {
        "command": {"type": "string"},
        "mode": {"type": "string"},
        "constants": {"type": "object"},
        "checks": {"type": "object"},
        "data": {"type": "object"},
    },
}


def _emit(report: dict, path):
    jsonschema.validate(report, REPORT_SCHEMA)
    text = json.dumps(report, sort_keys=True, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _resolve_presentation(args, space: ActionSpace):
    if getattr(args, "presentation", None):
        p, consts = load_presentation(args.presentation)
        if p.m != space.m:
            raise ValueError("presentation rank does not match the instance")
    elif space.presentation is not None:
        p = space.presentation
        consts = None
    else:
        p = build_presentation(space.m, space.m, [])
        consts = None
    if args.mode == "scaled":
        consts = scaled_constants(p, C_d=args.scale_cd, C_Box=args.scale_cbox,
                                  h=args.scale_h)
    elif consts is None:
        consts = certified_constants(p)
    return p, consts


def _equation_set(args, p):
    if getattr(args, "canonical_commutators", False):
        return commutator_set(p.d)
    return build_E(p)


def _add_common(sub):
    sub.add_argument("--mode", choices=["certified", "scaled"],
                     default="certified")
    sub.add_argument("--scale-cd", type=int, default=1,
                     help="effective C_d in scaled mode")
    sub.add_argument("--scale-cbox", type=int, default=1,
                     help="effective C_Box in scaled mode")
    sub.add_argument("--scale-h", type=int, default=2,
                     help="effective schedule ratio h in scaled mode")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--budget-points", type=int, default=2_000_000)
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--presentation", help="presentation JSON file")
    sub.add_argument("-o", "--output", help="write the report here")


def _cmd_defect(args) -> int:
    space = load(args.instance)
    p, consts = _resolve_presentation(args, space)
    e = _equation_set(args, p)
    rep = local_defect(space, e)
    report = {
        "command": "defect",
        "mode": consts.mode,
        "constants": consts.to_json_dict(),
        "checks": {"abiding_sandwich": True},
        "data": {
            "n": rep.n,
            "local_defect": str(rep.local_defect),
            "abiding_count": rep.abiding_count,
            "per_word": list(rep.per_word),
            "equations": len(e),
            "equation_source": e.source,
        },
    }
    _emit(report, args.output)
    return 0


def _cmd_stabilize(args) -> int:
    space = load(args.instance)
    p, consts = _resolve_presentation(args, space)
    e = _equation_set(args, p)
    delta = Fraction(args.delta) if args.delta else None
    result = repair(space, e, p, constants=consts, delta=delta)
    if args.out_instance:
        store(result.psi, args.out_instance)
    data = result.to_json_dict()
    report = {
        "command": "stabilize",
        "mode": result.mode,
        "constants": data.pop("constants"),
        "checks": data.pop("checks"),
        "data": data,
    }
    _emit(report, args.output)
    return 0


def _cmd_test(args) -> int:
    space = load(args.instance)
    p, consts = _resolve_presentation(args, space)
    e = _equation_set(args, p)
    if args.amplified:
        if args.epsilon is None:
            raise ValueError("--amplified needs --epsilon")
        eps = Fraction(args.epsilon)
        accept, queries = tester.amplified_test(
            space, e, eps, lambda _: eps, SplitMix64(args.seed))
        data = {"amplified": True, "accept": accept, "query_count": queries,
                "epsilon": str(eps)}
        checks = {"one_sided": True}
    else:
        stats = _sharded_estimate(space, e, args.trials, args.seed,
                                  args.threads)
        data = {
            "amplified": False,
            "trials": stats.trials,
            "rejections": stats.rejections,
            "empirical_rate": str(stats.empirical_rate),
            "expected_rate": str(stats.expected_rate),
            "query_count": stats.query_count,
        }
        checks = {"within_4_sigma": not stats.deviation_flagged}
    report = {
        "command": "test",
        "mode": consts.mode,
        "constants": consts.to_json_dict(),
        "checks": checks,
        "data": data,
    }
    _emit(report, args.output)
    return 0


def _sharded_estimate(space, e, trials, seed, threads):
    """Per-shard seeds, order-independent merge; threads only cap workers."""
    shards = max(1, min(threads, 8))
    if shards == 1:
        return tester.estimate_rejection(space, e, trials, seed)
    base = SplitMix64(seed)
    seeds = [base.next_u64() for _ in range(shards)]
    sizes = [trials // shards] * shards
    sizes[0] += trials - sum(sizes)
    with ThreadPoolExecutor(max_workers=shards) as pool:
        parts = list(pool.map(
            lambda sv: tester.estimate_rejection(space, e, sv[0], sv[1]),
            [(sz, sd) for sz, sd in zip(sizes, seeds) if sz > 0]))
    rejections = sum(s.rejections for s in parts)
    emp = Fraction(rejections, trials)
    exp = parts[0].expected_rate
    flagged = (emp - exp) ** 2 * trials > 16 * exp * (1 - exp)
    return tester.TesterStats(trials=trials, rejections=rejections,
                              empirical_rate=emp, expected_rate=exp,
                              query_count=trials, deviation_flagged=bool(flagged))


def _cmd_gen(args) -> int:
    seed = args.seed
    if args.family == "xt":
        space = instances.make_xt(args.d, args.t)
    elif args.family == "torus":
        dims = [int(a) for a in args.dims.split(",")]
        space = instances.make_torus(dims)
    elif args.family == "dilution":
        space = instances.dilute(instances.make_xt(args.d, args.t),
                                 args.p, args.q)
    elif args.family == "perturbed":
        dims = [int(a) for a in args.dims.split(",")]
        space = instances.perturb(instances.make_torus(dims), args.k, seed)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError("unknown family")
    store(space, args.out)
    return 0


def _cmd_oracle(args) -> int:
    space = load(args.instance)
    p, consts = _resolve_presentation(args, space)
    e = _equation_set(args, p)
    if args.kind == "g":
        value = oracle_g(space, e)
        data = {"oracle": "g", "value": str(value)}
    elif args.kind == "ds":
        other = load(args.other)
        value = oracle_ds(space, other)
        data = {"oracle": "ds", "value": str(value)}
    else:
        pts = [int(a) for a in args.points.split(",")] if args.points else []
        ctx = TileContext.build(space, e, p, consts)
        eta = oracle_eta(ctx, pts, args.t)
        data = {"oracle": "eta", "size": len(eta), "points": sorted(eta)}
    report = {
        "command": "oracle",
        "mode": consts.mode,
        "constants": consts.to_json_dict(),
        "checks": {},
        "data": data,
    }
    _emit(report, args.output)
    return 0


def _cmd_bench(args) -> int:
    t_list = [int(a) for a in args.t_list.split(",")]
    rows = []
    for t in t_list:
        space = instances.make_xt(args.d, t)
        p = space.presentation
        e = build_E(p)
        consts = (scaled_constants(p, C_d=args.scale_cd, C_Box=args.scale_cbox,
                                   h=args.scale_h)
                  if args.mode == "scaled" else certified_constants(p))
        start = time.perf_counter()
        result = repair(space, e, p, constants=consts)
        wall = time.perf_counter() - start
        rows.append({
            "family": "xt",
            "n": space.n,
            "t": t,
            "distance": str(result.distance),
            "eq_ratio": str(Fraction(result.eq_total, space.n)),
            "wall_time": f"{wall:.6f}",
        })
    out = args.output or "-"
    fh = sys.stdout if out == "-" else open(out, "w", newline="")
    try:
        writer = csv.DictWriter(
            fh, fieldnames=["family", "n", "t", "distance", "eq_ratio",
                            "wall_time"])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="permstab",
        description="measure, test and repair abelian permutation equations")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("defect", help="exact local defect of an instance")
    d.add_argument("--instance", required=True)
    d.add_argument("--canonical-commutators", action="store_true",
                   help="use the i<j commutator set instead of the full E")
    _add_common(d)
    d.set_defaults(func=_cmd_defect)

    s = sub.add_parser("stabilize", help="repair an instance into an exact solution")
    s.add_argument("--instance", required=True)
    s.add_argument("--delta", help="schedule delta as an exact rational")
    s.add_argument("--out-instance", help="write the repaired instance here")
    s.add_argument("--canonical-commutators", action="store_true")
    _add_common(s)
    s.set_defaults(func=_cmd_stabilize)

    t = sub.add_parser("test", help="run the canonical or amplified tester")
    t.add_argument("--instance", required=True)
    t.add_argument("--trials", type=int, default=1000)
    t.add_argument("--amplified", action="store_true")
    t.add_argument("--epsilon", help="detection probability for the amplified tester")
    t.add_argument("--canonical-commutators", action="store_true")
    _add_common(t)
    t.set_defaults(func=_cmd_test)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True,
                   choices=["xt", "torus", "dilution", "perturbed"])
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--t", type=int, default=4)
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--q", type=int, default=1)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--dims", default="4,4")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out", required=True)
    g.set_defaults(func=_cmd_gen)

    o = sub.add_parser("oracle", help="brute-force oracles (tiny instances)")
    o.add_argument("kind", choices=["g", "ds", "eta"])
    o.add_argument("--instance", required=True)
    o.add_argument("--other", help="second instance for ds")
    o.add_argument("--t", type=int, default=2, help="tile parameter for eta")
    o.add_argument("--points", help="comma-separated A for eta")
    o.add_argument("--canonical-commutators", action="store_true")
    _add_common(o)
    o.set_defaults(func=_cmd_oracle)

    b = sub.add_parser("bench", help="CSV over an X_t sweep")
    b.add_argument("--d", type=int, default=2)
    b.add_argument("--t-list", default="4,8,16,32")
    _add_common(b)
    b.set_defaults(func=_cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CertificateError as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return 1
    except (PreconditionError, BudgetExceeded, ValueError, OSError,
            json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
