"""Command-line front end.

Exit codes: 0 success, 1 analysis error (bad input, violated precondition),
2 usage error. All data goes to stdout; diagnostics go to stderr. With
--json every output follows the published schemas.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus
from .analyzer import AnalyzeOptions, analyze, decompose
from .criteria import run_criteria
from .errors import ProstError
from .explore import adversarial_bounds, build_rst, export_rst, monte_carlo
from .parser import parse_ptrs, parse_term, render_ptrs
from .ptrs import Ptrs, enumerate_basic_terms
from .rewriting import Strategy, make_policy
from .transforms import disjoint_abstraction, generator_rules


def _load_system(name: str) -> tuple:
    """Read a .ptrs file, falling back to the bundled corpus by name."""
    path = Path(name)
    if path.exists():
        text = path.read_text()
    else:
        text = corpus.corpus_text(name)
    return parse_ptrs(text), text


def _starts(p: Ptrs, args) -> list:
    if args.start is not None:
        return [parse_term(args.start, p)]
    if getattr(args, "basic_enum", None) is not None:
        terms = enumerate_basic_terms(p, args.basic_enum)
        if not terms:
            raise ProstError("no basic terms within the given size")
        return terms
    raise ProstError("a start term is required (--start or --basic-enum)")


def _add_common(sub, start=False):
    sub.add_argument("file", help="PTRS file, or the name of a bundled system")
    sub.add_argument("--json", action="store_true", help="emit JSON")
    if start:
        sub.add_argument("--start", help="start term")
        sub.add_argument("--basic-enum", type=int, metavar="N",
                         help="enumerate basic start terms up to size N")
        sub.add_argument("--strategy", choices=["f", "i", "li", "sim"], default="i")
        sub.add_argument("--scheduler",
                         choices=["first", "rightmost", "random", "exhaustive"],
                         default="first")
        sub.add_argument("--depth", type=int, default=20)
        sub.add_argument("--max-nodes", type=int, default=200_000)
        sub.add_argument("--merge", action="store_true",
                         help="coalesce structurally equal siblings per level")
        sub.add_argument("--seed", type=int, default=0)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="prost",
        description="Analyze probabilistic term rewrite systems: syntactic "
        "criteria, strategy-transfer claims, and numeric evidence.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="print the property table")
    _add_common(check)
    check.add_argument("--depth", type=int, default=3,
                       help="bound for the local-confluence search")
    check.add_argument("--assume-spare", action="store_true")

    an = sub.add_parser("analyze", help="full report with claims and evidence")
    _add_common(an, start=True)
    an.add_argument("--assume-spare", action="store_true")
    an.add_argument("--simulate", choices=["f", "i", "li", "sim"],
                    help="gather numeric evidence for this strategy")
    an.add_argument("--samples", type=int, help="also attach a Monte Carlo estimate")
    an.add_argument("--cap", type=int, default=1000)

    sim = sub.add_parser("simulate", help="exact bounded exploration metrics")
    _add_common(sim, start=True)

    mc = sub.add_parser("mc", help="Monte Carlo estimation")
    _add_common(mc, start=True)
    mc.add_argument("--samples", type=int, default=10_000)
    mc.add_argument("--cap", type=int, default=1000)

    tr = sub.add_parser("transform", help="generator rules / abstraction")
    trsub = tr.add_subparsers(dest="transform_command", required=True)
    gen = trsub.add_parser("gen", help="emit the generator rules G(P)")
    _add_common(gen)
    absx = trsub.add_parser("abs", help="emit the disjoint-union abstraction")
    _add_common(absx)
    absx.add_argument("--term", required=True, help="term to abstract")
    absx.add_argument("--split", metavar="I,J,...",
                      help="rule indices of the first component "
                      "(default: the disjoint decomposition, which must "
                      "have exactly two components)")

    dec = sub.add_parser("decompose", help="disjoint / shared-constructor parts")
    _add_common(dec)
    dec.add_argument("--kind", choices=["disjoint", "shared-constructor"],
                     default="disjoint")

    ex = sub.add_parser("export-rst", help="build a tree and export it")
    _add_common(ex, start=True)
    ex.add_argument("--format", choices=["dot", "json"], default="dot")
    return ap


def _cmd_check(args) -> int:
    p, _ = _load_system(args.file)
    report = run_criteria(p, wcr_depth=args.depth, assume_spare=args.assume_spare)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
        return 0
    flags = [
        ("LL", report.left_linear),
        ("RL", report.right_linear),
        ("linear", report.linear),
        ("NE", report.non_erasing),
        ("NO", report.non_overlapping),
        ("OS", report.overlay),
        ("OR", report.orthogonal),
    ]
    for name, value in flags:
        print(f"{name:8} {'yes' if value else 'no'}")
    print(f"{'SP':8} {report.spare.verdict}  ({report.spare.justification})")
    print(f"{'WCR':8} {report.wcr_bounded}  (bounded, depth {args.depth})")
    print(f"{'overlaps':8} {len(report.overlaps)}")
    for o in report.overlaps:
        pos = ".".join(map(str, o.position)) or "root"
        print(f"  rules {o.rule_i} and {o.rule_j} at {pos}")
    return 0


def _cmd_analyze(args) -> int:
    p, text = _load_system(args.file)
    options = AnalyzeOptions(
        assume_spare=args.assume_spare,
        start=args.start,
        basic_enum=args.basic_enum,
        simulate=args.simulate,
        scheduler=args.scheduler,
        depth=args.depth,
        max_nodes=args.max_nodes,
        merge=args.merge,
        samples=args.samples,
        cap=args.cap,
        seed=args.seed,
    )
    report = analyze(p, options, source_text=text)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
        return 0
    props = report.properties
    truth = {True: "yes", False: "no"}
    print(
        "properties: "
        + " ".join(
            f"{k}={truth[v]}"
            for k, v in [
                ("LL", props.left_linear),
                ("RL", props.right_linear),
                ("NE", props.non_erasing),
                ("NO", props.non_overlapping),
                ("OS", props.overlay),
                ("OR", props.orthogonal),
            ]
        )
        + f" SP={props.spare.verdict} WCR={props.wcr_bounded}"
    )
    if report.split is not None:
        print(f"infinite splits: {report.split.kind}")
    print("claims:")
    seen = set()
    for c in report.claims:
        line = _format_claim(c)
        if line not in seen:
            seen.add(line)
            print("  " + line)
    for kind, d in report.decompositions.items():
        if len(d.components) > 1:
            comps = " ".join("{" + ",".join(map(str, c)) + "}" for c in d.components)
            print(f"{kind} components: {comps}")
            for claim in d.claims:
                print(f"  {claim}")
            for flag in d.flags:
                print(f"  warning: {flag}")
    for ev in report.evidence:
        print(f"evidence: {json.dumps(ev)}")
    if report.assumptions:
        print("assumptions: " + ", ".join(report.assumptions))
    return 0


def _format_claim(c) -> str:
    if c.relation == "note":
        return f"{c.id} [{c.cite}] {c.note}"
    arrow = {"iff": "<=>", "implies": "=>", "eq": "=", "le": "<="}[c.relation]
    def side(ref):
        start = "" if ref.start == "all" else " on basic terms"
        return f"{ref.prop}({ref.strategy}){start}"
    pre = " & ".join(c.prereqs) or "always"
    return f"{c.id} [{c.cite}] {pre}: {side(c.lhs)} {arrow} {side(c.rhs)}"


def _cmd_simulate(args) -> int:
    p, _ = _load_system(args.file)
    strategy = Strategy(args.strategy)
    results = []
    for term in _starts(p, args):
        rst = build_rst(
            p, term, strategy, make_policy(args.scheduler, args.seed),
            args.depth, args.max_nodes, args.merge,
        )
        h = args.depth
        results.append(
            {
                "start": str(term),
                "strategy": strategy.value,
                "depth": h,
                "conv_prefix": str(rst.conv_prefix(h)),
                "conv_prefix_float": float(rst.conv_prefix(h)),
                "edl_prefix": str(rst.edl_prefix(h)),
                "edl_prefix_float": float(rst.edl_prefix(h)),
                "frontier": str(rst.frontier(h)),
                "nodes": len(rst.nodes),
            }
        )
    if args.json:
        print(json.dumps(results, indent=2))
    else:
        for r in results:
            print(
                f"{r['start']}: conv_prefix({r['depth']}) = {r['conv_prefix']} "
                f"~ {r['conv_prefix_float']:.6f}, edl_prefix({r['depth']}) = "
                f"{r['edl_prefix']} ~ {r['edl_prefix_float']:.6f}"
            )
    return 0


def _cmd_mc(args) -> int:
    p, _ = _load_system(args.file)
    strategy = Strategy(args.strategy)
    results = []
    for term in _starts(p, args):
        est = monte_carlo(
            p, term, strategy, args.scheduler, args.samples, args.cap, args.seed
        )
        results.append(
            {
                "start": str(term),
                "strategy": strategy.value,
                "samples": est.samples,
                "cap": est.cap,
                "terminated_fraction": est.terminated_fraction,
                "mean_steps": est.mean_steps,
                "std_error": est.std_error,
                "seed": est.seed,
            }
        )
    if args.json:
        print(json.dumps(results, indent=2))
    else:
        for r in results:
            print(
                f"{r['start']}: terminated {r['terminated_fraction']:.4f} "
                f"(se {r['std_error']:.4f}), mean steps of terminated runs "
                f"{r['mean_steps']:.3f}"
            )
    return 0


def _cmd_transform(args) -> int:
    p, _ = _load_system(args.file)
    if args.transform_command == "gen":
        ext = generator_rules(p)
        print(render_ptrs(ext.as_ptrs()), end="")
        return 0
    # abs
    term = parse_term(args.term, p)
    if args.split is not None:
        first = sorted(int(i) for i in args.split.split(","))
        rest = [i for i in range(len(p.rules)) if i not in first]
    else:
        d = decompose(p, "disjoint")
        if len(d.components) != 2:
            raise ProstError(
                "the disjoint decomposition does not have exactly two "
                "components; pass --split"
            )
        first, rest = list(d.components[0]), list(d.components[1])
    from .analyzer import component_system

    p1 = component_system(p, first)
    p2 = component_system(p, rest)
    abs1, abs2 = disjoint_abstraction(term, p1, p2)
    if args.json:
        print(json.dumps({"Abs1": [str(t) for t in abs1], "Abs2": [str(t) for t in abs2]}, indent=2))
    else:
        print("Abs1:")
        for t in abs1:
            print(f"  {t}")
        print("Abs2:")
        for t in abs2:
            print(f"  {t}")
    return 0


def _cmd_decompose(args) -> int:
    p, _ = _load_system(args.file)
    d = decompose(p, args.kind)
    if args.json:
        print(json.dumps(d.to_json(), indent=2))
        return 0
    print(f"{args.kind} components: {len(d.components)}")
    for comp in d.components:
        rules = "; ".join(str(p.rules[i]) for i in comp)
        print(f"  [{','.join(map(str, comp))}] {rules}")
    for claim in d.claims:
        print(f"  {claim}")
    for flag in d.flags:
        print(f"  warning: {flag}")
    return 0


def _cmd_export(args) -> int:
    p, _ = _load_system(args.file)
    strategy = Strategy(args.strategy)
    terms = _starts(p, args)
    if len(terms) != 1:
        raise ProstError("export-rst needs a single start term")
    rst = build_rst(
        p, terms[0], strategy, make_policy(args.scheduler, args.seed),
        args.depth, args.max_nodes, args.merge,
    )
    print(export_rst(rst, args.format), end="")
    return 0


_COMMANDS = {
    "check": _cmd_check,
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "mc": _cmd_mc,
    "transform": _cmd_transform,
    "decompose": _cmd_decompose,
    "export-rst": _cmd_export,
}


def run(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ProstError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
