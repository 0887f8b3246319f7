"""Command-line front end: ``raag <command> ...``.

Exit codes: 0 success (certify: trivial), 1 error, 2 hypotheses fail,
3 inconclusive.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .bounds import (
    MIN_RANK,
    landazuri_seitz_bound,
    min_dim_lower_bound,
    thresholds,
)
from .errors import RaagError
from .generators import enumerate_generators, no_injection_verdict, out0_split
from .graph import (
    DEFAULT_AUT_CAP,
    Graph,
    automorphism_group_order,
    connected_components,
    equal_star_partition,
    is_clique,
    is_cone,
    is_discrete,
    join_decomposition,
)
from .graphio import load_graph, parse_batch_line
from .invariants import DEFAULT_EXHAUSTIVE_CAP, invariant_family
from .matgroups import (
    DEFAULT_ELEMENT_CAP,
    CongruenceSpec,
    center_by_search,
    congruence_kernel,
    enumerate_sl,
    generate,
    is_perfect,
    scalar_center,
    sl_order,
)
from .report import dumps, make_report, render_text
from .rigidity import (
    HYPOTHESES_FAIL,
    INCONCLUSIVE,
    TRIVIAL,
    decide,
    property_C,
    property_D,
)

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESES_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICT_EXIT = {TRIVIAL: EXIT_OK, HYPOTHESES_FAIL: EXIT_HYPOTHESES_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}


def resolve_cap(flag: int | None, default: int) -> int:
    """``--cap`` beats ``RAAG_CAP`` beats the built-in default."""
    if flag is not None:
        return flag
    env = os.environ.get("RAAG_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise RaagError(f"RAAG_CAP must be an integer, got {env!r}") from None
    return default


# --- result payloads --------------------------------------------------------

def analyze_results(g: Graph, cap: int = DEFAULT_AUT_CAP) -> dict:
    jd = join_decomposition(g)
    return {
        "vertex_count": len(g),
        "edge_count": g.edge_count(),
        "vertices": list(g.vertices),
        "components": [g.labels(c) for c in connected_components(g)],
        "join_decomposition": {
            "factors": [g.labels(f) for f in jd.factors],
            "clique_factor": g.labels(jd.clique_factor),
        },
        "equal_star_partition": [g.labels(c) for c in equal_star_partition(g).classes],
        "is_cone": is_cone(g, g.full),
        "is_clique": is_clique(g, g.full),
        "is_discrete": is_discrete(g, g.full),
        "automorphism_count": automorphism_group_order(g, cap),
    }


def generators_results(g: Graph, cap: int = DEFAULT_AUT_CAP, counts_only: bool = False) -> dict:
    inv = enumerate_generators(g, cap)
    pure, q_order = out0_split(g, cap)
    return {
        "inventory": inv.to_dict(g, counts_only),
        "out0_split": {"pure_counts": pure.counts(), "symmetry_group_order": q_order},
    }


def invariants_results(g: Graph, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP) -> dict:
    fam = invariant_family(g, exhaustive_cap)
    out = fam.to_dict()
    out["proper"] = [g.labels(m) for m in fam.proper()]
    out["verified"] = fam.verify()
    return out


def certify_results(g: Graph, n: int, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP) -> dict:
    verdict = decide(g, n, exhaustive_cap)
    fam = invariant_family(g, exhaustive_cap)
    return {
        "verdict": verdict.to_dict(g),
        "properties": {
            "C": property_C(g, fam, n).to_dict(g),
            "D": property_D(g, fam, n).to_dict(g),
        },
        "invariant_completeness": fam.completeness_flag,
    }


def compare_results(g: Graph, g2: Graph, digests: tuple[str, str]) -> dict:
    out = no_injection_verdict(g, g2).to_dict(g, g2)
    out["input_digests"] = list(digests)
    return out


def oracle_results(n: int, p: int, alpha: int = 1, cap: int = DEFAULT_ELEMENT_CAP) -> dict:
    spec = CongruenceSpec(n, p, alpha)
    q = spec.q
    group = enumerate_sl(spec, cap)
    checks = [
        {
            "name": "order",
            "pass": group.order == sl_order(n, p, alpha),
            "detail": f"|SL_{n}(Z/{q})| = {group.order}, formula {sl_order(n, p, alpha)}",
        }
    ]
    generated = generate(group.generators, n, q, cap).order
    checks.append({
        "name": "elementary_generation",
        "pass": generated == group.order,
        "detail": f"elementary matrices generate {generated} elements",
    })
    perfect = is_perfect(group, cap)
    checks.append({
        "name": "perfect",
        "pass": perfect or n < 3,
        "detail": f"perfect = {perfect}" + ("" if n >= 3 else " (informational for n = 2)"),
    })
    z = scalar_center(spec)
    searched = center_by_search(group)
    checks.append({
        "name": "scalar_center",
        "pass": z.order == searched.order and bool(set(z.codes) == set(searched.codes)),
        "detail": f"scalar centre order {z.order}, centre by search {searched.order}",
    })
    if alpha >= 2:
        kernel, rep = congruence_kernel(spec, cap, group)
        checks.append({
            "name": "congruence_kernel",
            "pass": rep.mennicke_ok and rep.surjective_ok,
            "detail": f"|N| = {rep.kernel_order}, normal closure of E_ij({p}) has order "
            f"{rep.normal_closure_order}, index {rep.index} (expected {rep.expected_index})",
        })
    return {"n": n, "p": p, "alpha": alpha, "q": q, "order": group.order,
            "all_pass": all(c["pass"] for c in checks), "checks": checks}


def parse_int_range(text: str) -> list[int]:
    """``"3"``, ``"3-6"`` or ``"3,5,7"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def bounds_results(ns: list[int], ps: list[int], alpha: int = 1, oracle: bool = False,
                   cap: int = DEFAULT_ELEMENT_CAP) -> dict:
    table = []
    for n in ns:
        for p in ps:
            table.append({
                "n": n,
                "p": p,
                "min_dim": min_dim_lower_bound(n, p, alpha).to_dict(),
                "landazuri_seitz": landazuri_seitz_bound(n, p).to_dict(),
            })
    out: dict = {
        "table": table,
        "thresholds": [thresholds(n).to_dict() for n in ns if n >= MIN_RANK],
    }
    if oracle:
        runs = []
        for n in ns:
            for p in ps:
                try:
                    runs.append(oracle_results(n, p, alpha, cap))
                except RaagError as exc:
                    runs.append({"n": n, "p": p, "alpha": alpha, "skipped": str(exc)})
        checks = [
            {**c, "name": f"n={r['n']} p={r['p']} alpha={r['alpha']}: {c['name']}"}
            for r in runs for c in r.get("checks", [])
        ]
        out["oracle"] = {"runs": runs, "checks": checks,
                         "all_pass": all(c["pass"] for c in checks)}
    return out


# --- command handlers ---------------------------------------------------------

def _emit(report: dict, args) -> None:
    if args.human or args.format == "text":
        print(render_text(report))
    else:
        print(dumps(report))


def cmd_analyze(args) -> int:
    g, raw = load_graph(args.graph)
    _emit(make_report("analyze", analyze_results(g, resolve_cap(args.cap, DEFAULT_AUT_CAP)), (raw,)), args)
    return EXIT_OK


def cmd_generators(args) -> int:
    g, raw = load_graph(args.graph)
    res = generators_results(g, resolve_cap(args.cap, DEFAULT_AUT_CAP), args.counts_only)
    _emit(make_report("generators", res, (raw,)), args)
    return EXIT_OK


def cmd_invariants(args) -> int:
    g, raw = load_graph(args.graph)
    res = invariants_results(g, resolve_cap(args.cap, DEFAULT_EXHAUSTIVE_CAP))
    _emit(make_report("invariants", res, (raw,)), args)
    return EXIT_OK


def cmd_certify(args) -> int:
    g, raw = load_graph(args.graph)
    res = certify_results(g, args.n, resolve_cap(args.cap, DEFAULT_EXHAUSTIVE_CAP))
    _emit(make_report("certify", res, (raw,)), args)
    return VERDICT_EXIT[res["verdict"]["outcome"]]


def cmd_bounds(args) -> int:
    res = bounds_results(parse_int_range(args.n), parse_int_range(args.p), args.alpha,
                         args.oracle, resolve_cap(args.cap, DEFAULT_ELEMENT_CAP))
    _emit(make_report("bounds", res), args)
    if args.oracle and not res["oracle"]["all_pass"]:
        return EXIT_ERROR
    return EXIT_OK


def cmd_oracle(args) -> int:
    res = oracle_results(args.n, args.p, args.alpha, resolve_cap(args.cap, DEFAULT_ELEMENT_CAP))
    _emit(make_report("oracle", res), args)
    return EXIT_OK if res["all_pass"] else EXIT_ERROR


def cmd_compare(args) -> int:
    from .report import digest

    g, raw = load_graph(args.graph_a)
    g2, raw2 = load_graph(args.graph_b)
    res = compare_results(g, g2, (digest(raw), digest(raw2)))
    _emit(make_report("compare", res, (raw, raw2)), args)
    return EXIT_OK


def _batch_entry(item: tuple[int, str], n: int, exhaustive_cap: int) -> dict:
    index, line = item
    raw = line.encode()
    try:
        g = parse_batch_line(line, index)
        verdict = decide(g, n, exhaustive_cap)
        return make_report("batch", {"line": index, "verdict": verdict.to_dict(g)}, (raw,))
    except RaagError as exc:
        return make_report("batch", {"line": index}, (raw,), error=str(exc))


def cmd_batch(args) -> int:
    if not args.stdin_edge_lists:
        raise RaagError("batch reads graphs from stdin; pass --stdin-edge-lists")
    items = [
        (i, line.strip())
        for i, line in enumerate(sys.stdin.read().splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    cap = resolve_cap(args.cap, DEFAULT_EXHAUSTIVE_CAP)
    counts = {TRIVIAL: 0, HYPOTHESES_FAIL: 0, INCONCLUSIVE: 0, "error": 0}
    text = args.human or args.format == "text"
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        for report in pool.map(lambda it: _batch_entry(it, args.n, cap), items):
            key = "error" if "error" in report else report["results"]["verdict"]["outcome"]
            counts[key] += 1
            print(render_text(report) if text else dumps(report, compact=True))
    summary = make_report("batch-summary", {"total": len(items), "counts": counts})
    print(render_text(summary) if text else dumps(summary, compact=True))
    return EXIT_ERROR if counts["error"] else EXIT_OK


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--human", action="store_true", help="prose output with citations")
    common.add_argument("--cap", type=int, default=None,
                        help="enumeration cap for this command (overrides RAAG_CAP)")

    parser = argparse.ArgumentParser(
        prog="raag", description="RAAG automorphism structure and SOut(F_n) rigidity certificates"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="graph summary")
    p.add_argument("graph")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generators", parents=[common], help="Laurence generator inventory")
    p.add_argument("graph")
    p.add_argument("--counts-only", action="store_true")
    p.set_defaults(func=cmd_generators)

    p = sub.add_parser("invariants", parents=[common], help="forced-invariant subgraphs")
    p.add_argument("graph")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("certify", parents=[common], help="rigidity verdict and certificate")
    p.add_argument("graph")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bounds", parents=[common], help="representation bounds and thresholds")
    p.add_argument("--n", required=True, help="e.g. 3, 3-7 or 3,5")
    p.add_argument("--p", required=True, help="e.g. 2, 2-7 or 2,3,5")
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--oracle", action="store_true", help="also run matrix-group oracles")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle", parents=[common], help="matrix-group oracle checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--alpha", type=int, default=1)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", parents=[common], help="Z/2-rank no-injection verdict")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("batch", parents=[common], help="certify one graph per stdin line")
    p.add_argument("--stdin-edge-lists", action="store_true",
                   help="read 'V:a,b,c E:a-b,b-c' lines from stdin")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--jobs", type=int, default=4)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RaagError, OSError) as exc:
        print(f"raag {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
