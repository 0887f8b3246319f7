"""Acceptance criteria 1-9.  Each test prints one ``CRITERION k: PASS|FAIL`` line."""
from __future__ import annotations

import copy
import random
import time
from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest

from raagcert.bounds import action_thresholds, min_dim_lower_bound, rigidity_bound, thresholds
from raagcert.generators import enumerate_generators, no_injection_verdict, z2_rank_witness
from raagcert.graph import (
    complement,
    complete_graph,
    connected_components,
    cycle_graph,
    discrete_graph,
    is_discrete,
    join_decomposition,
    link,
    path_graph,
    popcount,
)
from raagcert.invariants import RULES
from raagcert.matgroups import (
    CongruenceSpec,
    congruence_kernel,
    enumerate_sl,
    is_perfect,
    scalar_center,
)
from raagcert.rigidity import TRIVIAL, certificate_to_dict, check_hypotheses, decide, verify_certificate

from .conftest import all_labelled_graphs, naive_is_cone, naive_link, random_graph, to_nx
from .test_generators import naive_counts


@pytest.fixture
def announce(capsys):
    def emit(k: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


def corpus(count: int, max_vertices: int, seed: int):
    rng = random.Random(seed)
    return [random_graph(rng, rng.randint(1, max_vertices)) for _ in range(count)], rng


def test_criterion_1_galois_identities(announce):
    graphs, rng = corpus(1000, 12, 2024)
    failures = checked = 0
    start = time.perf_counter()
    for g in graphs:
        subsets = [0, g.full] + [1 << v for v in range(len(g))]
        subsets += [rng.getrandbits(len(g)) & g.full for _ in range(12)]
        for s in subsets:
            lk = link(g, s)
            lk3 = link(g, link(g, lk))
            failures += lk3 != lk
            failures += (s & lk) != 0
            failures += (s & ~link(g, lk)) != 0
            checked += 1
    elapsed = time.perf_counter() - start
    announce(1, failures == 0 and elapsed < 10,
             f"{checked} subsets over 1000 graphs, {failures} failures, {elapsed:.2f}s (< 10s)")


def test_criterion_2_join_decomposition(announce):
    graphs, _ = corpus(1000, 12, 2024)
    failures = 0
    for g in graphs:
        jd = join_decomposition(g)
        h = to_nx(g)
        co_comps = {frozenset(c) for c in nx.connected_components(nx.complement(h))}
        factors = {frozenset(g.labels(f)) for f in jd.factors}
        failures += factors != co_comps
        co = complement(g)
        failures += any(len(connected_components(co, f)) != 1 for f in jd.factors)
        rebuilt = set()
        for f in jd.factors:
            rebuilt |= {frozenset(e) for e in h.subgraph(g.labels(f)).edges}
        for a, b in combinations(jd.factors, 2):
            cross = {frozenset((u, v)) for u in g.labels(a) for v in g.labels(b)}
            failures += not all(h.has_edge(*tuple(e)) for e in cross)
            rebuilt |= cross
        failures += rebuilt != {frozenset(e) for e in h.edges}
    announce(2, failures == 0, f"1000 graphs, {failures} failures (factors, cross edges, round trip)")


def test_criterion_3_generator_counts(announce):
    expected = {
        "P3": (path_graph(3), (3, 4, 0, 2)),
        "C5": (cycle_graph(5), (5, 0, 0, 10)),
        "K4": (complete_graph(4), (4, 12, 0, 24)),
    }
    bad = []
    for name, (g, want) in expected.items():
        c = enumerate_generators(g).counts()
        got = (c["inversions"], c["transvections"], c["partial_conjugations_nonredundant"],
               c["symmetries"])
        if got != want or naive_counts(g) != want:
            bad.append(f"{name}: got {got}, oracle {naive_counts(g)}, want {want}")
    announce(3, not bad, "; ".join(bad) or "P3, C5, K4 match and naive oracle agrees")


def test_criterion_4_thresholds(announce):
    t6, t7 = thresholds(6), thresholds(7)
    got = [
        (rigidity_bound(6), action_thresholds(6)["out_z2"], action_thresholds(6)["sout_trivial"]),
        (rigidity_bound(7), action_thresholds(7)["out_z2"], action_thresholds(7)["sout_trivial"]),
    ]
    want = [(Fraction(15, 2), 21, 10), (Fraction(21, 2), 28, 14)]
    ok = got == want and t6.to_dict()["max_vertices"] == 7 and t7.out_action == 28
    announce(4, ok, f"n=6 {got[0]}, n=7 {got[1]} (exact)")


def test_criterion_5_bound_formula(announce):
    cases = {(3, 2): 2, (3, 3): 8, (4, 2): 7, (5, 2): 15}
    got = {k: min_dim_lower_bound(*k).bound for k in cases}
    alpha_ok = min_dim_lower_bound(3, 2, 1).bound == min_dim_lower_bound(3, 2, 2).bound == 2
    announce(5, got == cases and alpha_ok, f"{got}, alpha-independent at (3,2): {alpha_ok}")


def test_criterion_6_matrix_oracles(announce):
    start = time.perf_counter()
    g32 = enumerate_sl(CongruenceSpec(3, 2))
    checks = {
        "|SL_3(Z/2)| = 168": g32.order == 168,
        "SL_3(Z/2) perfect": is_perfect(g32),
        "SL_3(Z/2) centre trivial": scalar_center(CongruenceSpec(3, 2)).order == 1,
    }
    spec = CongruenceSpec(3, 2, 2)
    g34 = enumerate_sl(spec)
    kernel, rep = congruence_kernel(spec, group=g34)
    checks["|SL_3(Z/4)| = 43008"] = g34.order == 43008
    checks["|N| = 256"] = kernel.order == 256
    checks["Mennicke normal closure = N"] = rep.mennicke_ok
    elapsed = time.perf_counter() - start
    failed = [k for k, v in checks.items() if not v]
    announce(6, not failed and elapsed < 60,
             f"{len(checks) - len(failed)}/{len(checks)} checks, {elapsed:.2f}s (< 60s)"
             + (f", failed: {failed}" if failed else ""))


def _criterion_7_corpus():
    return [(g, decide(g, 6)) for g in all_labelled_graphs(5)]


def test_criterion_7_exhaustive_rigidity(announce):
    start = time.perf_counter()
    results = _criterion_7_corpus()
    trivial = sum(v.outcome == TRIVIAL and v.hypotheses.all_ok for _, v in results)
    boundary = {
        "K6": check_hypotheses(complete_graph(6), 6).failed() == ["equal_star"],
        "D6": check_hypotheses(discrete_graph(6), 6).failed() == ["join"],
        "D7": check_hypotheses(discrete_graph(7), 6).all_ok
        and decide(discrete_graph(7), 6).outcome == TRIVIAL,
    }
    elapsed = time.perf_counter() - start
    ok = trivial == 1024 and all(boundary.values()) and elapsed < 30
    announce(7, ok, f"{trivial}/1024 trivial with hypotheses passing, boundary {boundary}, "
             f"{elapsed:.2f}s (< 30s)")


# --- criterion 8 ------------------------------------------------------------------

KINDS = ("split", "clique_leaf", "discrete_leaf", "fallback")


def _nodes(d, path=()):
    yield path, d
    for i, child in enumerate(d.get("children", [])):
        yield from _nodes(child, path + (i,))


def _at(d, path):
    for i in path:
        d = d["children"][i]
    return d


def _flip(rng, g, labels):
    return sorted(set(labels) ^ {rng.choice(g.vertices)})


def _mutate(rng, g, node) -> str:
    if node["kind"] == "split":
        fields = ("subject", "sigma", "chain", "justification", "children", "kind")
    else:
        fields = ("subject", "size", "justification", "kind")
    f = rng.choice(fields)
    if f in ("subject", "sigma"):
        node[f] = _flip(rng, g, node[f])
    elif f == "size":
        node[f] += rng.choice((-2, -1, 1, 2))
    elif f == "justification":
        node[f] += " "
    elif f == "kind":
        node[f] = rng.choice([k for k in KINDS if k != node[f]])
    elif f == "children":
        node[f] = node[f][::-1] if rng.random() < 0.5 else node[f][:1]
    else:
        step = rng.choice(node["chain"])
        part = rng.choice(("set", "rule", "premises", "drop"))
        if part == "set":
            step["set"] = _flip(rng, g, step["set"])
        elif part == "rule":
            step["rule"] = rng.choice([r for r in RULES if r != step["rule"]])
        elif part == "drop":
            node["chain"].remove(step)
        elif step["premises"]:
            i = rng.randrange(len(step["premises"]))
            step["premises"][i] = _flip(rng, g, step["premises"][i])
        else:
            step["premises"].append([rng.choice(g.vertices)])
        f = "chain"
    return f


def _naive_chain_ok(g, node) -> bool:
    """Label-set replay of a split node's chain, sharing no code with the verifier."""
    h = to_nx(g).subgraph(node["subject"])
    subject = set(node["subject"])

    def lk(s):
        return naive_link(h, s) if s else set(subject)

    known: list[set] = []
    for step in node["chain"]:
        s, rule, prem = set(step["set"]), step["rule"], [set(p) for p in step["premises"]]
        if not s or not s <= subject or any(not p <= subject for p in prem):
            return False
        if rule == "link_of_non_cone":
            ok = len(prem) == 1 and prem[0] and not naive_is_cone(h, prem[0]) and lk(prem[0]) == s
        elif rule == "non_singleton_component":
            ok = not prem and len(s) >= 2 and any(s == set(c) for c in nx.connected_components(h))
        elif rule == "extended_star":
            ok = len(prem) == 1 and (lk(prem[0]) | lk(lk(prem[0]))) == s
        elif rule == "intersection":
            ok = len(prem) == 2 and all(p in known for p in prem) and prem[0] & prem[1] == s
        elif rule == "star_of_invariant":
            ok = len(prem) == 1 and prem[0] in known and (prem[0] | lk(prem[0])) == s
        elif rule == "whole":
            ok = not prem and s == subject
        else:
            ok = False
        if not ok:
            return False
        known.append(s)
    return bool(node["chain"]) and set(node["chain"][-1]["set"]) == set(node["sigma"])


def test_criterion_8_certificate_integrity(announce):
    results = _criterion_7_corpus()
    certs = [(g, certificate_to_dict(g, v.certificate)) for g, v in results]
    all_verify = all(verify_certificate(g, 6, d) for g, d in certs)
    by_kind: dict[str, list] = {"split": [], "clique_leaf": [], "discrete_leaf": []}
    for gi, (_, d) in enumerate(certs):
        for path, node in _nodes(d):
            by_kind[node["kind"]].append((gi, path))

    rng = random.Random(8)
    rejected = {k: 0 for k in by_kind}
    equivalent = disagreements = 0
    for kind, sites in by_kind.items():
        while rejected[kind] < 100:
            gi, path = rng.choice(sites)
            g, d = certs[gi]
            mutant = copy.deepcopy(d)
            node = _at(mutant, path)
            field = _mutate(rng, g, node)
            accepted = verify_certificate(g, 6, mutant)
            if field == "chain" and _naive_chain_ok(g, node):
                # an alternative correct derivation; the verifier must accept it
                equivalent += 1
                disagreements += not accepted
                continue
            if accepted:
                disagreements += 1
            rejected[kind] += 1
    ok = all_verify and disagreements == 0
    announce(8, ok, f"{len(certs)} certificates verify: {all_verify}; rejected {rejected}, "
             f"{equivalent} equivalent derivations redrawn, {disagreements} disagreements")


def test_criterion_9_z2_rank(announce):
    graphs, rng = corpus(100, 10, 99)
    exact = sum(z2_rank_witness(g).image_order == 2 ** len(g) and z2_rank_witness(g).certified
                for g in graphs)
    compare_ok = 0
    for g in graphs:
        g2 = rng.choice(graphs)
        verdict = no_injection_verdict(g, g2)
        compare_ok += verdict.applicable == (len(g2) < len(g))
    announce(9, exact == 100 and compare_ok == 100,
             f"witness exact on {exact}/100, compare correct on {compare_ok}/100")


def test_discrete_helper_sanity():
    # the exhaustive corpus really is every labelled graph on five vertices
    graphs = list(all_labelled_graphs(5))
    assert len({frozenset(g.edges()) for g in graphs}) == 1024
    assert sum(is_discrete(g, g.full) for g in graphs) == 1
    assert max(popcount(g.full) for g in graphs) == 5


def test_naive_chain_replay_agrees_with_verifier_on_chain_mutants():
    results = _criterion_7_corpus()
    certs = [(g, certificate_to_dict(g, v.certificate)) for g, v in results]
    splits = [(gi, path) for gi, (_, d) in enumerate(certs)
              for path, node in _nodes(d) if node["kind"] == "split"]
    rng = random.Random(80)
    equivalent = 0
    for _ in range(3000):
        gi, path = rng.choice(splits)
        g, d = certs[gi]
        mutant = copy.deepcopy(d)
        node = _at(mutant, path)
        step = rng.choice(node["chain"])
        if step["premises"]:
            i = rng.randrange(len(step["premises"]))
            step["premises"][i] = _flip(rng, g, step["premises"][i])
        else:
            step["rule"] = rng.choice([r for r in RULES if r != step["rule"]])
        naive = _naive_chain_ok(g, node)
        equivalent += naive
        assert verify_certificate(g, 6, mutant) == naive
    assert equivalent > 0
