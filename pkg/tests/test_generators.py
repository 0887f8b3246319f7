from __future__ import annotations

import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from raagcert.errors import InputError
from raagcert.generators import (
    Inversion,
    PartialConjugation,
    Symmetry,
    Transvection,
    abelianization_image,
    compose_letter_maps,
    enumerate_generators,
    letter_map,
    no_injection_verdict,
    out0_split,
    z2_rank_witness,
)
from raagcert.graph import (
    complete_graph,
    cycle_graph,
    discrete_graph,
    graph_automorphisms,
    path_graph,
)

from .conftest import graphs, naive_link, naive_star, random_graph, to_nx


def naive_counts(g):
    """(inversions, transvections, non-redundant partial conjugations, symmetries)."""
    h = to_nx(g)
    vs = list(h.nodes)
    transvections = sum(
        1 for v in vs for w in vs if v != w and naive_link(h, {w}) <= naive_star(h, {v})
    )
    nonredundant = 0
    for v in vs:
        rest = h.subgraph(set(vs) - naive_star(h, {v}))
        comps = nx.number_connected_components(rest) if rest.number_of_nodes() else 0
        if comps >= 2:
            nonredundant += comps
    symmetries = sum(1 for _ in nx.algorithms.isomorphism.GraphMatcher(h, h).isomorphisms_iter())
    return len(vs), transvections, nonredundant, symmetries


def counts_tuple(g):
    c = enumerate_generators(g).counts()
    return (c["inversions"], c["transvections"], c["partial_conjugations_nonredundant"],
            c["symmetries"])


@pytest.mark.parametrize(
    "g, expected",
    [
        (path_graph(3), (3, 4, 0, 2)),
        (cycle_graph(5), (5, 0, 0, 10)),
        (complete_graph(4), (4, 12, 0, 24)),
        (discrete_graph(2), (2, 2, 0, 2)),
    ],
    ids=["P3", "C5", "K4", "D2"],
)
def test_inventory_counts(g, expected):
    assert counts_tuple(g) == expected
    assert naive_counts(g) == expected


def test_c5_partial_conjugations_are_all_redundant():
    inv = enumerate_generators(cycle_graph(5))
    assert len(inv.partial_conjugations) == 5
    assert all(pc.redundant_in_out for pc in inv.partial_conjugations)


def test_d3_partial_conjugations():
    inv = enumerate_generators(discrete_graph(3))
    assert len(inv.partial_conjugations) == 6
    assert not any(pc.redundant_in_out for pc in inv.partial_conjugations)


@given(graphs(max_vertices=7))
@settings(max_examples=120, deadline=None)
def test_counts_match_naive_oracle(g):
    assert counts_tuple(g) == naive_counts(g)


def test_out0_split_separates_symmetries():
    g = cycle_graph(5)
    pure, q = out0_split(g)
    assert q == 10
    assert pure.symmetries == ()
    assert len(pure.pure()) == 5 + 5


def test_symmetries_listed_are_automorphisms():
    g = path_graph(4)
    inv = enumerate_generators(g)
    assert sorted(s.perm for s in inv.symmetries) == sorted(graph_automorphisms(g))


def test_abelianization_images():
    g = path_graph(3)
    a, b, c = range(3)
    assert np.array_equal(abelianization_image(g, Inversion(b)), np.diag([1, -1, 1]))
    t = abelianization_image(g, Transvection(b, a))  # a -> ab
    expected = np.eye(3, dtype=np.int64)
    expected[b, a] = 1
    assert np.array_equal(t, expected)
    pc = PartialConjugation(b, 0, False)
    with pytest.raises(InputError):
        abelianization_image(g, pc)
    sym = abelianization_image(g, Symmetry((2, 1, 0)))
    assert np.array_equal(sym @ np.array([1, 0, 0]), np.array([0, 0, 1]))


def test_invalid_transvection_rejected():
    with pytest.raises(InputError):
        abelianization_image(path_graph(3), Transvection(0, 1))


def test_partial_conjugations_act_trivially_on_h1():
    g = discrete_graph(3)
    for pc in enumerate_generators(g).partial_conjugations:
        assert np.array_equal(abelianization_image(g, pc), np.eye(3, dtype=np.int64))


def test_letter_maps_agree_with_matrices():
    g = cycle_graph(5)
    sym = Symmetry(graph_automorphisms(g)[3])
    inv = Inversion(2)
    composed = compose_letter_maps(letter_map(g, sym), letter_map(g, inv))
    m = abelianization_image(g, sym) @ abelianization_image(g, inv)
    for u, (target, sign) in enumerate(composed):
        col = np.zeros(5, dtype=np.int64)
        col[target] = sign
        assert np.array_equal(m[:, u], col)


def _brute_diagonal_subgroup_order(g):
    """Close the inversion images under multiplication and count."""
    gens = [abelianization_image(g, Inversion(v)) for v in range(len(g))]
    seen = {np.eye(len(g), dtype=np.int64).tobytes()}
    frontier = [np.eye(len(g), dtype=np.int64)]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = x @ s
                if y.tobytes() not in seen:
                    seen.add(y.tobytes())
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def test_z2_witness_matches_brute_force():
    rng = random.Random(7)
    for _ in range(15):
        g = random_graph(rng, rng.randint(1, 7))
        w = z2_rank_witness(g)
        assert w.certified
        assert w.image_order == _brute_diagonal_subgroup_order(g) == 2 ** len(g)


def test_compare_direction():
    big, small = cycle_graph(5), path_graph(3)
    assert no_injection_verdict(big, small).applicable
    assert not no_injection_verdict(small, big).applicable
    assert not no_injection_verdict(big, cycle_graph(5, "x")).applicable
    d = no_injection_verdict(big, small).to_dict(big, small)
    assert d["verdict"] == "no_injection"
    assert (d["source_z2_rank"], d["target_z2_rank"]) == (5, 3)
