from __future__ import annotations

import random
from itertools import combinations

import networkx as nx
from hypothesis import strategies as st

from raagcert.graph import Graph


def random_graph(rng: random.Random, k: int, density: float | None = None) -> Graph:
    density = rng.random() if density is None else density
    labels = [f"v{i:02d}" for i in range(k)]
    edges = [(a, b) for a, b in combinations(labels, 2) if rng.random() < density]
    return Graph(labels, edges)


@st.composite
def graphs(draw, min_vertices: int = 1, max_vertices: int = 8) -> Graph:
    k = draw(st.integers(min_vertices, max_vertices))
    pairs = list(combinations(range(k), 2))
    bits = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    labels = [f"v{i}" for i in range(k)]
    return Graph(labels, [(labels[a], labels[b]) for (a, b), on in zip(pairs, bits) if on])


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges())
    return h


# Naive oracles over label sets; deliberately share no code with the bitmask core.

def naive_link(h: nx.Graph, s: set) -> set:
    return {v for v in h.nodes if all(h.has_edge(v, x) for x in s)}


def naive_star(h: nx.Graph, s: set) -> set:
    return set(s) | naive_link(h, s)


def naive_is_cone(h: nx.Graph, s: set) -> bool:
    return any(all(h.has_edge(a, x) for x in s if x != a) for a in s)


def all_labelled_graphs(k: int):
    labels = [chr(ord("a") + i) for i in range(k)]
    pairs = list(combinations(labels, 2))
    for bits in range(1 << len(pairs)):
        yield Graph(labels, [e for i, e in enumerate(pairs) if bits >> i & 1])
