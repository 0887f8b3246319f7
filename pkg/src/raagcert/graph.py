"""Defining-graph calculus.

A vertex set is an ``int`` bitmask over the graph's vertex indices; vertex
``i`` is bit ``1 << i``.  Vertices are stored label-sorted, so index order,
mask order and report order all agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import CapabilityError, InputError

VertexSet = int

DEFAULT_AUT_CAP = 16
DEFAULT_AUT_LIST_LIMIT = 100_000


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def set_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Sort key: smallest first, then lexicographic on sorted indices."""
    return popcount(mask), tuple(iter_bits(mask))


class Graph:
    """Finite simplicial graph with label-sorted vertices and bitmask adjacency."""

    __slots__ = ("vertices", "adj", "_index")

    def __init__(self, vertices: Iterable[str], edges: Iterable[Sequence[str]] = ()):
        labels = [str(v) for v in vertices]
        if len(set(labels)) != len(labels):
            raise InputError("duplicate vertex label")
        self.vertices: tuple[str, ...] = tuple(sorted(labels))
        self._index = {v: i for i, v in enumerate(self.vertices)}
        adj = [0] * len(self.vertices)
        for edge in edges:
            u, v = edge
            if u == v:
                raise InputError(f"self-loop at {u!r}")
            i, j = self.index(u), self.index(v)
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        self.adj: tuple[int, ...] = tuple(adj)

    @classmethod
    def from_masks(cls, vertices: Sequence[str], adj: Sequence[int]) -> Graph:
        """Build from already-sorted labels and a symmetric adjacency list."""
        g = cls.__new__(cls)
        g.vertices = tuple(vertices)
        g._index = {v: i for i, v in enumerate(g.vertices)}
        g.adj = tuple(adj)
        return g

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.vertices, self.adj))

    def __repr__(self) -> str:
        return f"Graph(vertices={list(self.vertices)}, edges={self.edges()})"

    @property
    def full(self) -> VertexSet:
        return (1 << len(self.vertices)) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown vertex {label!r}") from None

    def mask(self, labels: Iterable[str]) -> VertexSet:
        m = 0
        for v in labels:
            m |= 1 << self.index(v)
        return m

    def labels(self, mask: VertexSet) -> list[str]:
        self.check(mask)
        return [self.vertices[i] for i in iter_bits(mask)]

    def check(self, mask: VertexSet) -> VertexSet:
        if mask < 0 or mask >> len(self.vertices):
            raise InputError(f"vertex set {mask:#x} is not contained in the graph")
        return mask

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[str, str]]:
        return [
            (self.vertices[i], self.vertices[j])
            for i in range(len(self.vertices))
            for j in iter_bits(self.adj[i] >> (i + 1) << (i + 1))
        ]

    def edge_count(self) -> int:
        return sum(popcount(a) for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])


# --- standard families -----------------------------------------------------

def _names(k: int, prefix: str) -> list[str]:
    width = len(str(k - 1)) if k > 1 else 1
    return [f"{prefix}{i:0{width}d}" for i in range(k)]


def path_graph(k: int, prefix: str = "") -> Graph:
    names = _names(k, prefix)
    return Graph(names, zip(names, names[1:]))


def cycle_graph(k: int, prefix: str = "") -> Graph:
    names = _names(k, prefix)
    return Graph(names, [(names[i], names[(i + 1) % k]) for i in range(k)])


def complete_graph(k: int, prefix: str = "") -> Graph:
    names = _names(k, prefix)
    return Graph(names, combinations(names, 2))


def discrete_graph(k: int, prefix: str = "") -> Graph:
    return Graph(_names(k, prefix))


def disjoint_union(a: Graph, b: Graph) -> Graph:
    return Graph(a.vertices + b.vertices, a.edges() + b.edges())


def graph_join(a: Graph, b: Graph) -> Graph:
    cross = [(u, v) for u in a.vertices for v in b.vertices]
    return Graph(a.vertices + b.vertices, a.edges() + b.edges() + cross)


# --- links, stars, cones ----------------------------------------------------

def link(g: Graph, s: VertexSet) -> VertexSet:
    """Vertices adjacent to every vertex of ``s``; ``link(g, 0)`` is everything."""
    g.check(s)
    out = g.full
    for v in iter_bits(s):
        out &= g.adj[v]
    return out


def star(g: Graph, s: VertexSet) -> VertexSet:
    return s | link(g, s)


def extended_star(g: Graph, s: VertexSet) -> VertexSet:
    lk = link(g, s)
    return lk | link(g, lk)


def is_cone(g: Graph, s: VertexSet) -> bool:
    g.check(s)
    if not s:
        raise InputError("is_cone needs a non-empty vertex set")
    return any(s & ~(1 << v) & ~g.adj[v] == 0 for v in iter_bits(s))


def is_clique(g: Graph, s: VertexSet) -> bool:
    return all(s & ~(1 << v) & ~g.adj[v] == 0 for v in iter_bits(s))


def is_discrete(g: Graph, s: VertexSet) -> bool:
    return all(g.adj[v] & s == 0 for v in iter_bits(s))


# --- components and joins ---------------------------------------------------

def _components(adj: Sequence[int], s: VertexSet) -> list[VertexSet]:
    out = []
    rest = s
    while rest:
        seed = rest & -rest
        comp = frontier = seed
        while frontier:
            grow = 0
            for v in iter_bits(frontier):
                grow |= adj[v]
            frontier = grow & s & ~comp
            comp |= frontier
        out.append(comp)
        rest &= ~comp
    return out


def connected_components(g: Graph, s: VertexSet | None = None) -> list[VertexSet]:
    """Components of the subgraph induced on ``s``, ordered by lowest vertex."""
    s = g.full if s is None else g.check(s)
    return _components(g.adj, s)


def complement(g: Graph) -> Graph:
    full = g.full
    return Graph.from_masks(g.vertices, [full & ~a & ~(1 << i) for i, a in enumerate(g.adj)])


@dataclass(frozen=True)
class JoinDecomposition:
    factors: tuple[VertexSet, ...]
    clique_factor: VertexSet

    def singleton_factors(self) -> list[VertexSet]:
        return [f for f in self.factors if popcount(f) == 1]


def join_decomposition(g: Graph, s: VertexSet | None = None) -> JoinDecomposition:
    s = g.full if s is None else g.check(s)
    if not s:
        raise InputError("join decomposition of the empty graph is undefined")
    co_adj = [g.full & ~a & ~(1 << i) for i, a in enumerate(g.adj)]
    factors = tuple(_components(co_adj, s))
    clique = 0
    for f in factors:
        if popcount(f) == 1:
            clique |= f
    return JoinDecomposition(factors, clique)


def has_discrete_join_factor(g: Graph, n: int) -> bool:
    """True iff ``g`` is the join of the edgeless graph on ``n`` vertices with
    some (possibly empty) graph."""
    if not len(g):
        return False
    return any(
        popcount(f) == n and is_discrete(g, f) for f in join_decomposition(g).factors
    )


# --- equal stars ------------------------------------------------------------

@dataclass(frozen=True)
class EqualStarPartition:
    classes: tuple[VertexSet, ...]

    def max_class_size(self) -> int:
        return max((popcount(c) for c in self.classes), default=0)


def equal_star_partition(g: Graph) -> EqualStarPartition:
    by_star: dict[int, int] = {}
    for v in range(len(g)):
        st = g.adj[v] | 1 << v
        by_star[st] = by_star.get(st, 0) | 1 << v
    classes = tuple(sorted(by_star.values(), key=lambda m: (m & -m)))
    for c in classes:
        if popcount(c) > 1 and not is_clique(g, c):
            raise AssertionError("vertices with equal stars must span a clique")
    return EqualStarPartition(classes)


# --- automorphisms ----------------------------------------------------------

def refined_colouring(g: Graph) -> list[int]:
    """Stable colouring from degrees refined by neighbour-colour multisets."""
    colours = [g.degree(v) for v in range(len(g))]
    n_classes = len(set(colours))
    while True:
        sigs = [
            (colours[v], tuple(sorted(colours[u] for u in iter_bits(g.adj[v]))))
            for v in range(len(g))
        ]
        palette = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        colours = [palette[sig] for sig in sigs]
        if len(palette) == n_classes:
            return colours
        n_classes = len(palette)


class _AutSearch:
    def __init__(self, g: Graph):
        self.g = g
        self.colours = refined_colouring(g)
        sizes: dict[int, int] = {}
        for c in self.colours:
            sizes[c] = sizes.get(c, 0) + 1
        # Assign vertices in small colour classes first; they prune hardest.
        self.order = sorted(range(len(g)), key=lambda v: (sizes[self.colours[v]], v))

    def extensions(self, forced: dict[int, int] | None = None) -> Iterator[tuple[int, ...]]:
        g, colours = self.g, self.colours
        forced = forced or {}
        for x, y in forced.items():
            if colours[x] != colours[y]:
                return
        order = list(forced) + [v for v in self.order if v not in forced]
        image = [-1] * len(g)
        used = 0

        def consistent(x: int, y: int, depth: int) -> bool:
            if used >> y & 1 or colours[x] != colours[y]:
                return False
            for k in range(depth):
                px = order[k]
                if g.adjacent(x, px) != g.adjacent(y, image[px]):
                    return False
            return True

        def search(depth: int) -> Iterator[tuple[int, ...]]:
            nonlocal used
            if depth == len(order):
                yield tuple(image)
                return
            x = order[depth]
            candidates = [forced[x]] if x in forced else range(len(g))
            for y in candidates:
                if consistent(x, y, depth):
                    image[x] = y
                    used |= 1 << y
                    yield from search(depth + 1)
                    used &= ~(1 << y)
                    image[x] = -1

        yield from search(0)

    def exists(self, forced: dict[int, int]) -> bool:
        return next(self.extensions(forced), None) is not None


def _check_cap(g: Graph, cap: int) -> None:
    if len(g) > cap:
        raise CapabilityError(
            f"automorphism search on {len(g)} vertices exceeds the vertex cap", cap
        )


def automorphism_group_order(g: Graph, cap: int = DEFAULT_AUT_CAP) -> int:
    """|Aut(g)| via a stabiliser chain; never lists the group."""
    _check_cap(g, cap)
    search = _AutSearch(g)
    order = 1
    fixed: dict[int, int] = {}
    for v in range(len(g)):
        orbit = sum(
            1
            for u in range(len(g))
            if search.colours[u] == search.colours[v] and search.exists({**fixed, v: u})
        )
        order *= orbit
        fixed[v] = v
    return order


def graph_automorphisms(
    g: Graph, cap: int = DEFAULT_AUT_CAP, list_limit: int = DEFAULT_AUT_LIST_LIMIT
) -> list[tuple[int, ...]]:
    """All automorphisms as image tuples ``p`` with ``p[i]`` the image of vertex ``i``.

    The list is checked against the stabiliser-chain order, so a complete
    result is guaranteed to be the whole group.
    """
    _check_cap(g, cap)
    order = automorphism_group_order(g, cap)
    if order > list_limit:
        raise CapabilityError(
            f"automorphism group has order {order}; listing it exceeds the list limit",
            list_limit,
        )
    perms = sorted(_AutSearch(g).extensions())
    for p in perms:
        if not is_automorphism(g, p):
            raise AssertionError(f"search produced a non-automorphism {p}")
    if len(perms) != order:
        raise AssertionError(f"listed {len(perms)} automorphisms, expected {order}")
    return perms


def is_automorphism(g: Graph, perm: Sequence[int]) -> bool:
    if sorted(perm) != list(range(len(g))):
        return False
    return all(
        apply_perm(perm, g.adj[v]) == g.adj[perm[v]] for v in range(len(g))
    )


def apply_perm(perm: Sequence[int], s: VertexSet) -> VertexSet:
    out = 0
    for v in iter_bits(s):
        out |= 1 << perm[v]
    return out


def compose_perms(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """``p`` after ``q``."""
    return tuple(p[q[i]] for i in range(len(q)))


def invert_perm(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


# --- subgraphs --------------------------------------------------------------

def induced_subgraph(g: Graph, s: VertexSet) -> Graph:
    g.check(s)
    idx = list(iter_bits(s))
    pos = {v: k for k, v in enumerate(idx)}
    adj = []
    for v in idx:
        m = 0
        for u in iter_bits(g.adj[v] & s):
            m |= 1 << pos[u]
        adj.append(m)
    return Graph.from_masks([g.vertices[v] for v in idx], adj)


def lift_mask(g: Graph, sub: Graph, mask: VertexSet) -> VertexSet:
    """Translate a vertex set of ``sub`` (an induced subgraph of ``g``) into ``g``."""
    return g.mask(sub.labels(mask))

