"""Subgraphs forced to be invariant under every pure outer action on A_Γ.

Each member of an :class:`InvariantFamily` carries a :class:`Derivation`
naming the rule that forces it.  The rules are:

* ``link_of_non_cone`` -- lk(Σ) for any Σ that is not a cone;
* ``non_singleton_component`` -- a connected component with ≥ 2 vertices;
* ``extended_star`` -- ŝt(Σ) for any Σ;
* ``intersection`` -- Σ ∩ Δ for invariant Σ, Δ;
* ``star_of_invariant`` -- st(Σ) for invariant Σ;
* ``whole`` -- Γ itself.

Members are kept in insertion order, and every premise that must itself be
invariant was inserted earlier, so the family doubles as a checkable proof.

The link and extended-star rules are instantiated through Galois-closed sets
(sets ``L`` with ``lk(lk(L)) = L``).  Every link is Galois-closed, and ŝt(Σ) only
depends on lk(Σ), so ŝt over the closed sets covers ŝt over all subsets.
For the link rule: if ``M = lk(L)`` is a cone with apex ``a`` and Σ ⊆ M has
``lk(Σ) = L``, then Σ must contain ``a`` (otherwise ``a ∈ lk(Σ) = L`` and
``a`` would be adjacent to itself), so Σ is a cone.  Hence ``L`` is a link
of a non-cone iff ``lk(L)`` is a non-cone, and no subset search is needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .graph import (
    Graph,
    VertexSet,
    connected_components,
    extended_star,
    is_cone,
    link,
    popcount,
    set_key,
    star,
)

DEFAULT_EXHAUSTIVE_CAP = 20

RULES = (
    "link_of_non_cone",
    "non_singleton_component",
    "extended_star",
    "intersection",
    "star_of_invariant",
    "whole",
)
# Rules whose premises must already be known invariant.
INVARIANT_PREMISES = frozenset({"intersection", "star_of_invariant"})
RULE_ARITY = {
    "link_of_non_cone": 1,
    "non_singleton_component": 0,
    "extended_star": 1,
    "intersection": 2,
    "star_of_invariant": 1,
    "whole": 0,
}

EXHAUSTIVE = "exhaustive"
RESTRICTED = "restricted"


@dataclass(frozen=True)
class Derivation:
    rule: str
    premises: tuple[VertexSet, ...] = ()

    def to_dict(self, g: Graph) -> dict:
        return {"rule": self.rule, "premises": [g.labels(p) for p in self.premises]}

    @classmethod
    def from_dict(cls, g: Graph, data: dict) -> Derivation:
        return cls(str(data["rule"]), tuple(g.mask(p) for p in data["premises"]))


def verify_derivation(g: Graph, member: VertexSet, derivation: Derivation) -> bool:
    """Replay one rule application; True iff it produces exactly ``member``."""
    rule, premises = derivation.rule, derivation.premises
    if rule not in RULE_ARITY or len(premises) != RULE_ARITY[rule]:
        return False
    try:
        g.check(member)
        for p in premises:
            g.check(p)
    except ValueError:
        return False
    if not member:
        return False
    if rule == "link_of_non_cone":
        (sigma,) = premises
        return bool(sigma) and not is_cone(g, sigma) and link(g, sigma) == member
    if rule == "non_singleton_component":
        return popcount(member) >= 2 and member in connected_components(g)
    if rule == "extended_star":
        return extended_star(g, premises[0]) == member
    if rule == "intersection":
        return premises[0] & premises[1] == member
    if rule == "star_of_invariant":
        return bool(premises[0]) and star(g, premises[0]) == member
    return member == g.full  # whole


def verify_chain(g: Graph, steps: list[tuple[VertexSet, Derivation]]) -> bool:
    """Every step replays, and invariant premises were established earlier."""
    known: set[VertexSet] = set()
    for member, d in steps:
        if not verify_derivation(g, member, d):
            return False
        if d.rule in INVARIANT_PREMISES and not all(p in known for p in d.premises):
            return False
        known.add(member)
    return True


@dataclass
class InvariantFamily:
    graph: Graph
    members: dict[VertexSet, Derivation]
    completeness_flag: str = EXHAUSTIVE
    notes: list[str] = field(default_factory=list)

    def __contains__(self, s: VertexSet) -> bool:
        return s in self.members

    def add(self, s: VertexSet, d: Derivation) -> bool:
        if not s or s in self.members:
            return False
        self.members[s] = d
        return True

    def proper(self) -> list[VertexSet]:
        return sorted((m for m in self.members if m != self.graph.full), key=set_key)

    def chain(self, target: VertexSet) -> list[tuple[VertexSet, Derivation]]:
        """The sub-derivation needed to establish ``target``, in dependency order."""
        needed = {target}
        stack = [target]
        while stack:
            d = self.members[stack.pop()]
            if d.rule in INVARIANT_PREMISES:
                for p in d.premises:
                    if p not in needed:
                        needed.add(p)
                        stack.append(p)
        return [(m, d) for m, d in self.members.items() if m in needed]

    def verify(self) -> bool:
        return verify_chain(self.graph, list(self.members.items()))

    def to_dict(self) -> dict:
        g = self.graph
        return {
            "completeness_flag": self.completeness_flag,
            "notes": self.notes,
            "members": [
                {"set": g.labels(m), **self.members[m].to_dict(g)}
                for m in sorted(self.members, key=set_key)
            ],
        }


def galois_closed_sets(g: Graph) -> list[VertexSet]:
    """All sets of the form lk(S), including lk(∅) = Γ and possibly ∅."""
    closed = {g.full}
    frontier = {g.full}
    atoms = {g.adj[v] for v in range(len(g))}
    while frontier:
        new = set()
        for c in frontier:
            for a in atoms:
                x = c & a
                if x not in closed:
                    new.add(x)
        closed |= new
        frontier = new
    return sorted(closed, key=set_key)


def seed_invariants(g: Graph, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP) -> InvariantFamily:
    fam = InvariantFamily(g, {})
    fam.add(g.full, Derivation("whole"))
    for comp in connected_components(g):
        if popcount(comp) >= 2:
            fam.add(comp, Derivation("non_singleton_component"))

    # Non-adjacent pairs are the non-cones used most often; seed them first so
    # their derivations are the ones recorded.
    for u, w in combinations(range(len(g)), 2):
        if not g.adjacent(u, w):
            pair = 1 << u | 1 << w
            fam.add(link(g, pair), Derivation("link_of_non_cone", (pair,)))
    for v in range(len(g)):
        fam.add(extended_star(g, 1 << v), Derivation("extended_star", (1 << v,)))

    if len(g) <= exhaustive_cap:
        closed = galois_closed_sets(g)
        for lk_set in closed:
            if lk_set and lk_set != g.full:
                m = link(g, lk_set)
                if m and not is_cone(g, m):
                    fam.add(lk_set, Derivation("link_of_non_cone", (m,)))
        for c in closed:
            fam.add(extended_star(g, c), Derivation("extended_star", (c,)))
    else:
        fam.completeness_flag = RESTRICTED
        fam.notes.append(
            f"graph has more than {exhaustive_cap} vertices: links of non-cones "
            "restricted to non-adjacent pairs, extended stars to single vertices"
        )
    _note_empty_link(fam)
    return fam


def _note_empty_link(fam: InvariantFamily) -> None:
    """Flag the lk(∅) convention whenever ŝt was evaluated on a set with empty link.

    ŝt is evaluated on every single vertex while seeding and on every member
    while closing, whether or not the result was new.
    """
    g = fam.graph
    probes = [1 << v for v in range(len(g))] + list(fam.members)
    if any(not link(g, x) for x in probes):
        note = "empty-link convention used: lk(∅) is the whole graph"
        if note not in fam.notes:
            fam.notes.append(note)


def close(family: InvariantFamily) -> InvariantFamily:
    """Least fixpoint under intersections, stars and extended stars."""
    g = family.graph
    out = InvariantFamily(
        g, dict(family.members), family.completeness_flag, list(family.notes)
    )
    queue = sorted(out.members, key=set_key)
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        candidates = [
            (star(g, x), Derivation("star_of_invariant", (x,))),
            (extended_star(g, x), Derivation("extended_star", (x,))),
        ]
        for y in sorted(out.members, key=set_key):
            if y != x:
                a, b = sorted((x, y), key=set_key)
                candidates.append((x & y, Derivation("intersection", (a, b))))
        for s, d in candidates:
            if out.add(s, d):
                queue.append(s)
    _note_empty_link(out)
    return out


def invariant_family(g: Graph, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP) -> InvariantFamily:
    return close(seed_invariants(g, exhaustive_cap))


def proper_invariants(g: Graph, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP) -> list[VertexSet]:
    return invariant_family(g, exhaustive_cap).proper()


def is_proper_cut(theta: VertexSet, sigma: VertexSet) -> bool:
    """∅ ⊊ θ ∩ σ ⊊ σ."""
    meet = theta & sigma
    return bool(meet) and meet != sigma

