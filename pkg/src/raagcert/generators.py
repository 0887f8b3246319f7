"""Laurence generators of Aut(A_Γ), abelianisation images and the Z/2-rank witness.

Matrix convention: an automorphism acts on H_1(A_Γ) = Z^|Γ| with basis
``e_v``, and column ``v`` of its matrix is the image of ``e_v``.  A
transvection ``w -> wv`` therefore has a single off-diagonal ``1`` at row
``v``, column ``w``.  With this convention ``image(f ∘ h) = image(f) @ image(h)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InputError
from .graph import (
    DEFAULT_AUT_CAP,
    DEFAULT_AUT_LIST_LIMIT,
    Graph,
    VertexSet,
    automorphism_group_order,
    connected_components,
    graph_automorphisms,
    is_automorphism,
    iter_bits,
    star,
)


@dataclass(frozen=True)
class Inversion:
    v: int


@dataclass(frozen=True)
class PartialConjugation:
    v: int
    component: VertexSet
    redundant_in_out: bool = False


@dataclass(frozen=True)
class Transvection:
    v: int
    w: int  # w -> wv


@dataclass(frozen=True)
class Symmetry:
    perm: tuple[int, ...]


Generator = Union[Inversion, PartialConjugation, Transvection, Symmetry]


def generator_to_dict(g: Graph, gen: Generator) -> dict:
    if isinstance(gen, Inversion):
        return {"kind": "inversion", "v": g.vertices[gen.v]}
    if isinstance(gen, Transvection):
        return {"kind": "transvection", "v": g.vertices[gen.v], "w": g.vertices[gen.w]}
    if isinstance(gen, PartialConjugation):
        return {
            "kind": "partial_conjugation",
            "v": g.vertices[gen.v],
            "component": g.labels(gen.component),
            "redundant_in_out": gen.redundant_in_out,
        }
    return {
        "kind": "symmetry",
        "map": {g.vertices[i]: g.vertices[j] for i, j in enumerate(gen.perm)},
    }


@dataclass(frozen=True)
class GeneratorInventory:
    inversions: tuple[Inversion, ...]
    partial_conjugations: tuple[PartialConjugation, ...]
    transvections: tuple[Transvection, ...]
    symmetries: tuple[Symmetry, ...]
    symmetry_order: int
    symmetries_listed: bool = True

    def counts(self) -> dict[str, int]:
        return {
            "inversions": len(self.inversions),
            "partial_conjugations": len(self.partial_conjugations),
            "partial_conjugations_nonredundant": sum(
                not pc.redundant_in_out for pc in self.partial_conjugations
            ),
            "transvections": len(self.transvections),
            "symmetries": self.symmetry_order,
        }

    def pure(self) -> list[Generator]:
        return [*self.inversions, *self.partial_conjugations, *self.transvections]

    def to_dict(self, g: Graph, counts_only: bool = False) -> dict:
        out: dict = {"counts": self.counts()}
        if not counts_only:
            out["inversions"] = [generator_to_dict(g, x) for x in self.inversions]
            out["partial_conjugations"] = [
                generator_to_dict(g, x) for x in self.partial_conjugations
            ]
            out["transvections"] = [generator_to_dict(g, x) for x in self.transvections]
            out["symmetries_listed"] = self.symmetries_listed
            out["symmetries"] = [generator_to_dict(g, x) for x in self.symmetries]
        return out


def dominators(g: Graph, w: int) -> VertexSet:
    """All ``v != w`` with ``st(v) ⊇ lk(w)``.

    ``u ∈ st(v)`` iff ``v ∈ st(u)``, so the dominators of ``w`` are the
    intersection of the stars of its neighbours.
    """
    out = g.full
    for u in iter_bits(g.adj[w]):
        out &= g.adj[u] | 1 << u
    return out & ~(1 << w)


def enumerate_transvections(g: Graph) -> list[Transvection]:
    found = [Transvection(v, w) for w in range(len(g)) for v in iter_bits(dominators(g, w))]
    return sorted(found, key=lambda t: (t.v, t.w))


def enumerate_partial_conjugations(g: Graph) -> list[PartialConjugation]:
    out = []
    for v in range(len(g)):
        comps = connected_components(g, g.full & ~star(g, 1 << v))
        for c in comps:
            out.append(PartialConjugation(v, c, redundant_in_out=len(comps) == 1))
    return out


def enumerate_generators(
    g: Graph, cap: int = DEFAULT_AUT_CAP, list_limit: int = DEFAULT_AUT_LIST_LIMIT
) -> GeneratorInventory:
    order = automorphism_group_order(g, cap)
    listed = order <= list_limit
    symmetries = (
        tuple(Symmetry(p) for p in graph_automorphisms(g, cap, list_limit)) if listed else ()
    )
    return GeneratorInventory(
        inversions=tuple(Inversion(v) for v in range(len(g))),
        partial_conjugations=tuple(enumerate_partial_conjugations(g)),
        transvections=tuple(enumerate_transvections(g)),
        symmetries=symmetries,
        symmetry_order=order,
        symmetries_listed=listed,
    )


def out0_split(g: Graph, cap: int = DEFAULT_AUT_CAP) -> tuple[GeneratorInventory, int]:
    """Generators of the pure part, and the order of the graph-symmetry group Q."""
    order = automorphism_group_order(g, cap)
    pure = GeneratorInventory(
        inversions=tuple(Inversion(v) for v in range(len(g))),
        partial_conjugations=tuple(enumerate_partial_conjugations(g)),
        transvections=tuple(enumerate_transvections(g)),
        symmetries=(),
        symmetry_order=1,
    )
    return pure, order


def _check_generator(g: Graph, gen: Generator) -> None:
    k = len(g)
    if isinstance(gen, Inversion):
        if not 0 <= gen.v < k:
            raise InputError(f"inversion vertex {gen.v} not in graph")
    elif isinstance(gen, Transvection):
        if not (0 <= gen.v < k and 0 <= gen.w < k) or not dominators(g, gen.w) >> gen.v & 1:
            raise InputError(f"({gen.v}, {gen.w}) is not a transvection of this graph")
    elif isinstance(gen, PartialConjugation):
        if not 0 <= gen.v < k or gen.component not in connected_components(
            g, g.full & ~star(g, 1 << gen.v)
        ):
            raise InputError("component is not a component of the complement of the star")
    elif isinstance(gen, Symmetry):
        if len(gen.perm) != k or not is_automorphism(g, gen.perm):
            raise InputError("permutation is not a graph automorphism")
    else:
        raise InputError(f"unknown generator {gen!r}")


def abelianization_image(g: Graph, gen: Generator) -> np.ndarray:
    _check_generator(g, gen)
    m = np.eye(len(g), dtype=np.int64)
    if isinstance(gen, Inversion):
        m[gen.v, gen.v] = -1
    elif isinstance(gen, Transvection):
        m[gen.v, gen.w] = 1
    elif isinstance(gen, Symmetry):
        m = np.zeros((len(g), len(g)), dtype=np.int64)
        for u, image in enumerate(gen.perm):
            m[image, u] = 1
    return m


# --- monomial automorphisms ---------------------------------------------------
# Inversions and graph symmetries send each generator to a generator or its
# inverse, so they are stored as (target, sign) per vertex.

LetterMap = tuple[tuple[int, int], ...]


def letter_map(g: Graph, gen: Inversion | Symmetry) -> LetterMap:
    if isinstance(gen, Inversion):
        return tuple((u, -1 if u == gen.v else 1) for u in range(len(g)))
    return tuple((gen.perm[u], 1) for u in range(len(g)))


def compose_letter_maps(f: LetterMap, h: LetterMap) -> LetterMap:
    """``f`` after ``h``."""
    out = []
    for target, sign in h:
        t2, s2 = f[target]
        out.append((t2, sign * s2))
    return tuple(out)


def identity_letter_map(k: int) -> LetterMap:
    return tuple((u, 1) for u in range(k))


def _f2_rank(rows: list[int]) -> int:
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


@dataclass
class Z2RankWitness:
    vertex_count: int
    inversions: list[Inversion]
    involutions_ok: bool
    commute_ok: bool
    diagonal_ok: bool
    image_order: int
    notes: list[str] = field(default_factory=list)

    @property
    def lower_bound(self) -> int:
        return self.image_order.bit_length() - 1

    @property
    def certified(self) -> bool:
        return (
            self.involutions_ok
            and self.commute_ok
            and self.diagonal_ok
            and self.image_order == 2**self.vertex_count
        )

    def to_dict(self, g: Graph) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "inversions": [g.vertices[x.v] for x in self.inversions],
            "involutions_ok": self.involutions_ok,
            "commute_ok": self.commute_ok,
            "diagonal_ok": self.diagonal_ok,
            "image_order": self.image_order,
            "z2_rank_lower_bound": self.lower_bound,
            "z2_rank_upper_bound": self.vertex_count,
            "certified": self.certified,
            "notes": self.notes,
        }


def z2_rank_witness(g: Graph) -> Z2RankWitness:
    k = len(g)
    invs = [Inversion(v) for v in range(k)]
    maps = [letter_map(g, x) for x in invs]
    ident = identity_letter_map(k)
    involutions_ok = all(compose_letter_maps(m, m) == ident for m in maps)
    commute_ok = all(
        compose_letter_maps(a, b) == compose_letter_maps(b, a)
        for i, a in enumerate(maps)
        for b in maps[i + 1 :]
    )
    images = [abelianization_image(g, x) for x in invs]
    diagonal_ok = all(
        np.array_equal(m, np.diag(np.diag(m))) and set(np.diag(m).tolist()) <= {1, -1}
        for m in images
    )
    # diag(±1) matrices form (Z/2)^k; a sign pattern is a vector over F_2.
    rows = [sum(1 << i for i, d in enumerate(np.diag(m)) if d == -1) for m in images]
    order = 2 ** _f2_rank(rows)
    notes = [
        f"lower bound {k}: the {k} inversions are commuting involutions with "
        f"linearly independent images in GL_{k}(Z)",
        f"upper bound {k}: the Torelli kernel of Out(A_Γ) -> GL_{k}(Z) is torsion-free "
        "(Toinet; Wade), and commuting involutions in GL_k(R) diagonalise simultaneously",
    ]
    return Z2RankWitness(k, invs, involutions_ok, commute_ok, diagonal_ok, order, notes)


@dataclass
class InjectionVerdict:
    applicable: bool
    statement: str
    source_rank: int
    target_rank: int
    source_witness: Z2RankWitness
    target_witness: Z2RankWitness

    def to_dict(self, g: Graph, g2: Graph) -> dict:
        return {
            "verdict": "no_injection" if self.applicable else "inapplicable",
            "statement": self.statement,
            "source_z2_rank": self.source_rank,
            "target_z2_rank": self.target_rank,
            "source_witness": self.source_witness.to_dict(g),
            "target_witness": self.target_witness.to_dict(g2),
        }


def no_injection_verdict(g: Graph, g2: Graph) -> InjectionVerdict:
    w1, w2 = z2_rank_witness(g), z2_rank_witness(g2)
    if len(g2) < len(g):
        statement = (
            f"no injective homomorphism Out(A_Γ) -> Out(A_Γ'): Z/2-rank {len(g)} "
            f"exceeds Z/2-rank {len(g2)}"
        )
        return InjectionVerdict(True, statement, len(g), len(g2), w1, w2)
    statement = (
        f"theorem inapplicable: target has {len(g2)} vertices, not fewer than {len(g)}"
    )
    return InjectionVerdict(False, statement, len(g), len(g2), w1, w2)
