"""Triviality of homomorphisms SOut(F_n) -> Out(A_Γ): hypothesis checks and
certificates.

A certificate is a tree over vertex sets.  A :class:`Split` node cuts its
subject along an invariant subgraph Σ (with a replayable derivation) and
recurses on Σ and on the complement; leaves are cliques on fewer than ``n``
vertices or discrete graphs on ``k ≠ n``, ``k < m`` vertices.  The verifier
re-derives everything from the graph and never trusts the builder.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Union

from .bounds import rigidity_bound, thresholds
from .errors import OutOfRangeError
from .graph import (
    Graph,
    VertexSet,
    equal_star_partition,
    has_discrete_join_factor,
    induced_subgraph,
    is_clique,
    is_discrete,
    iter_bits,
    lift_mask,
    link,
    popcount,
    set_key,
    star,
)
from .invariants import (
    DEFAULT_EXHAUSTIVE_CAP,
    Derivation,
    InvariantFamily,
    invariant_family,
    is_proper_cut,
    verify_chain,
)

JUSTIFICATION = {
    "split": (
        "Σ is invariant by the replayed derivation (pure outer actions preserve links "
        "of non-cones, non-singleton components, extended stars, and intersections and "
        "stars of invariant subgraphs; small finite actions are trivial, so the action "
        "is pure). Induction trivialises the induced action on Σ and the induced "
        "quotient action on the complement. A finite subgroup trivialising both acts "
        "trivially on H_1 and so lies in the Torelli subgroup, which is torsion-free "
        "(Toinet; Wade). SOut(F_n) is the normal closure of Alt_n, so the action is trivial."
    ),
    "clique_leaf": (
        "Out(A_Σ) = GL_k(Z) for a clique on k vertices, and every homomorphism "
        "SOut(F_n) -> GL_k(Z) with n >= 6 and k < n is trivial."
    ),
    "discrete_leaf": (
        "Out(A_Σ) = Out(F_k) for a discrete graph on k vertices, and every homomorphism "
        "SOut(F_n) -> Out(F_k) with k != n and k < ½·C(n,2) is trivial (Bridson-Vogtmann "
        "type rigidity); discrete pieces left after collapsing trivialised components "
        "reduce to this case."
    ),
    "fallback": (
        "No leaf or split applies to this subject. The residual cases are covered by "
        "the argument that excludes joins with D_n; it is cited here, not replayed."
    ),
}


# --- hypotheses -------------------------------------------------------------

@dataclass(frozen=True)
class Hypotheses:
    n: int
    vertex_count: int
    m: Fraction
    max_equal_star_class: int
    vertex_bound_ok: bool
    equal_star_ok: bool
    join_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.vertex_bound_ok and self.equal_star_ok and self.join_ok

    def failed(self) -> list[str]:
        names = ("vertex_bound", "equal_star", "join")
        flags = (self.vertex_bound_ok, self.equal_star_ok, self.join_ok)
        return [name for name, ok in zip(names, flags) if not ok]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "vertex_count": self.vertex_count,
            "m": str(self.m),
            "max_equal_star_class": self.max_equal_star_class,
            "vertex_bound_ok": self.vertex_bound_ok,
            "equal_star_ok": self.equal_star_ok,
            "join_ok": self.join_ok,
        }


def check_hypotheses(g: Graph, n: int) -> Hypotheses:
    m = rigidity_bound(n)  # raises for n < 6
    biggest = equal_star_partition(g).max_class_size()
    return Hypotheses(
        n=n,
        vertex_count=len(g),
        m=m,
        max_equal_star_class=biggest,
        vertex_bound_ok=len(g) < m,
        equal_star_ok=biggest < n,
        join_ok=not has_discrete_join_factor(g, n),
    )


# --- properties C and D -----------------------------------------------------

@dataclass
class CutWitness:
    subject: VertexSet
    theta: VertexSet | None
    derivation: Derivation | None = None
    recipe: tuple[int, int, int] | None = None  # (v, w, u)

    def to_dict(self, g: Graph) -> dict:
        out: dict = {"subject": g.labels(self.subject)}
        if self.theta is None:
            out["obstruction"] = True
            return out
        out["obstruction"] = False
        out["theta"] = g.labels(self.theta)
        if self.derivation is not None:
            out["derivation"] = self.derivation.to_dict(g)
        if self.recipe is not None:
            out["recipe"] = dict(zip("vwu", (g.vertices[x] for x in self.recipe)))
        return out


@dataclass
class PropertyReport:
    name: str
    n: int
    witnesses: list[CutWitness]

    @property
    def satisfied(self) -> bool:
        return all(w.theta is not None for w in self.witnesses)

    def obstructions(self) -> list[VertexSet]:
        return [w.subject for w in self.witnesses if w.theta is None]

    def to_dict(self, g: Graph) -> dict:
        return {
            "property": self.name,
            "n": self.n,
            "satisfied": self.satisfied,
            "vacuous": not self.witnesses,
            "subjects": [w.to_dict(g) for w in self.witnesses],
        }


def _any_cut(family: InvariantFamily, sigma: VertexSet) -> CutWitness:
    for theta in sorted(family.members, key=set_key):
        if is_proper_cut(theta, sigma):
            return CutWitness(sigma, theta, family.members[theta])
    return CutWitness(sigma, None)


def _star_recipe(g: Graph, family: InvariantFamily, sigma: VertexSet) -> CutWitness | None:
    """Two clique vertices with different stars give a cutting link of a pair."""
    for v, w in combinations(iter_bits(sigma), 2):
        st_v, st_w = star(g, 1 << v), star(g, 1 << w)
        if st_v == st_w:
            continue
        if st_v & ~st_w == 0:
            v, w, st_v, st_w = w, v, st_w, st_v
        u = (st_v & ~st_w & -(st_v & ~st_w)).bit_length() - 1
        theta = link(g, 1 << u | 1 << w)
        if theta in family and is_proper_cut(theta, sigma):
            return CutWitness(sigma, theta, family.members[theta], (v, w, u))
    return None


def property_C(g: Graph, family: InvariantFamily, n: int) -> PropertyReport:
    witnesses = []
    for sigma in sorted(family.members, key=set_key):
        if popcount(sigma) >= n and is_clique(g, sigma):
            witnesses.append(_star_recipe(g, family, sigma) or _any_cut(family, sigma))
    return PropertyReport("C", n, witnesses)


def property_D(g: Graph, family: InvariantFamily, n: int) -> PropertyReport:
    witnesses = [
        _any_cut(family, delta)
        for delta in sorted(family.members, key=set_key)
        if popcount(delta) == n and is_discrete(g, delta)
    ]
    return PropertyReport("D", n, witnesses)


# --- certificates -----------------------------------------------------------

@dataclass(frozen=True)
class CliqueLeaf:
    subject: VertexSet
    size: int


@dataclass(frozen=True)
class DiscreteLeaf:
    subject: VertexSet
    size: int


@dataclass(frozen=True)
class Fallback:
    subject: VertexSet
    reason: str


@dataclass(frozen=True)
class Split:
    subject: VertexSet
    sigma: VertexSet
    chain: tuple[tuple[VertexSet, Derivation], ...]
    children: tuple["CertificateNode", "CertificateNode"]


CertificateNode = Union[Split, CliqueLeaf, DiscreteLeaf, Fallback]


def iter_nodes(node: CertificateNode):
    yield node
    if isinstance(node, Split):
        for child in node.children:
            yield from iter_nodes(child)


def fallbacks(node: CertificateNode) -> list[Fallback]:
    return [x for x in iter_nodes(node) if isinstance(x, Fallback)]


def _leaf(sub: Graph, subject: VertexSet, n: int, m: Fraction) -> CertificateNode:
    k = popcount(subject)
    if is_clique(sub, sub.full):
        if k < n:
            return CliqueLeaf(subject, k)
        return Fallback(subject, f"clique on {k} vertices is not smaller than n = {n}")
    if is_discrete(sub, sub.full):
        if k != n and k < m:
            return DiscreteLeaf(subject, k)
        return Fallback(subject, f"discrete graph on {k} vertices (needs k != {n} and k < {m})")
    return Fallback(
        subject,
        "no proper invariant subgraph found, and the subject is neither a clique nor "
        "discrete (the computed family under-approximates forced invariance)",
    )


def build_certificate(
    g: Graph, n: int, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP
) -> CertificateNode:
    """Certificate tree for ``g``; contains :class:`Fallback` nodes where it fails."""
    m = rigidity_bound(n)
    if not len(g) < m:
        raise OutOfRangeError(f"graph has {len(g)} vertices; certificates need fewer than {m}")
    if not len(g):
        raise OutOfRangeError("graph has no vertices")

    def build(subject: VertexSet) -> CertificateNode:
        sub = induced_subgraph(g, subject)
        fam = invariant_family(sub, exhaustive_cap)
        proper = fam.proper()
        if not proper:
            return _leaf(sub, subject, n, m)
        local = proper[0]
        sigma = lift_mask(g, sub, local)
        chain = tuple((lift_mask(g, sub, s), _lift_derivation(g, sub, d)) for s, d in fam.chain(local))
        return Split(subject, sigma, chain, (build(sigma), build(subject & ~sigma)))

    return build(g.full)


def _lift_derivation(g: Graph, sub: Graph, d: Derivation) -> Derivation:
    return Derivation(d.rule, tuple(lift_mask(g, sub, p) for p in d.premises))


def _local(g: Graph, sub: Graph, mask: VertexSet) -> VertexSet:
    return sub.mask(g.labels(mask))


def _verify(g: Graph, n: int, m: Fraction, node: CertificateNode, subject: VertexSet) -> bool:
    if node.subject != subject or not subject:
        return False
    k = popcount(subject)
    if isinstance(node, CliqueLeaf):
        return node.size == k and is_clique(g, subject) and k < n
    if isinstance(node, DiscreteLeaf):
        return node.size == k and is_discrete(g, subject) and k != n and k < m
    if not isinstance(node, Split):
        return False
    sigma = node.sigma
    if not sigma or sigma & ~subject or sigma == subject or not node.chain:
        return False
    if any(s & ~subject or any(p & ~subject for p in d.premises) for s, d in node.chain):
        return False
    if node.chain[-1][0] != sigma:
        return False
    sub = induced_subgraph(g, subject)
    steps = [(_local(g, sub, s), Derivation(d.rule, tuple(_local(g, sub, p) for p in d.premises)))
             for s, d in node.chain]
    if not verify_chain(sub, steps):
        return False
    first, second = node.children
    return _verify(g, n, m, first, sigma) and _verify(g, n, m, second, subject & ~sigma)


def verify_certificate(g: Graph, n: int, node: CertificateNode | dict) -> bool:
    """Independently replay a certificate.  Malformed input is rejected, not raised."""
    try:
        m = rigidity_bound(n)
        if isinstance(node, dict):
            node = certificate_from_dict(g, node)
        if not len(g) < m:
            return False
        return _verify(g, n, m, node, g.full)
    except (ValueError, KeyError, TypeError, AttributeError):
        return False


# --- serialisation ------------------------------------------------------------

def certificate_to_dict(g: Graph, node: CertificateNode) -> dict:
    out: dict = {"subject": g.labels(node.subject)}
    if isinstance(node, Split):
        out.update(
            kind="split",
            sigma=g.labels(node.sigma),
            chain=[{"set": g.labels(s), **d.to_dict(g)} for s, d in node.chain],
            justification=JUSTIFICATION["split"],
            children=[certificate_to_dict(g, c) for c in node.children],
        )
    elif isinstance(node, CliqueLeaf):
        out.update(kind="clique_leaf", size=node.size, justification=JUSTIFICATION["clique_leaf"])
    elif isinstance(node, DiscreteLeaf):
        out.update(
            kind="discrete_leaf", size=node.size, justification=JUSTIFICATION["discrete_leaf"]
        )
    else:
        out.update(kind="fallback", reason=node.reason, justification=JUSTIFICATION["fallback"])
    return out


def _labels_mask(g: Graph, labels) -> VertexSet:
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ValueError("vertex set must be a list of labels")
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate label in vertex set")
    return g.mask(labels)


def _size(value) -> int:
    if type(value) is not int:
        raise ValueError("size must be an integer")
    return value


def certificate_from_dict(g: Graph, data: dict) -> CertificateNode:
    kind = data["kind"]
    if data.get("justification") != JUSTIFICATION.get(kind):
        raise ValueError(f"justification does not match node kind {kind!r}")
    subject = _labels_mask(g, data["subject"])
    if kind == "split":
        chain = tuple(
            (
                _labels_mask(g, step["set"]),
                Derivation(str(step["rule"]), tuple(_labels_mask(g, p) for p in step["premises"])),
            )
            for step in data["chain"]
        )
        children = data["children"]
        if len(children) != 2:
            raise ValueError("split needs exactly two children")
        return Split(
            subject,
            _labels_mask(g, data["sigma"]),
            chain,
            (certificate_from_dict(g, children[0]), certificate_from_dict(g, children[1])),
        )
    if kind == "clique_leaf":
        return CliqueLeaf(subject, _size(data["size"]))
    if kind == "discrete_leaf":
        return DiscreteLeaf(subject, _size(data["size"]))
    if kind == "fallback":
        return Fallback(subject, str(data["reason"]))
    raise ValueError(f"unknown node kind {kind!r}")


def proof_sketch(g: Graph, node: CertificateNode, depth: int = 0) -> list[str]:
    pad = "  " * depth
    subj = "{" + ", ".join(g.labels(node.subject)) + "}"
    if isinstance(node, Split):
        sigma = "{" + ", ".join(g.labels(node.sigma)) + "}"
        rule = node.chain[-1][1].rule
        lines = [
            f"{pad}split {subj} along invariant {sigma} ({rule}, {len(node.chain)} step derivation)",
            f"{pad}  because: {JUSTIFICATION['split']}",
        ]
        for child in node.children:
            lines += proof_sketch(g, child, depth + 1)
        return lines
    if isinstance(node, CliqueLeaf):
        return [f"{pad}clique {subj}, k = {node.size}: {JUSTIFICATION['clique_leaf']}"]
    if isinstance(node, DiscreteLeaf):
        return [f"{pad}discrete {subj}, k = {node.size}: {JUSTIFICATION['discrete_leaf']}"]
    return [f"{pad}FALLBACK {subj}: {node.reason}. {JUSTIFICATION['fallback']}"]


# --- verdicts -------------------------------------------------------------------

TRIVIAL = "trivial"
HYPOTHESES_FAIL = "hypotheses_fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class Verdict:
    outcome: str
    hypotheses: Hypotheses
    by: str | None = None
    failed: list[str] = field(default_factory=list)
    reason: str | None = None
    certificate: CertificateNode | None = None
    certificate_verified: bool = False

    def to_dict(self, g: Graph) -> dict:
        out = {
            "outcome": self.outcome,
            "by": self.by,
            "failed": self.failed,
            "reason": self.reason,
            "hypotheses": self.hypotheses.to_dict(),
            "thresholds": thresholds(self.hypotheses.n).to_dict(),
            "certificate_verified": self.certificate_verified,
            "certificate": None,
            "proof_sketch": [],
        }
        if self.certificate is not None:
            out["certificate"] = certificate_to_dict(g, self.certificate)
            out["proof_sketch"] = proof_sketch(g, self.certificate)
        return out


def decide(g: Graph, n: int, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP) -> Verdict:
    hyp = check_hypotheses(g, n)
    if not hyp.vertex_bound_ok:
        return Verdict(
            INCONCLUSIVE,
            hyp,
            failed=hyp.failed(),
            reason=f"{len(g)} vertices is not fewer than ½·C({n},2) = {hyp.m}; "
            "the rigidity statement does not apply",
        )
    cert = build_certificate(g, n, exhaustive_cap)
    ok = not fallbacks(cert) and verify_certificate(g, n, cert)
    if ok:
        return Verdict(TRIVIAL, hyp, by="certificate", certificate=cert, certificate_verified=True)
    if hyp.all_ok:
        return Verdict(
            TRIVIAL,
            hyp,
            by="theorem",
            reason="hypotheses hold; the certificate builder stopped at the fallback nodes shown",
            certificate=cert,
        )
    return Verdict(HYPOTHESES_FAIL, hyp, failed=hyp.failed(), certificate=cert)
