"""Brute-force oracles on SL_n(Z/q): enumeration, perfectness, scalar centre and
congruence kernels.  All arithmetic is exact integer arithmetic mod q.

Matrices are ``int64`` numpy arrays; a batch has shape ``(N, n, n)``.  A
matrix is identified with its base-q code (entries read row-major), which is
what the set operations below work on.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .bounds import is_prime
from .errors import CapabilityError, InputError

DEFAULT_ELEMENT_CAP = 10**6


@dataclass(frozen=True)
class CongruenceSpec:
    n: int
    p: int
    alpha: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise InputError(f"matrix size must be at least 2, got {self.n}")
        if not is_prime(self.p):
            raise InputError(f"{self.p} is not prime")
        if self.alpha < 1:
            raise InputError(f"alpha must be >= 1, got {self.alpha}")

    @property
    def q(self) -> int:
        return self.p**self.alpha


def sl_order(n: int, p: int, alpha: int = 1) -> int:
    """|SL_n(Z/p^alpha)| = p^((alpha-1)(n^2-1)) * p^(n(n-1)/2) * prod_{i=2..n} (p^i - 1)."""
    order = p ** ((alpha - 1) * (n * n - 1)) * p ** (n * (n - 1) // 2)
    for i in range(2, n + 1):
        order *= p**i - 1
    return order


def encode(mats: np.ndarray, q: int) -> np.ndarray:
    n = mats.shape[-1]
    weights = q ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
    return mats.reshape(*mats.shape[:-2], n * n) @ weights


def decode(codes: np.ndarray, n: int, q: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    digits = np.empty((codes.shape[0], n * n), dtype=np.int64)
    rest = codes.copy()
    for k in range(n * n - 1, -1, -1):
        digits[:, k] = rest % q
        rest //= q
    return digits.reshape(-1, n, n)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def elementary_matrix(n: int, q: int, i: int, j: int, value: int = 1) -> np.ndarray:
    """Identity plus ``value`` at row ``i``, column ``j`` (0-based, i != j), mod q."""
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise InputError(f"elementary matrix needs distinct indices in range, got ({i}, {j})")
    m = identity(n)
    m[i, j] = value % q
    return m


def batch_det(mats: np.ndarray, q: int) -> np.ndarray:
    """Determinants mod q of a batch of square integer matrices (Laplace expansion)."""
    k = mats.shape[-1]
    if k == 1:
        return mats[..., 0, 0] % q
    total = np.zeros(mats.shape[:-2], dtype=np.int64)
    for j in range(k):
        minor = np.delete(mats[..., 1:, :], j, axis=-1)
        term = mats[..., 0, j] * batch_det(minor, q) % q
        total = (total + term) % q if j % 2 == 0 else (total - term) % q
    return total


def _all_rows(n: int, q: int) -> np.ndarray:
    return np.array(list(product(range(q), repeat=n)), dtype=np.int64)


class MatrixGroup:
    """A finite group of n x n matrices over Z/q, stored as sorted codes."""

    def __init__(self, n: int, q: int, codes: np.ndarray, generators: list[np.ndarray] | None = None):
        self.n = n
        self.q = q
        self.codes = np.unique(np.asarray(codes, dtype=np.int64))
        self.generators = list(generators or [])

    @property
    def order(self) -> int:
        return int(self.codes.shape[0])

    @property
    def elements(self) -> np.ndarray:
        return decode(self.codes, self.n, self.q)

    def contains(self, mats: np.ndarray) -> np.ndarray:
        return np.isin(encode(np.asarray(mats).reshape(-1, self.n, self.n), self.q), self.codes)

    def __contains__(self, mat: np.ndarray) -> bool:
        return bool(self.contains(mat)[0])

    @classmethod
    def trivial(cls, n: int, q: int) -> MatrixGroup:
        return cls(n, q, encode(identity(n)[None], q))


def mat_inverse(m: np.ndarray, q: int) -> np.ndarray:
    """Inverse of an invertible matrix of finite order, by powering."""
    ident = identity(m.shape[-1])
    prev, cur = ident, m % q
    while not np.array_equal(cur, ident):
        prev, cur = cur, cur @ m % q
    return prev


def generate(gens: list[np.ndarray], n: int, q: int, cap: int = DEFAULT_ELEMENT_CAP) -> MatrixGroup:
    """Subgroup generated by ``gens`` (closure under right multiplication)."""
    seen = encode(identity(n)[None], q)
    frontier = identity(n)[None]
    while frontier.shape[0]:
        products = np.concatenate([frontier @ g % q for g in gens]) if gens else frontier[:0]
        codes, first = np.unique(encode(products, q), return_index=True)
        fresh = ~np.isin(codes, seen)
        seen = np.union1d(seen, codes[fresh])
        if seen.shape[0] > cap:
            raise CapabilityError("subgroup generation exceeded the element cap", cap)
        frontier = products[first[fresh]]
    return MatrixGroup(n, q, seen, gens)


def commutator(x: np.ndarray, y: np.ndarray, q: int) -> np.ndarray:
    return mat_inverse(x, q) @ mat_inverse(y, q) % q @ x % q @ y % q


def normal_closure(
    seeds: list[np.ndarray], group_gens: list[np.ndarray], n: int, q: int,
    cap: int = DEFAULT_ELEMENT_CAP,
) -> MatrixGroup:
    """Smallest subgroup containing ``seeds`` and normalised by ``group_gens``."""
    gens = [s % q for s in seeds]
    sub = generate(gens, n, q, cap)
    inverses = [mat_inverse(x, q) for x in group_gens]
    changed = True
    while changed:
        changed = False
        for x, x_inv in zip(group_gens, inverses):
            conj = np.stack([x_inv @ h % q @ x % q for h in gens]) if gens else None
            if conj is None:
                break
            outside = ~sub.contains(conj)
            if outside.any():
                gens.extend(conj[outside])
                sub = generate(gens, n, q, cap)
                changed = True
    return sub


def elementary_generators(n: int, q: int, value: int = 1) -> list[np.ndarray]:
    return [
        elementary_matrix(n, q, i, j, value) for i in range(n) for j in range(n) if i != j
    ]


def enumerate_sl(spec: CongruenceSpec, cap: int = DEFAULT_ELEMENT_CAP) -> MatrixGroup:
    """All determinant-1 matrices over Z/q.

    The first ``n - 1`` rows are enumerated with unimodularity pruning; the
    last row is then solved against the cofactor vector of that block.
    """
    n, p, q = spec.n, spec.p, spec.q
    expected = sl_order(n, p, spec.alpha)
    if expected > cap:
        raise CapabilityError(f"|SL_{n}(Z/{q})| = {expected} exceeds the element cap", cap)
    rows = _all_rows(n, q)
    # Over the local ring Z/p^a a row extends to an invertible matrix only if
    # it is non-zero mod p.
    rows_ok = rows[(rows % p).any(axis=1)]
    blocks = rows_ok[:, None, :]
    for _ in range(n - 2):
        blocks = np.concatenate(
            [np.repeat(blocks, rows_ok.shape[0], axis=0),
             np.tile(rows_ok, (blocks.shape[0], 1))[:, None, :]],
            axis=1,
        )
    cof = np.stack(
        [
            (-1) ** (n - 1 + j) * batch_det(np.delete(blocks, j, axis=-1), q) % q
            for j in range(n)
        ],
        axis=1,
    )
    keep = (cof % p).any(axis=1)
    blocks, cof = blocks[keep], cof[keep]
    hits = (cof @ rows.T) % q == 1
    bi, ri = np.nonzero(hits)
    mats = np.concatenate([blocks[bi], rows[ri][:, None, :]], axis=1)
    group = MatrixGroup(n, q, encode(mats, q), elementary_generators(n, q))
    if group.order != expected:
        raise AssertionError(f"enumerated {group.order} elements, expected {expected}")
    return group


def is_perfect(group: MatrixGroup, cap: int = DEFAULT_ELEMENT_CAP) -> bool:
    """True iff the commutator subgroup is the whole group.

    The commutator subgroup is the normal closure of the commutators of a
    generating set.
    """
    if group.order == 1:
        return True
    gens = group.generators
    if not gens or generate(gens, group.n, group.q, cap).order != group.order:
        gens = _greedy_generators(group, cap)
    comms = [commutator(x, y, group.q) for x in gens for y in gens]
    derived = normal_closure(comms, gens, group.n, group.q, cap)
    return derived.order == group.order


def _greedy_generators(group: MatrixGroup, cap: int) -> list[np.ndarray]:
    gens: list[np.ndarray] = []
    sub = MatrixGroup.trivial(group.n, group.q)
    for m in group.elements:
        if sub.order == group.order:
            break
        if m not in sub:
            gens.append(m)
            sub = generate(gens, group.n, group.q, cap)
    return gens


def scalar_center(spec: CongruenceSpec) -> MatrixGroup:
    """{λI : λ^n = 1 mod q}, checked to commute with the elementary generators."""
    n, q = spec.n, spec.q
    lambdas = [lam for lam in range(1, q) if pow(lam, n, q) == 1 % q] or [1]
    mats = np.stack([lam * identity(n) % q for lam in lambdas])
    for z in mats:
        for e in elementary_generators(n, q):
            if not np.array_equal(z @ e % q, e @ z % q):
                raise AssertionError("scalar matrix failed to commute with a generator")
    return MatrixGroup(n, q, encode(mats, q))


def center_by_search(group: MatrixGroup) -> MatrixGroup:
    """Elements commuting with every generator, found by scanning the group."""
    elems = group.elements
    central = np.ones(elems.shape[0], dtype=bool)
    for g in group.generators:
        central &= np.all((elems @ g) % group.q == (g @ elems) % group.q, axis=(1, 2))
    return MatrixGroup(group.n, group.q, group.codes[central])


@dataclass(frozen=True)
class KernelReport:
    spec: CongruenceSpec
    group_order: int
    kernel_order: int
    normal_closure_order: int
    index: int
    expected_index: int

    @property
    def mennicke_ok(self) -> bool:
        return self.normal_closure_order == self.kernel_order

    @property
    def surjective_ok(self) -> bool:
        return self.index == self.expected_index

    def to_dict(self) -> dict:
        return {
            "n": self.spec.n,
            "p": self.spec.p,
            "alpha": self.spec.alpha,
            "group_order": self.group_order,
            "kernel_order": self.kernel_order,
            "normal_closure_order": self.normal_closure_order,
            "mennicke_ok": self.mennicke_ok,
            "index": self.index,
            "expected_index": self.expected_index,
            "surjective_ok": self.surjective_ok,
        }


def congruence_kernel(
    spec: CongruenceSpec, cap: int = DEFAULT_ELEMENT_CAP, group: MatrixGroup | None = None
) -> tuple[MatrixGroup, KernelReport]:
    """Kernel of SL_n(Z/p^a) -> SL_n(Z/p), and the normal closure of the E_ij(p)."""
    if spec.alpha < 2:
        raise InputError("the congruence kernel is trivial for alpha = 1; need alpha >= 2")
    n, p, q = spec.n, spec.p, spec.q
    group = group or enumerate_sl(spec, cap)
    elems = group.elements
    in_kernel = np.all(elems % p == identity(n), axis=(1, 2))
    kernel = MatrixGroup(n, q, group.codes[in_kernel])
    closure = normal_closure(elementary_generators(n, q, p), group.generators, n, q, cap)
    report = KernelReport(
        spec,
        group.order,
        kernel.order,
        closure.order if bool(np.all(np.isin(closure.codes, kernel.codes))) else -1,
        group.order // kernel.order,
        sl_order(n, p, 1),
    )
    return kernel, report
