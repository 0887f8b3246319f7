"""Exact representation-dimension bounds and finite-action thresholds."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt

from .errors import InputError, OutOfRangeError

MIN_RANK = 6  # the finite-action and rigidity statements need n >= 6


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, isqrt(p) + 1))


def _check_np(n: int, p: int) -> None:
    if n < 3:
        raise InputError(f"bound needs n >= 3, got n = {n}")
    if not is_prime(p):
        raise InputError(f"{p} is not prime")


@dataclass(frozen=True)
class BoundReport:
    n: int
    p: int
    bound: int
    case: str
    context: str
    alpha: int | None = None
    citations: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "alpha": self.alpha,
            "q": None if self.alpha is None else self.p**self.alpha,
            "bound": self.bound,
            "case": self.case,
            "context": self.context,
            "citations": list(self.citations),
        }


def _displayed_bound(n: int, p: int) -> tuple[int, str]:
    if (n, p) == (3, 2):
        return 2, "special_3_2"
    return p ** (n - 1) - 1, "general"


def min_dim_lower_bound(n: int, p: int, alpha: int = 1) -> BoundReport:
    """Least possible dimension of a non-trivial irreducible complex
    representation of SL_n(Z/p^alpha), for n >= 3.  Independent of ``alpha``."""
    _check_np(n, p)
    if alpha < 1:
        raise InputError(f"alpha must be >= 1, got {alpha}")
    bound, case = _displayed_bound(n, p)
    return BoundReport(
        n, p, bound, case, "linear: SL_n(Z/qZ), algebraically closed field of characteristic 0",
        alpha,
        (
            "reduce to PSL_n(Z/pZ) through the scalar centre and the congruence kernel",
            "Landazuri-Seitz minimal degree of projective representations of PSL_n(p)",
            "Mennicke: the congruence kernel is normally generated by p-th powers of elementary matrices",
        ),
    )


def landazuri_seitz_bound(n: int, p: int) -> BoundReport:
    """Minimal dimension of a non-trivial irreducible projective representation
    of PSL_n(Z/pZ) in characteristic other than p."""
    _check_np(n, p)
    bound, case = _displayed_bound(n, p)
    return BoundReport(
        n, p, bound, case, "projective: PSL_n(Z/pZ), field of characteristic other than p",
        None,
        ("Landazuri-Seitz (1974), minimal degrees of projective representations",),
    )


def _check_rank(n: int) -> None:
    if n < MIN_RANK:
        raise OutOfRangeError(f"the threshold statements need n >= {MIN_RANK}, got n = {n}")


def action_thresholds(n: int) -> dict[str, int]:
    """Largest set sizes on which Out(F_n) acts through Z/2, and SOut(F_n) trivially."""
    _check_rank(n)
    out_z2 = comb(n + 1, 2)
    return {"out_z2": out_z2, "sout_trivial": out_z2 // 2}


def rigidity_bound(n: int) -> Fraction:
    """½·C(n, 2): graphs need strictly fewer vertices than this."""
    _check_rank(n)
    return Fraction(comb(n, 2), 2)


def max_rigid_vertices(n: int) -> int:
    m = rigidity_bound(n)
    return -(-m.numerator // m.denominator) - 1


@dataclass(frozen=True)
class Thresholds:
    n: int
    m_rigidity: Fraction
    out_action: int
    sout_action: int
    gl_bound: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m_rigidity": str(self.m_rigidity),
            "max_vertices": max_rigid_vertices(self.n),
            "out_action": self.out_action,
            "sout_action": self.sout_action,
            "gl_bound": self.gl_bound,
        }


def thresholds(n: int) -> Thresholds:
    acts = action_thresholds(n)
    return Thresholds(n, rigidity_bound(n), acts["out_z2"], acts["sout_trivial"], n)
