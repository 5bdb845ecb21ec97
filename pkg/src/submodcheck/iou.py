"""Closed-form marginal differences of the Jaccard index and their witnesses.

Fix a reference set Y and A ⊂ B with |A∩Y| = |B∩Y| = n > 0, and write
a = |A∪Y|, b = |B∪Y| (so a < b).  The diminishing-returns difference

    R = (IoU(A∪{x}) − IoU(A)) − (IoU(B∪{x}) − IoU(B))

has two closed forms depending on where x lives:

* x outside Y∪B:  R = n · (1/((b+1)b) − 1/((a+1)a)) < 0, so IoU is not
  submodular;
* x in Y∖B:       R = 1/a − 1/b > 0, so −IoU is not submodular either.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterator

from .check import CheckMode, ViolationCertificate
from .setfn import GroundSet, IoU, NegIoU, SetFunctionError, SubsetMask, mask_elements


class Case(enum.Enum):
    OUTSIDE_YB = "outside-yb"
    INSIDE_Y = "inside-y"


@dataclass(frozen=True)
class CaseOutsideParams:
    ab_n: int
    a_d: int
    b_d: int

    def __post_init__(self) -> None:
        if not 0 < self.ab_n <= self.a_d < self.b_d:
            raise ValueError(f"need 0 < ab_n <= a_d < b_d, got ({self.ab_n}, {self.a_d}, {self.b_d})")

    def realizable(self, m: int) -> bool:
        """Whether some (Y, A, B, x) on {1..m} has these counts.

        Y may be any set with ab_n ≤ |Y| ≤ a_d, B∖A supplies b_d − a_d new
        elements outside Y and x needs one more element outside Y∪B.
        """
        return m >= self.b_d + 1


@dataclass(frozen=True)
class CounterexampleConfig:
    m: int
    Y: SubsetMask
    A: SubsetMask
    B: SubsetMask
    x: int
    case: Case
    r: Fraction

    def to_dict(self) -> dict[str, Any]:
        return {
            "case": self.case.value,
            "m": self.m,
            "Y": self.Y.elements,
            "A": self.A.elements,
            "B": self.B.elements,
            "x": self.x,
            "r": str(self.r),
        }

    def certificate(self) -> ViolationCertificate:
        """Standard-mode certificate for IoU (outside case) or −IoU (inside case)."""
        f = self.function()
        lhs = f.value(self.A.bits | 1 << (self.x - 1)) - f.value(self.A.bits)
        rhs = f.value(self.B.bits | 1 << (self.x - 1)) - f.value(self.B.bits)
        return ViolationCertificate(self.A, self.B, self.x, lhs, rhs, lhs - rhs, CheckMode.STANDARD)

    def function(self) -> IoU:
        cls = IoU if self.case is Case.OUTSIDE_YB else NegIoU
        return cls(GroundSet(self.m), self.Y.bits)


@dataclass(frozen=True)
class Property11Witness:
    Y: SubsetMask
    A: SubsetMask
    B: SubsetMask
    n_A: int
    n_B: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "Y": self.Y.elements,
            "A": self.A.elements,
            "B": self.B.elements,
            "n_A": self.n_A,
            "n_B": self.n_B,
        }


def closed_form_r_outside(p: CaseOutsideParams) -> Fraction:
    r = p.ab_n * (Fraction(1, (p.b_d + 1) * p.b_d) - Fraction(1, (p.a_d + 1) * p.a_d))
    assert r < 0
    return r


def closed_form_r_inside(a_d: int, b_d: int) -> Fraction:
    if not 0 < a_d < b_d:
        raise ValueError(f"need 0 < a_d < b_d, got ({a_d}, {b_d})")
    r = Fraction(1, a_d) - Fraction(1, b_d)
    assert r > 0
    return r


@lru_cache(maxsize=4096)
def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den)


def _iou(y: int, s: int) -> Fraction:
    return _ratio((s & y).bit_count(), (s | y).bit_count())


def direct_r(y: SubsetMask, A: SubsetMask, B: SubsetMask, x: int, paper_literal: bool = False) -> Fraction:
    """R from four Jaccard evaluations against reference set ``y``.

    ``x ∈ B∖A`` is only accepted with ``paper_literal=True``.
    """
    m = y.m
    if A.m != m or B.m != m:
        raise SetFunctionError("ground-set mismatch")
    if y.bits == 0:
        raise SetFunctionError("IoU requires a nonempty reference set Y")
    if not A.issubset(B):
        raise ValueError(f"A={A} is not a subset of B={B}")
    if not 1 <= x <= m:
        raise ValueError(f"element {x} outside 1..{m}")
    if x in A:
        raise ValueError(f"x={x} must not lie in A={A}")
    if x in B and not paper_literal:
        raise ValueError(f"x={x} lies in B={B}; pass paper_literal=True to allow it")
    return _direct_r_bits(y.bits, A.bits, B.bits, 1 << (x - 1))


def _direct_r_bits(y: int, a: int, b: int, xb: int) -> Fraction:
    return (_iou(y, a | xb) - _iou(y, a)) - (_iou(y, b | xb) - _iou(y, b))


def _proper_submasks_ascending(mask: int) -> Iterator[int]:
    sub = 0
    while sub != mask:
        yield sub
        sub = (sub - mask) & mask


def enumerate_counterexamples(m: int, case: Case | str) -> Iterator[CounterexampleConfig]:
    """Every (Y, A, B, x) on {1..m} realizing the chosen case.

    Constraints: A ⊂ B strictly, |A∩Y| = |B∩Y| > 0, and x ∉ Y∪B for the
    outside case or x ∈ Y∖B for the inside case.  Ordered by Y mask, then
    B, then A, then x.
    """
    case = Case(case)
    if not 3 <= m <= 12:
        raise ValueError(f"enumeration needs 3 <= m <= 12, got {m}")
    full = (1 << m) - 1
    for y in range(1, full + 1):
        for b in range(1, full + 1):
            core = b & y
            if not core:
                continue
            # B∖A must avoid Y so that both sets meet Y in the same elements.
            extra = b & ~y
            if not extra:
                continue
            xs = mask_elements(full & ~(y | b)) if case is Case.OUTSIDE_YB else mask_elements(y & ~b)
            if not xs:
                continue
            for sub in _proper_submasks_ascending(extra):
                a = core | sub
                for x in xs:
                    r = _direct_r_bits(y, a, b, 1 << (x - 1))
                    yield CounterexampleConfig(
                        m, SubsetMask(y, m), SubsetMask(a, m), SubsetMask(b, m), x, case, r
                    )


def refute_property11(m: int) -> Property11Witness:
    """Smallest (Y, B, A) with B ⊂ A yet |Y∖B| > |Y∖A|.

    Ordered by Y mask, then B, then A.  Such a pair refutes the claim that
    B ⊂ A forces |Y∖B| < |Y∖A|.
    """
    GroundSet(m)
    full = (1 << m) - 1
    for y in range(1, full + 1):
        for b in range(full + 1):
            for a in range(b + 1, full + 1):
                if b & ~a:
                    continue
                n_a = (y & ~a).bit_count()
                n_b = (y & ~b).bit_count()
                if n_b > n_a:
                    return Property11Witness(SubsetMask(y, m), SubsetMask(a, m), SubsetMask(b, m), n_a, n_b)
    raise AssertionError("unreachable: Y={1}, B=∅, A={1} always qualifies")


def summarize(configs: list[CounterexampleConfig]) -> dict[str, Any]:
    if not configs:
        return {"count": 0}
    rs = [c.r for c in configs]
    return {"count": len(configs), "min_r": str(min(rs)), "max_r": str(max(rs))}


__all__ = [
    "Case",
    "CaseOutsideParams",
    "CounterexampleConfig",
    "Property11Witness",
    "closed_form_r_outside",
    "closed_form_r_inside",
    "direct_r",
    "enumerate_counterexamples",
    "refute_property11",
    "summarize",
]
