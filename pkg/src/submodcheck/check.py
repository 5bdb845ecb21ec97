"""Exhaustive submodularity and monotonicity checks with certificates.

Three variants of the diminishing-returns test are offered:

``standard``
    f(A∪{x}) − f(A) ≥ f(B∪{x}) − f(B) for all A ⊆ B and x ∉ B.
``paper-literal``
    the same inequality quantified over x ∉ A, so x ∈ B∖A is also tested.
    For such x the right-hand side is zero and the test becomes marginal
    nonnegativity; this variant is therefore "submodular and monotone".
``lattice``
    f(A∪B) + f(A∩B) ≤ f(A) + f(B) for all pairs A, B.

Every search returns the lexicographically smallest violation, ordered by
``B`` mask, then ``A`` mask, then ``x``.  Lattice pairs are symmetric, so
only pairs with ``A < B`` (as masks) are visited.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from .setfn import (
    SetFunction,
    SetFunctionError,
    SubsetMask,
    mask_elements,
    parse_rational,
    render_rational,
)

MAX_EXHAUSTIVE_M = 20


class CheckMode(enum.Enum):
    STANDARD = "standard"
    PAPER_LITERAL = "paper-literal"
    LATTICE = "lattice"

    @classmethod
    def parse(cls, text: str | CheckMode) -> CheckMode:
        if isinstance(text, CheckMode):
            return text
        try:
            return cls(text.replace("_", "-").lower())
        except ValueError:
            raise ValueError(f"unknown check mode {text!r}") from None


class CertificateError(ValueError):
    """A certificate is malformed for its mode or ground set."""


@dataclass(frozen=True)
class ViolationCertificate:
    """A concrete (A, B, x) or (A, B) falsifying the mode's inequality.

    For the marginal variants ``lhs``/``rhs`` are the two marginal gains and
    ``gap = lhs - rhs < 0``.  For ``lattice`` they are f(A∪B)+f(A∩B) and
    f(A)+f(B), and ``gap > 0``.
    """

    A: SubsetMask
    B: SubsetMask
    x: int | None
    lhs: Fraction
    rhs: Fraction
    gap: Fraction
    mode: CheckMode

    @property
    def m(self) -> int:
        return self.A.m

    def to_dict(self, f: SetFunction | None = None) -> dict[str, Any]:
        out: dict[str, Any] = {"mode": self.mode.value, "m": self.m}
        if f is not None:
            out["function"] = f.describe()
        out.update(
            A=self.A.elements,
            B=self.B.elements,
            x=self.x,
            lhs=render_rational(self.lhs),
            rhs=render_rational(self.rhs),
            gap=render_rational(self.gap),
        )
        return out

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> ViolationCertificate:
        try:
            m = doc["m"]
            return cls(
                A=SubsetMask.of(doc["A"], m),
                B=SubsetMask.of(doc["B"], m),
                x=doc["x"],
                lhs=parse_rational(doc["lhs"]),
                rhs=parse_rational(doc["rhs"]),
                gap=parse_rational(doc["gap"]),
                mode=CheckMode.parse(doc["mode"]),
            )
        except KeyError as exc:
            raise CertificateError(f"certificate missing field {exc}") from None


@dataclass(frozen=True)
class Verdict:
    certificate: ViolationCertificate | None = None

    @property
    def submodular(self) -> bool:
        return self.certificate is None

    @property
    def violated(self) -> bool:
        return self.certificate is not None


@dataclass(frozen=True)
class MonotoneVerdict:
    A: SubsetMask | None = None
    x: int | None = None
    gap: Fraction | None = None

    @property
    def monotone(self) -> bool:
        return self.A is None


def _require_cap(f: SetFunction) -> None:
    if f.m > MAX_EXHAUSTIVE_M:
        raise SetFunctionError(f"exhaustive search capped at m={MAX_EXHAUSTIVE_M}, got m={f.m}")


def _sentinel(t: np.ndarray):
    return np.iinfo(np.int64).max if t.dtype != object else float("inf")


def _subset_min(g: np.ndarray, m: int) -> np.ndarray:
    """M[S] = min over T ⊆ S of g[T] (zeta transform over the subset lattice)."""
    M = g.copy()
    n = M.shape[0]
    for j in range(m):
        view = M.reshape(n >> (j + 1), 2, 1 << j)
        np.minimum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
    return M


def _first_bad_outer(t: np.ndarray, m: int, x: int, mode: CheckMode) -> int | None:
    """Smallest B admitting some A ⊆ B that violates the marginal test for element x."""
    n = 1 << m
    b = 1 << (x - 1)
    idx = np.arange(n)
    has_x = (idx & b) != 0
    g = np.empty(n, dtype=t.dtype)
    g[~has_x] = t[idx[~has_x] | b] - t[idx[~has_x]]
    g[has_x] = _sentinel(t)
    M = _subset_min(g, m)
    bad = np.zeros(n, dtype=bool)
    bad[~has_x] = M[~has_x] < g[~has_x]
    if mode is CheckMode.PAPER_LITERAL:
        bad[has_x] = M[idx[has_x] ^ b] < 0
    hits = np.flatnonzero(bad)
    return int(hits[0]) if hits.size else None


def _marginal_certificate(f: SetFunction, B: int, mode: CheckMode) -> ViolationCertificate:
    t = f.table
    m = f.m
    A = 0
    while True:
        for x in range(1, m + 1):
            b = 1 << (x - 1)
            if A & b:
                continue
            if B & b and mode is CheckMode.STANDARD:
                continue
            lhs = t[A | b] - t[A]
            rhs = t[B | b] - t[B]
            if lhs < rhs:
                return ViolationCertificate(SubsetMask(A, m), SubsetMask(B, m), x, lhs, rhs, lhs - rhs, mode)
        if A == B:
            break
        A = (A - B) & B
    raise AssertionError(f"no violation under outer set {B} despite prefilter")


def _search_marginal(f: SetFunction, mode: CheckMode, workers: int) -> ViolationCertificate | None:
    t, _ = f.scaled_table
    m = f.m
    xs = range(1, m + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            firsts = list(pool.map(lambda x: _first_bad_outer(t, m, x, mode), xs))
    else:
        firsts = [_first_bad_outer(t, m, x, mode) for x in xs]
    found = [B for B in firsts if B is not None]
    if not found:
        return None
    return _marginal_certificate(f, min(found), mode)


def _lattice_range(t: np.ndarray, lo: int, hi: int) -> tuple[int, int] | None:
    for B in range(lo, hi):
        if B == 0:
            continue
        A = np.arange(B)
        excess = t[A | B] + t[A & B] - t[A] - t[B]
        hits = np.flatnonzero(excess > 0)
        if hits.size:
            return B, int(hits[0])
    return None


def _search_lattice(f: SetFunction, workers: int) -> ViolationCertificate | None:
    t, _ = f.scaled_table
    n = 1 << f.m
    if workers > 1:
        step = max(1, -(-n // (4 * workers)))
        bounds = [(lo, min(lo + step, n)) for lo in range(0, n, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = [r for r in pool.map(lambda r: _lattice_range(t, *r), bounds) if r is not None]
        hit = min(results) if results else None
    else:
        hit = _lattice_range(t, 0, n)
    if hit is None:
        return None
    B, A = hit
    tab = f.table
    lhs = tab[A | B] + tab[A & B]
    rhs = tab[A] + tab[B]
    m = f.m
    return ViolationCertificate(SubsetMask(A, m), SubsetMask(B, m), None, lhs, rhs, lhs - rhs, CheckMode.LATTICE)


def check_submodular(f: SetFunction, mode: CheckMode | str = CheckMode.STANDARD, workers: int = 1) -> Verdict:
    """Decide submodularity of ``f`` exhaustively.

    The result never depends on ``workers``; it only splits the search.
    """
    mode = CheckMode.parse(mode)
    _require_cap(f)
    if mode is CheckMode.LATTICE:
        return Verdict(_search_lattice(f, workers))
    return Verdict(_search_marginal(f, mode, workers))


def check_monotone(f: SetFunction) -> MonotoneVerdict:
    """Smallest (A, x) with x ∉ A and f(A∪{x}) < f(A), ordered by A then x."""
    _require_cap(f)
    t, _ = f.scaled_table
    m = f.m
    n = 1 << m
    idx = np.arange(n)
    first = None
    for x in range(1, m + 1):
        b = 1 << (x - 1)
        free = idx[(idx & b) == 0]
        hits = free[t[free | b] < t[free]]
        if hits.size and (first is None or hits[0] < first):
            first = int(hits[0])
    if first is None:
        return MonotoneVerdict()
    tab = f.table
    for x in mask_elements(((1 << m) - 1) & ~first):
        gain = tab[first | 1 << (x - 1)] - tab[first]
        if gain < 0:
            return MonotoneVerdict(SubsetMask(first, m), x, gain)
    raise AssertionError("monotonicity prefilter disagrees with exact values")


def verify_certificate(f: SetFunction, cert: ViolationCertificate) -> bool:
    """Recompute a certificate from ``f``; True iff it is exact and truly violated."""
    if cert.A.m != f.m or cert.B.m != f.m:
        raise SetFunctionError(f"ground-set mismatch: function m={f.m}, certificate m={cert.m}")
    A, B = cert.A.bits, cert.B.bits
    if cert.mode is CheckMode.LATTICE:
        if cert.x is not None:
            raise CertificateError("lattice certificates carry no element x")
        lhs = f.value(A | B) + f.value(A & B)
        rhs = f.value(A) + f.value(B)
        return (lhs, rhs, lhs - rhs) == (cert.lhs, cert.rhs, cert.gap) and lhs > rhs

    if A & ~B:
        raise CertificateError(f"A={cert.A} is not a subset of B={cert.B}")
    x = cert.x
    if not isinstance(x, int) or not 1 <= x <= f.m:
        raise CertificateError(f"certificate element {x!r} outside 1..{f.m}")
    b = 1 << (x - 1)
    if A & b:
        raise CertificateError(f"x={x} already in A={cert.A}")
    if cert.mode is CheckMode.STANDARD and B & b:
        raise CertificateError(f"x={x} in B={cert.B} is not allowed in standard mode")
    lhs = f.value(A | b) - f.value(A)
    rhs = f.value(B | b) - f.value(B)
    return (lhs, rhs, lhs - rhs) == (cert.lhs, cert.rhs, cert.gap) and lhs < rhs


__all__ = [
    "MAX_EXHAUSTIVE_M",
    "CheckMode",
    "CertificateError",
    "ViolationCertificate",
    "Verdict",
    "MonotoneVerdict",
    "check_submodular",
    "check_monotone",
    "verify_certificate",
]
