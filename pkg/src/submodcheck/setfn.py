"""Set functions over small ground sets.

Subsets of the ground set {1..m} are encoded as integer bitmasks: element
``i`` lives at bit ``i - 1``.  All function values are exact
:class:`fractions.Fraction` instances so that the sign of a marginal
difference is never at the mercy of float rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

MAX_M = 63

Rational = Fraction


class SetFunctionError(ValueError):
    """Raised for malformed set functions, masks or function documents."""


@dataclass(frozen=True)
class GroundSet:
    m: int

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or isinstance(self.m, bool):
            raise SetFunctionError(f"ground set size must be an integer, got {self.m!r}")
        if not 1 <= self.m <= MAX_M:
            raise SetFunctionError(f"ground set size must be in [1, {MAX_M}], got {self.m}")

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    def __len__(self) -> int:
        return self.m


@dataclass(frozen=True, order=True)
class SubsetMask:
    """A subset of {1..m} stored as a bitmask."""

    bits: int
    m: int

    def __post_init__(self) -> None:
        GroundSet(self.m)
        if self.bits < 0 or self.bits >> self.m:
            raise SetFunctionError(f"mask {self.bits:#x} has bits outside a ground set of size {self.m}")

    @classmethod
    def of(cls, elements: Iterable[int], m: int) -> SubsetMask:
        bits = 0
        for e in elements:
            if not 1 <= e <= m:
                raise SetFunctionError(f"element {e} outside 1..{m}")
            bits |= 1 << (e - 1)
        return cls(bits, m)

    @classmethod
    def empty(cls, m: int) -> SubsetMask:
        return cls(0, m)

    @property
    def elements(self) -> list[int]:
        return mask_elements(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, x: int) -> bool:
        return bool(self.bits >> (x - 1) & 1) if x >= 1 else False

    def __or__(self, other: SubsetMask) -> SubsetMask:
        return SubsetMask(self.bits | _same_m(self, other).bits, self.m)

    def __and__(self, other: SubsetMask) -> SubsetMask:
        return SubsetMask(self.bits & _same_m(self, other).bits, self.m)

    def __sub__(self, other: SubsetMask) -> SubsetMask:
        return SubsetMask(self.bits & ~_same_m(self, other).bits, self.m)

    def add(self, x: int) -> SubsetMask:
        if not 1 <= x <= self.m:
            raise SetFunctionError(f"element {x} outside 1..{self.m}")
        return SubsetMask(self.bits | 1 << (x - 1), self.m)

    def issubset(self, other: SubsetMask) -> bool:
        return self.bits & ~_same_m(self, other).bits == 0

    def __str__(self) -> str:
        return format_set(self.bits)


def _same_m(a: SubsetMask, b: SubsetMask) -> SubsetMask:
    if a.m != b.m:
        raise SetFunctionError(f"ground-set mismatch: {a.m} vs {b.m}")
    return b


def mask_elements(bits: int) -> list[int]:
    out = []
    i = 1
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def format_set(bits: int) -> str:
    return "{" + ",".join(map(str, mask_elements(bits))) + "}"


def render_rational(q: Fraction) -> str:
    return str(q)


def parse_rational(text: str | int) -> Fraction:
    if isinstance(text, bool):
        raise SetFunctionError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise SetFunctionError(f"rationals must be given as strings or integers, got {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise SetFunctionError(f"not a rational: {text!r}") from None
    if q == 0:
        raise SetFunctionError(f"zero denominator in {text!r}")
    return Fraction(p, q)


# ---------------------------------------------------------------------------
# Set functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SetFunction:
    """Base class.  Subclasses implement :meth:`value` on raw bitmasks."""

    ground: GroundSet

    @property
    def m(self) -> int:
        return self.ground.m

    def value(self, bits: int) -> Fraction:
        raise NotImplementedError

    def describe(self) -> dict[str, Any]:
        raise NotImplementedError

    def __call__(self, A: SubsetMask | Iterable[int]) -> Fraction:
        if not isinstance(A, SubsetMask):
            A = SubsetMask.of(A, self.m)
        return evaluate(self, A)

    @cached_property
    def table(self) -> tuple[Fraction, ...]:
        """All 2^m values indexed by mask.  Only sensible for small m."""
        if self.m > 24:
            raise SetFunctionError(f"refusing to tabulate 2^{self.m} values")
        return tuple(self.value(b) for b in range(1 << self.m))

    @cached_property
    def scaled_table(self) -> tuple[np.ndarray, int]:
        """Table as integers over a common denominator: ``table[i] == ints[i] / den``."""
        tab = self.table
        den = math.lcm(*(v.denominator for v in tab))
        ints = [v.numerator * (den // v.denominator) for v in tab]
        bound = max(abs(i) for i in ints)
        # Differences of four entries must stay inside int64.
        dtype = np.int64 if bound < 2**60 else object
        return np.array(ints, dtype=dtype), den

    @cached_property
    def float_table(self) -> np.ndarray:
        return np.array([float(v) for v in self.table], dtype=np.float64)


@dataclass(frozen=True)
class DenseTable(SetFunction):
    values: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if len(self.values) != 1 << self.m:
            raise SetFunctionError(f"table needs {1 << self.m} entries for m={self.m}, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def value(self, bits: int) -> Fraction:
        return self.values[bits]

    def describe(self) -> dict[str, Any]:
        return {"kind": "table", "m": self.m, "values": [render_rational(v) for v in self.values]}


@dataclass(frozen=True)
class IoU(SetFunction):
    """Jaccard index |A∩Y| / |A∪Y| against a fixed nonempty reference set Y."""

    y: int = 0

    def __post_init__(self) -> None:
        SubsetMask(self.y, self.m)
        if self.y == 0:
            raise SetFunctionError("IoU requires a nonempty reference set Y")

    def value(self, bits: int) -> Fraction:
        return Fraction((bits & self.y).bit_count(), (bits | self.y).bit_count())

    def describe(self) -> dict[str, Any]:
        return {"kind": "iou", "m": self.m, "y": mask_elements(self.y)}


@dataclass(frozen=True)
class NegIoU(IoU):
    def value(self, bits: int) -> Fraction:
        return -super().value(bits)

    def describe(self) -> dict[str, Any]:
        return {"kind": "neg_iou", "m": self.m, "y": mask_elements(self.y)}


@dataclass(frozen=True)
class Cardinality(SetFunction):
    def value(self, bits: int) -> Fraction:
        return Fraction(bits.bit_count())

    def describe(self) -> dict[str, Any]:
        return {"kind": "cardinality", "m": self.m}


@dataclass(frozen=True)
class Truncation(SetFunction):
    """min(|A|, cap): the rank function of a uniform matroid."""

    cap: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.cap, int) or isinstance(self.cap, bool) or self.cap < 0:
            raise SetFunctionError(f"truncation cap must be a nonnegative integer, got {self.cap!r}")

    def value(self, bits: int) -> Fraction:
        return Fraction(min(bits.bit_count(), self.cap))

    def describe(self) -> dict[str, Any]:
        return {"kind": "truncation", "m": self.m, "cap": self.cap}


@dataclass(frozen=True)
class Coverage(SetFunction):
    """|⋃_{i∈A} covers[i]| where covers[i-1] is the item set covered by element i."""

    covers: tuple[frozenset, ...] = ()

    def __post_init__(self) -> None:
        if len(self.covers) != self.m:
            raise SetFunctionError(f"coverage needs one covered set per element ({self.m}), got {len(self.covers)}")
        object.__setattr__(self, "covers", tuple(frozenset(c) for c in self.covers))

    @cached_property
    def _item_bits(self) -> tuple[int, ...]:
        items = sorted({it for c in self.covers for it in c}, key=repr)
        index = {it: k for k, it in enumerate(items)}
        return tuple(sum(1 << index[it] for it in c) for c in self.covers)

    def value(self, bits: int) -> Fraction:
        covered = 0
        for i in mask_elements(bits):
            covered |= self._item_bits[i - 1]
        return Fraction(covered.bit_count())

    def describe(self) -> dict[str, Any]:
        return {"kind": "coverage", "m": self.m, "covers": [sorted(c, key=repr) for c in self.covers]}


@dataclass(frozen=True)
class GraphCut(SetFunction):
    """Total weight of undirected edges with exactly one endpoint in A."""

    edges: tuple[tuple[int, int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        norm = []
        for e in self.edges:
            if len(e) == 2:
                u, v, w = e[0], e[1], Fraction(1)
            elif len(e) == 3:
                u, v, w = e[0], e[1], Fraction(e[2])
            else:
                raise SetFunctionError(f"edge must be (u, v) or (u, v, weight), got {e!r}")
            for node in (u, v):
                if not isinstance(node, int) or not 1 <= node <= self.m:
                    raise SetFunctionError(f"edge endpoint {node!r} outside 1..{self.m}")
            if w < 0:
                raise SetFunctionError(f"negative edge weight {w}")
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(norm))

    def value(self, bits: int) -> Fraction:
        total = Fraction(0)
        for u, v, w in self.edges:
            if (bits >> (u - 1) & 1) != (bits >> (v - 1) & 1):
                total += w
        return total

    def describe(self) -> dict[str, Any]:
        edges = [[u, v] if w == 1 else [u, v, render_rational(w)] for u, v, w in self.edges]
        return {"kind": "graph_cut", "m": self.m, "edges": edges}


@dataclass(frozen=True)
class Scaled(SetFunction):
    inner: SetFunction = None  # type: ignore[assignment]
    factor: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.inner is None or self.inner.ground != self.ground:
            raise SetFunctionError("scaled function must share the inner function's ground set")
        object.__setattr__(self, "factor", Fraction(self.factor))

    def value(self, bits: int) -> Fraction:
        return self.factor * self.inner.value(bits)

    def describe(self) -> dict[str, Any]:
        return {"kind": "scaled", "m": self.m, "factor": render_rational(self.factor), "inner": self.inner.describe()}


@dataclass(frozen=True)
class Negated(SetFunction):
    inner: SetFunction = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.inner is None or self.inner.ground != self.ground:
            raise SetFunctionError("negated function must share the inner function's ground set")

    def value(self, bits: int) -> Fraction:
        return -self.inner.value(bits)

    def describe(self) -> dict[str, Any]:
        return {"kind": "negated", "m": self.m, "inner": self.inner.describe()}


def negate(f: SetFunction) -> SetFunction:
    return Negated(f.ground, f)


# Convenience constructors taking element lists instead of masks.


def iou(m: int, y: Iterable[int]) -> IoU:
    return IoU(GroundSet(m), SubsetMask.of(y, m).bits)


def neg_iou(m: int, y: Iterable[int]) -> NegIoU:
    return NegIoU(GroundSet(m), SubsetMask.of(y, m).bits)


def cardinality(m: int) -> Cardinality:
    return Cardinality(GroundSet(m))


def truncation(m: int, cap: int) -> Truncation:
    return Truncation(GroundSet(m), cap)


def coverage(covers: Sequence[Iterable]) -> Coverage:
    return Coverage(GroundSet(len(covers)), tuple(frozenset(c) for c in covers))


def graph_cut(m: int, edges: Iterable[Sequence]) -> GraphCut:
    return GraphCut(GroundSet(m), tuple(tuple(e) for e in edges))


def table(values: Sequence[Fraction | int | str]) -> DenseTable:
    n = len(values)
    if n < 2 or n & (n - 1):
        raise SetFunctionError(f"table length must be 2^m with m >= 1, got {n}")
    vals = tuple(parse_rational(v) if isinstance(v, str) else Fraction(v) for v in values)
    return DenseTable(GroundSet(n.bit_length() - 1), vals)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def evaluate(f: SetFunction, A: SubsetMask) -> Fraction:
    if A.m != f.m:
        raise SetFunctionError(f"ground-set mismatch: function has m={f.m}, subset has m={A.m}")
    return f.value(A.bits)


def marginal_gain(f: SetFunction, A: SubsetMask, x: int) -> Fraction:
    """f(A ∪ {x}) − f(A) for x ∉ A."""
    if not 1 <= x <= f.m:
        raise SetFunctionError(f"element {x} outside 1..{f.m}")
    if x in A:
        raise SetFunctionError(f"element {x} already in {A}")
    return evaluate(f, A.add(x)) - evaluate(f, A)


_FIELDS = {
    "table": {"values"},
    "iou": {"y"},
    "neg_iou": {"y"},
    "cardinality": set(),
    "truncation": {"cap"},
    "coverage": {"covers"},
    "graph_cut": {"edges"},
    "negated": {"inner"},
    "scaled": {"inner", "factor"},
}


def parse_function(document: str | bytes | Mapping[str, Any], normalize: bool = False) -> SetFunction:
    """Build a set function from its JSON description.

    With ``normalize=True`` a table whose empty-set value is nonzero is shifted
    so that f(∅) = 0; no other kind is affected.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SetFunctionError(f"malformed function document: {exc}") from None
    if not isinstance(document, Mapping):
        raise SetFunctionError("function document must be a JSON object")
    kind = document.get("kind")
    if kind not in _FIELDS:
        raise SetFunctionError(f"unknown function kind {kind!r}")
    allowed = {"kind", "m"} | _FIELDS[kind]
    extra = set(document) - allowed
    if extra:
        raise SetFunctionError(f"unknown fields for kind {kind!r}: {sorted(extra)}")
    missing = _FIELDS[kind] - set(document)
    if "m" not in document:
        missing.add("m")
    if missing:
        raise SetFunctionError(f"missing fields for kind {kind!r}: {sorted(missing)}")
    ground = GroundSet(document["m"])
    m = ground.m

    if kind == "table":
        values = document["values"]
        if not isinstance(values, list):
            raise SetFunctionError("'values' must be an array")
        if len(values) != 1 << m:
            raise SetFunctionError(f"table needs {1 << m} entries for m={m}, got {len(values)}")
        vals = [parse_rational(v) for v in values]
        if normalize:
            base = vals[0]
            vals = [v - base for v in vals]
        return DenseTable(ground, tuple(vals))
    if kind in ("iou", "neg_iou"):
        y = _element_list(document["y"], m, "y")
        cls = IoU if kind == "iou" else NegIoU
        return cls(ground, SubsetMask.of(y, m).bits)
    if kind in ("negated", "scaled"):
        inner = parse_function(document["inner"], normalize=normalize)
        if inner.ground != ground:
            raise SetFunctionError(f"inner function has m={inner.m}, outer has m={m}")
        if kind == "negated":
            return Negated(ground, inner)
        return Scaled(ground, inner, parse_rational(document["factor"]))
    if kind == "cardinality":
        return Cardinality(ground)
    if kind == "truncation":
        return Truncation(ground, document["cap"])
    if kind == "coverage":
        covers = document["covers"]
        if not isinstance(covers, list) or not all(isinstance(c, list) for c in covers):
            raise SetFunctionError("'covers' must be an array of arrays")
        try:
            return Coverage(ground, tuple(frozenset(c) for c in covers))
        except TypeError:
            raise SetFunctionError("covered items must be scalars") from None
    edges = document["edges"]
    if not isinstance(edges, list) or not all(isinstance(e, list) for e in edges):
        raise SetFunctionError("'edges' must be an array of [u, v] or [u, v, weight]")
    norm = []
    for e in edges:
        if len(e) == 3:
            e = [e[0], e[1], parse_rational(e[2])]
        norm.append(tuple(e))
    return GraphCut(ground, tuple(norm))


def _element_list(raw: Any, m: int, name: str) -> list[int]:
    if not isinstance(raw, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in raw):
        raise SetFunctionError(f"'{name}' must be an array of element indices")
    for e in raw:
        if not 1 <= e <= m:
            raise SetFunctionError(f"element {e} in '{name}' outside 1..{m}")
    return raw


def load_function(path: str, normalize: bool = False) -> SetFunction:
    with open(path, encoding="utf-8") as fh:
        return parse_function(fh.read(), normalize=normalize)


__all__ = [
    "MAX_M",
    "Rational",
    "SetFunctionError",
    "GroundSet",
    "SubsetMask",
    "SetFunction",
    "DenseTable",
    "IoU",
    "NegIoU",
    "Cardinality",
    "Truncation",
    "Coverage",
    "GraphCut",
    "Scaled",
    "Negated",
    "negate",
    "iou",
    "neg_iou",
    "cardinality",
    "truncation",
    "coverage",
    "graph_cut",
    "table",
    "evaluate",
    "marginal_gain",
    "parse_function",
    "load_function",
    "render_rational",
    "parse_rational",
    "mask_elements",
    "format_set",
]
