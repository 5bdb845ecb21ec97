"""Independent oracles and corpora shared by the test modules.

The oracles deliberately avoid the package's search code: they walk
explicit Python sets with itertools and use plain Fraction arithmetic.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from submodcheck.setfn import (
    DenseTable,
    GroundSet,
    SetFunction,
    cardinality,
    coverage,
    graph_cut,
    iou,
    neg_iou,
    truncation,
)


def subsets(m):
    """All subsets of {1..m} as frozensets, in bitmask order."""
    out = []
    for bits in range(1 << m):
        out.append(frozenset(i + 1 for i in range(m) if bits >> i & 1))
    return out


def bits_of(s):
    return sum(1 << (e - 1) for e in s)


def brute_marginal_violation(f: SetFunction, paper_literal=False):
    """Smallest (B, A, x) by masks violating diminishing returns, or None."""
    m = f.m
    val = {s: f.value(bits_of(s)) for s in subsets(m)}
    for B in subsets(m):
        for A in subsets(m):
            if not A <= B:
                continue
            for x in range(1, m + 1):
                if x in A or (x in B and not paper_literal):
                    continue
                lhs = val[A | {x}] - val[A]
                rhs = val[B | {x}] - val[B]
                if lhs < rhs:
                    return bits_of(A), bits_of(B), x, lhs, rhs
    return None


def brute_lattice_violation(f: SetFunction):
    """Smallest (B, A) with A < B as masks violating the lattice inequality."""
    m = f.m
    subs = subsets(m)
    val = {s: f.value(bits_of(s)) for s in subs}
    for bi, B in enumerate(subs):
        for A in subs[:bi]:
            lhs = val[A | B] + val[A & B]
            rhs = val[A] + val[B]
            if lhs > rhs:
                return bits_of(A), bits_of(B), lhs, rhs
    return None


def brute_monotone_violation(f: SetFunction):
    m = f.m
    for A in subsets(m):
        for x in range(1, m + 1):
            if x not in A and f.value(bits_of(A | {x})) < f.value(bits_of(A)):
                return bits_of(A), x
    return None


def level_set_extension(f: SetFunction, w):
    """Lovász extension as the integral of f over upper level sets.

    LE(w) = ∫_0^∞ f({w ≥ t}) dt + ∫_{-∞}^0 (f({w ≥ t}) − f(V)) dt, computed
    exactly over the breakpoints with Fraction coordinates.
    """
    m = f.m
    w = [Fraction(c) for c in w]
    full = frozenset(range(1, m + 1))

    def upper(t):
        return frozenset(i + 1 for i in range(m) if w[i] >= t)

    total = Fraction(0)
    pos = sorted({c for c in w if c > 0})
    prev = Fraction(0)
    for t in pos:
        total += (t - prev) * f.value(bits_of(upper(t)))
        prev = t
    neg = sorted({c for c in w if c < 0}, reverse=True)
    prev = Fraction(0)
    for t in neg:
        # On (t, prev] the level set is {w ≥ prev}; integrate f − f(V) there.
        total += (prev - t) * (f.value(bits_of(upper(prev))) - f.value(bits_of(full)))
        prev = t
    return total


def random_table(rng: random.Random, m: int, style: int) -> DenseTable:
    """A dense table with f(∅) = 0, drawn from one of four styles.

    0: independent small rationals (rarely submodular)
    1: weighted coverage (submodular, monotone)
    2: coverage minus a modular term (submodular, usually not monotone)
    3: coverage with one entry bumped (submodularity often broken)
    """
    n = 1 << m
    if style == 0:
        vals = [Fraction(0)] + [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n - 1)]
        return DenseTable(GroundSet(m), tuple(vals))
    items = range(rng.randint(1, 5))
    covers = [frozenset(i for i in items if rng.random() < 0.5) for _ in range(m)]
    weight = {i: Fraction(rng.randint(1, 3)) for i in items}
    vals = []
    for bits in range(n):
        covered = set()
        for e in range(m):
            if bits >> e & 1:
                covered |= covers[e]
        vals.append(sum((weight[i] for i in covered), Fraction(0)))
    if style == 2:
        mod = [Fraction(rng.randint(0, 3), 2) for _ in range(m)]
        vals = [v - sum(mod[e] for e in range(m) if b >> e & 1) for b, v in enumerate(vals)]
    elif style == 3:
        k = rng.randrange(1, n)
        vals[k] += Fraction(rng.choice([-1, 1]), rng.randint(1, 2))
    return DenseTable(GroundSet(m), tuple(vals))


def random_tables(count: int, m: int, seed: int):
    rng = random.Random(seed)
    return [random_table(rng, m, i % 4) for i in range(count)]


def builtin_families(max_m: int = 5):
    """Every built-in kind on every ground set up to ``max_m``."""
    out = []
    for m in range(1, max_m + 1):
        out.append(cardinality(m))
        for cap in range(0, m + 1):
            out.append(truncation(m, cap))
        for k in range(1, m + 1):
            for y in itertools.combinations(range(1, m + 1), k):
                out.append(iou(m, y))
                out.append(neg_iou(m, y))
        out.append(coverage([{e, e + 1} for e in range(1, m + 1)]))
        out.append(graph_cut(m, [(e, e % m + 1) for e in range(1, m + 1)] if m > 1 else []))
    return out


def submodular_controls():
    """Known-submodular instances on m ≤ 8."""
    return [
        cardinality(8),
        truncation(4, 1),
        truncation(6, 3),
        truncation(8, 5),
        coverage([{1, 2}, {2, 3}, {3, 4, 5}, {1, 5}, {6}, {2, 6, 7}]),
        coverage([{"a"}, {"a", "b"}, {"b", "c"}, {"c"}, {"a", "d"}, {"d", "e"}, {"e"}, {"a", "e"}]),
        graph_cut(5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3, "1/2")]),
        graph_cut(7, [(1, 2, 3), (2, 3), (3, 4, "2/3"), (4, 5), (5, 6), (6, 7), (7, 1), (2, 6)]),
    ]
