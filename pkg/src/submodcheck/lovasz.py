"""Lovász extension of a set function and midpoint-convexity probes.

The extension at ``w`` sorts coordinates in decreasing order (ties by
ascending element index), walks the resulting chain of prefix sets
∅ = S_0 ⊂ S_1 ⊂ ... ⊂ S_m and sums ``w[π(i)] * (f(S_i) - f(S_{i-1}))``.
Prefix values and the dot product are exact; the result is rounded to a float once.
The extension is convex exactly when ``f`` is submodular, so a midpoint
with LE((u+v)/2) > (LE(u)+LE(v))/2 certifies non-submodularity.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .check import CheckMode, CertificateError, ViolationCertificate, verify_certificate
from .setfn import SetFunction, SetFunctionError, SubsetMask

DEFAULT_TOL = 1e-9
SWEEP_MAX_M = 8
_BLOCK = 1024
_BATCH_MAX_M = 24


@dataclass(frozen=True)
class ChainStep:
    element: int
    prefix: SubsetMask
    value: Fraction


@dataclass(frozen=True)
class ExtensionEvaluation:
    value: float
    chain: tuple[ChainStep, ...]
    point: tuple[float, ...] = ()

    def telescoped(self) -> float:
        """Recompute the value from the chain alone."""
        total = Fraction(0)
        prev = Fraction(0)
        for step in self.chain:
            total += Fraction(self.point[step.element - 1]) * (step.value - prev)
            prev = step.value
        return float(total)


@dataclass(frozen=True)
class ConvexityWitness:
    u: tuple[float, ...]
    v: tuple[float, ...]
    le_u: float
    le_v: float
    le_mid: float
    deficit: float
    source: str = "random"

    def to_dict(self) -> dict[str, Any]:
        return {
            "u": list(self.u),
            "v": list(self.v),
            "le_u": repr(self.le_u),
            "le_v": repr(self.le_v),
            "le_mid": repr(self.le_mid),
            "deficit": repr(self.deficit),
            "source": self.source,
        }


def _check_point(f: SetFunction, w: Sequence[float]) -> tuple[float, ...]:
    if len(w) != f.m:
        raise SetFunctionError(f"point has {len(w)} coordinates, ground set has {f.m}")
    point = tuple(float(c) for c in w)
    if not all(math.isfinite(c) for c in point):
        raise SetFunctionError(f"non-finite coordinate in {point}")
    return point


def _check_normalized(f: SetFunction) -> None:
    if f.value(0) != 0:
        raise SetFunctionError(f"Lovász extension needs f(∅) = 0, got {f.value(0)}")


def lovasz_evaluate(f: SetFunction, w: Sequence[float], order: Sequence[int] | None = None) -> ExtensionEvaluation:
    """Evaluate the Lovász extension of ``f`` at ``w``.

    ``order`` overrides the processing order of elements (1-based).  It must
    still list coordinates in nonincreasing order; it exists so that callers
    can check that reshuffling ties does not move the value.
    """
    _check_normalized(f)
    point = _check_point(f, w)
    m = f.m
    if order is None:
        order = sorted(range(1, m + 1), key=lambda e: (-point[e - 1], e))
    else:
        order = list(order)
        if sorted(order) != list(range(1, m + 1)):
            raise SetFunctionError(f"order {order} is not a permutation of 1..{m}")
        if any(point[a - 1] < point[b - 1] for a, b in zip(order, order[1:])):
            raise SetFunctionError("order must list coordinates in nonincreasing order")

    # Float coordinates convert to Fraction exactly, so the sum is exact and rounded once.
    chain = []
    total = Fraction(0)
    bits = 0
    prev = Fraction(0)
    for e in order:
        bits |= 1 << (e - 1)
        val = f.value(bits)
        chain.append(ChainStep(e, SubsetMask(bits, m), val))
        total += Fraction(point[e - 1]) * (val - prev)
        prev = val
    return ExtensionEvaluation(float(total), tuple(chain), point)


def _batch_values(f: SetFunction, W: np.ndarray) -> np.ndarray:
    """Extension values for each row of W; same ordering rule as lovasz_evaluate."""
    if W.shape[0] == 0:
        return np.empty(0)
    if f.m > _BATCH_MAX_M:
        return np.array([lovasz_evaluate(f, row).value for row in W])
    order = np.argsort(-W, axis=1, kind="stable")
    prefix = np.cumsum(np.left_shift(np.int64(1), order), axis=1)
    vals = f.float_table[prefix]
    diffs = np.diff(vals, axis=1, prepend=0.0)
    return np.sum(np.take_along_axis(W, order, axis=1) * diffs, axis=1)


def midpoint_probe(
    f: SetFunction,
    u: Sequence[float],
    v: Sequence[float],
    tol: float = DEFAULT_TOL,
    source: str = "random",
) -> ConvexityWitness | None:
    """Witness iff LE((u+v)/2) exceeds (LE(u)+LE(v))/2 by more than ``tol``."""
    pu = _check_point(f, u)
    pv = _check_point(f, v)
    mid = tuple((a + b) / 2 for a, b in zip(pu, pv))
    le_u = lovasz_evaluate(f, pu).value
    le_v = lovasz_evaluate(f, pv).value
    le_mid = lovasz_evaluate(f, mid).value
    deficit = le_mid - (le_u + le_v) / 2
    if deficit > tol:
        return ConvexityWitness(pu, pv, le_u, le_v, le_mid, deficit, source)
    return None


def _indicator_pairs(m: int) -> tuple[np.ndarray, np.ndarray]:
    n = 1 << m
    S, T = np.triu_indices(n, k=1)
    bits = np.arange(m)
    U = ((S[:, None] >> bits) & 1).astype(np.float64)
    V = ((T[:, None] >> bits) & 1).astype(np.float64)
    return U, V


def _random_block(seed: int, block: int, count: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    # One generator per block index, so the sample stream does not depend on how blocks are split.
    rng = np.random.default_rng([seed, block])
    draws = rng.random((count, 2, m))
    return draws[:, 0, :], draws[:, 1, :]


def _deficits(f: SetFunction, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    return _batch_values(f, (U + V) / 2) - (_batch_values(f, U) + _batch_values(f, V)) / 2


def _random_deficits(f: SetFunction, seed: int, block: int, samples: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    count = min(_BLOCK, samples - block * _BLOCK)
    U, V = _random_block(seed, block, count, f.m)
    return _deficits(f, U, V), U, V


def probe_convexity(
    f: SetFunction,
    samples: int = 10_000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> ConvexityWitness | None:
    """Search for a midpoint-convexity violation of the extension.

    Candidates are every pair of distinct subset indicators (for m ≤ 8),
    followed by ``samples`` seeded uniform pairs in [0,1]^m.  The witness
    with the largest deficit wins; ties go to the earlier candidate.
    """
    if samples < 0:
        raise ValueError(f"samples must be nonnegative, got {samples}")
    _check_normalized(f)
    m = f.m

    best: tuple[float, int, np.ndarray, np.ndarray, str] | None = None

    def consider(d: np.ndarray, U: np.ndarray, V: np.ndarray, offset: int, source: str) -> None:
        nonlocal best
        if d.size == 0:
            return
        k = int(np.argmax(d))
        if best is None or d[k] > best[0]:
            best = (float(d[k]), offset + k, U[k], V[k], source)

    offset = 0
    if m <= SWEEP_MAX_M:
        U, V = _indicator_pairs(m)
        consider(_deficits(f, U, V), U, V, 0, "indicator-sweep")
        offset = U.shape[0]

    blocks = range(-(-samples // _BLOCK))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _random_deficits(f, seed, b, samples), blocks))
    else:
        results = [_random_deficits(f, seed, b, samples) for b in blocks]
    for b, (d, U, V) in zip(blocks, results):
        consider(d, U, V, offset + b * _BLOCK, "random")

    if best is None or best[0] <= tol:
        return None
    _, _, u, v, source = best
    # Report values from the exact-chain evaluator, not the batched float path.
    witness = midpoint_probe(f, u.tolist(), v.tolist(), tol=-math.inf, source=source)
    return witness


def witness_from_lattice_violation(f: SetFunction, cert: ViolationCertificate) -> ConvexityWitness:
    """Turn a verified lattice violation on (A, B) into a midpoint witness.

    At the indicators of A and B the extension equals f(A) and f(B); at their
    midpoint it equals (f(A∪B) + f(A∩B)) / 2.  The deficit is thus gap / 2.
    """
    if cert.mode is not CheckMode.LATTICE:
        raise CertificateError(f"expected a lattice certificate, got mode {cert.mode.value!r}")
    if not verify_certificate(f, cert):
        raise CertificateError("certificate does not verify against this function")
    m = f.m
    u = [float(e in cert.A) for e in range(1, m + 1)]
    v = [float(e in cert.B) for e in range(1, m + 1)]
    witness = midpoint_probe(f, u, v, tol=-math.inf, source="lattice-bridge")
    assert witness is not None
    return witness


__all__ = [
    "DEFAULT_TOL",
    "ChainStep",
    "ExtensionEvaluation",
    "ConvexityWitness",
    "lovasz_evaluate",
    "midpoint_probe",
    "probe_convexity",
    "witness_from_lattice_violation",
]
