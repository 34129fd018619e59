"""Exact enumeration of resonant monomials for functions, vector fields and bivectors."""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import List, Optional, Tuple

from algebra import multiindex as mi
from algebra.scalar import Scalar
from config import Config
from errors import StructuralError
from spectrum.family import LinearFamily

logger = logging.getLogger(__name__)

KINDS = ("function", "vector", "bivector")


@dataclass(frozen=True)
class ResonanceEntry:
    """A monomial x^Q with its target slot: () for functions, (i,) or (i, k)."""

    monomial: Tuple[int, ...]
    target: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {"monomial": list(self.monomial), "target": [t + 1 for t in self.target]}


@dataclass
class ResonanceReport:
    kind: str
    degree_bound: int
    entries: List[ResonanceEntry] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise StructuralError(f"Unknown resonance kind: {self.kind}")

    def contains(self, monomial, target=()) -> bool:
        return ResonanceEntry(tuple(monomial), tuple(target)) in set(self.entries)

    def monomials_for(self, target) -> List[Tuple[int, ...]]:
        target = tuple(target)
        return [e.monomial for e in self.entries if e.target == target]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "degree_bound": self.degree_bound,
            "entries": [e.to_dict() for e in self.entries],
        }


def _targets(S: LinearFamily, kind: str, pair: Optional[Tuple[int, int]]):
    if kind == "function":
        return [()]
    if kind == "vector":
        return [(i,) for i in range(S.n)]
    if pair is not None:
        i, k = sorted(pair)
        if not 0 <= i < k < S.n:
            raise StructuralError(f"Bivector pair {pair} out of range")
        return [(i, k)]
    return list(combinations(range(S.n), 2))


def target_values(S: LinearFamily, target: Tuple[int, ...]):
    """Right-hand sides of the resonance equations, one per row of λ."""
    return [sum((S.lam[j][t] for t in target), Scalar.zero()) for j in range(S.p)]


def count_monomials(n: int, low: int, high: int) -> int:
    return sum(comb(d + n - 1, n - 1) for d in range(low, high + 1))


def resonant_monomials(
    S: LinearFamily, kind: str, d: int, pair: Optional[Tuple[int, int]] = None
) -> ResonanceReport:
    """
    All Q with (Q, λ^j) equal to the target value for every j.

    Functions range over 1 ≤ |Q| ≤ d, vector fields and bivectors over
    2 ≤ |Q| ≤ d. Entries come in graded-lex order of Q, then target order.
    """
    report = ResonanceReport(kind=kind, degree_bound=d)
    targets = _targets(S, kind, pair)
    low = 1 if kind == "function" else 2
    if d < low:
        return report
    size = count_monomials(S.n, low, d) * len(targets)
    if size > Config.ENUMERATION_WARN:
        logger.warning(f"Resonance enumeration over {size} slots (kind={kind}, d={d})")
    rhs = {t: target_values(S, t) for t in targets}
    for q in mi.up_to_degree(S.n, d, start=low):
        values = S.pairings(q)
        for t in targets:
            if values == rhs[t]:
                report.entries.append(ResonanceEntry(q, t))
    return report
