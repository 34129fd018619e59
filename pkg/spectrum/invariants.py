"""
Monomial generators of the invariant ring O_n^S.

x^R is invariant when (R, λ^j) = 0 for every j. Generators are found by
bounded enumeration with a divisibility filter. Completeness is certified
from the extreme rays of the cone {q ≥ 0 : λq = 0}: every Hilbert basis
element is a combination Σ c_i r_i with 0 ≤ c_i < 1 over at most dim rays,
so its degree stays below dim · max|r|.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from algebra import linalg
from algebra import multiindex as mi
from config import Config
from errors import StructuralError
from spectrum.family import LinearFamily
from spectrum.resonance import count_monomials

logger = logging.getLogger(__name__)


@dataclass
class InvariantRing:
    generators: List[Tuple[int, ...]]
    degree_bound: int
    complete: bool
    rays: List[Tuple[int, ...]] = field(default_factory=list)
    cone_dimension: int = 0

    @property
    def required_degree(self) -> int:
        """Degree bound that certifies completeness."""
        if not self.rays:
            return 0
        return self.cone_dimension * max(sum(r) for r in self.rays)

    def to_dict(self) -> dict:
        return {
            "generators": [list(g) for g in self.generators],
            "degree_bound": self.degree_bound,
            "complete": self.complete,
            "certificate": {
                "rays": [list(r) for r in self.rays],
                "cone_dimension": self.cone_dimension,
                "required_degree": self.required_degree,
            },
        }


def is_invariant(S: LinearFamily, q: Sequence[int]) -> bool:
    return not any(S.pairings(q))


def _primitive(vector) -> Optional[Tuple[int, ...]]:
    """Scale a rational vector to a primitive non-negative integer vector, if it has one sign."""
    denominators = 1
    for v in vector:
        den = int(v.denominator)
        denominators = denominators * den // gcd(denominators, den)
    ints = [int(v * denominators) for v in vector]
    if all(x <= 0 for x in ints):
        ints = [-x for x in ints]
    if any(x < 0 for x in ints) or not any(ints):
        return None
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints)


def extreme_rays(S: LinearFamily) -> List[Tuple[int, ...]]:
    """Support-minimal non-negative integer solutions of λq = 0."""
    rays = []
    for size in range(1, S.n + 1):
        for support in combinations(range(S.n), size):
            sub = [[S.lam[j][i] for i in support] for j in range(S.p)]
            kernel = linalg.real_nullspace(sub)
            if len(kernel) != 1:
                continue
            vec = kernel[0]
            if any(v == 0 for v in vec):
                continue
            prim = _primitive(vec)
            if prim is None:
                continue
            full = [0] * S.n
            for i, v in zip(support, prim):
                full[i] = v
            rays.append(tuple(full))
    return sorted(rays, key=mi.graded_lex_key)


def invariant_generators(S: LinearFamily, d: int) -> InvariantRing:
    if d < 1:
        raise StructuralError("Degree bound must be at least 1")
    size = count_monomials(S.n, 1, d)
    if size > Config.ENUMERATION_WARN:
        logger.warning(f"Invariant enumeration over {size} monomials up to degree {d}")
    generators: List[Tuple[int, ...]] = []
    for q in mi.up_to_degree(S.n, d, start=1):
        if any(mi.divides(g, q) for g in generators):
            continue
        if is_invariant(S, q):
            generators.append(q)

    rays = extreme_rays(S)
    cone_dim = linalg.rank([[c for c in r] for r in rays]) if rays else 0
    ring = InvariantRing(generators=generators, degree_bound=d, complete=False, rays=rays, cone_dimension=cone_dim)
    ring.complete = not rays or d >= ring.required_degree
    return ring


def factor_monomial(q: Sequence[int], generators: Sequence[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    """All exponent vectors w with Π u_k^{w_k} = x^q for the given generators."""
    q = tuple(q)
    results: List[Tuple[int, ...]] = []

    def search(k: int, rest: Tuple[int, ...], acc: List[int]):
        if not any(rest):
            results.append(tuple(acc + [0] * (len(generators) - k)))
            return
        if k == len(generators):
            return
        g = generators[k]
        e = 0
        current = rest
        while True:
            search(k + 1, current, acc + [e])
            if not mi.divides(g, current):
                break
            current = mi.sub(current, g)
            e += 1

    search(0, q, [])
    return results


def decompose_in_generators(
    coefficients: Dict[Tuple[int, ...], object], generators: Sequence[Tuple[int, ...]]
) -> Optional[Dict[Tuple[int, ...], object]]:
    """Rewrite Σ c_Q x^Q as Σ c_w u^w when each x^Q factors in exactly one way."""
    out: Dict[Tuple[int, ...], object] = {}
    for q, c in coefficients.items():
        ways = factor_monomial(q, generators)
        if len(ways) != 1:
            return None
        out[ways[0]] = c
    return out
