"""
Small-divisor diagnostics ω_k(S) and their Brjuno-type partial sums.

ω_k(S) = min over 2 ≤ |Q| ≤ 2^k and 1 ≤ i ≤ n of max_j |(Q, λ^j) − λ_ji|,
restricted to non-zero values. Comparisons use exact squared moduli; only
the reported magnitudes and sums are floats.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from algebra import multiindex as mi
from algebra.scalar import rational_str
from config import Config
from errors import StructuralError
from spectrum.family import LinearFamily
from spectrum.resonance import count_monomials

logger = logging.getLogger(__name__)


@dataclass
class OmegaTerm:
    k: int
    omega_squared: object  # exact rational
    monomial: Optional[Tuple[int, ...]]
    index: Optional[int]
    partial_sum: float

    @property
    def omega(self) -> float:
        return math.sqrt(float(self.omega_squared)) if self.omega_squared is not None else math.inf

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "omega_squared": None if self.omega_squared is None else rational_str(self.omega_squared),
            "monomial": None if self.monomial is None else list(self.monomial),
            "index": None if self.index is None else self.index + 1,
            "diagnostic": {"omega": None if self.omega_squared is None else self.omega, "partial_sum": self.partial_sum},
        }


def omega_sequence(S: LinearFamily, k_max: int) -> List[OmegaTerm]:
    if k_max < 1:
        raise StructuralError("k_max must be at least 1")
    top = 2 ** k_max
    size = count_monomials(S.n, 2, top) * S.n
    if size > Config.ENUMERATION_WARN:
        logger.warning(f"ω_k enumeration over {size} divisors up to |Q| = {top}")

    best = None  # (abs2, Q, i)
    running = 0.0
    sequence = []
    degree = 1
    for k in range(1, k_max + 1):
        # extend the search by the shells (previous top, 2^k]
        while degree < 2 ** k:
            degree += 1
            for q in mi.of_degree(S.n, degree):
                values = S.pairings(q)
                for i in range(S.n):
                    m = max((values[j] - S.lam[j][i]).abs2() for j in range(S.p))
                    if m and (best is None or m < best[0]):
                        best = (m, q, i)
        if best is None:
            sequence.append(OmegaTerm(k, None, None, None, running))
            continue
        omega_sq = best[0]
        running += -0.5 * math.log(float(omega_sq)) / 2 ** k
        sequence.append(OmegaTerm(k, omega_sq, best[1], best[2], running))
    return sequence


def brjuno_partial_sums(sequence: List[OmegaTerm]) -> List[float]:
    """Running sums Σ_{k' ≤ k} −log ω_k' / 2^k' computed directly from ω."""
    sums, total = [], 0.0
    for term in sequence:
        if term.omega_squared is not None:
            total += -math.log(term.omega) / 2 ** term.k
        sums.append(total)
    return sums
