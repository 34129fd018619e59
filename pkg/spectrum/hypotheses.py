"""
Hypotheses (H1)-(H4) on the eigenvalue matrix and non-resonance of 𝓛.

Each hypothesis asks that some row of λ separates a given combination of
eigenvalues; a failure reports the first combination no row separates.
H5 concerns the bracket itself and is checked by PoissonJet.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, permutations, product
from typing import Callable, List, Optional, Tuple

from algebra import linalg
from algebra.scalar import Scalar
from spectrum.family import LinearFamily


@dataclass
class HypothesisVerdict:
    name: str
    passed: bool
    description: str
    witness: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "description": self.description,
            "witness": None if self.witness is None else [i + 1 for i in self.witness],
        }


@dataclass
class NonResonanceVerdict:
    """
    Non-resonance of 𝓛: no q ≠ 0 with q_i ≥ −1, at most two entries −1, and
    Σ q_i λ_ji = 0 for every j.

    ``certified`` is true when the verdict holds for every q, not only those
    with Σ|q_i| ≤ bound.
    """

    non_resonant: bool
    certified: bool
    bound: int
    witness: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> dict:
        return {
            "non_resonant": self.non_resonant,
            "certified": self.certified,
            "bound": self.bound,
            "witness": None if self.witness is None else list(self.witness),
        }


@dataclass
class HypothesesReport:
    verdicts: List[HypothesisVerdict] = field(default_factory=list)
    non_resonance: Optional[NonResonanceVerdict] = None

    @property
    def all_pass(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def get(self, name: str) -> HypothesisVerdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def failures(self) -> List[str]:
        return [v.name for v in self.verdicts if not v.passed]

    def to_dict(self) -> dict:
        return {
            "verdicts": [v.to_dict() for v in self.verdicts],
            "all_pass": self.all_pass,
            "non_resonance": None if self.non_resonance is None else self.non_resonance.to_dict(),
        }


def _check(S: LinearFamily, name: str, description: str, tuples, value: Callable) -> HypothesisVerdict:
    for t in tuples:
        if all(not value(S.lam[j], *t) for j in range(S.p)):
            return HypothesisVerdict(name, False, description, tuple(t))
    return HypothesisVerdict(name, True, description)


def check_h1(S: LinearFamily) -> HypothesisVerdict:
    pairs = [(i, k) for i in range(S.n) for k in range(i + 1, S.n)]
    return _check(S, "H1", "distinct eigenvalues", pairs, lambda r, i, k: r[i] - r[k])


def check_h2(S: LinearFamily) -> HypothesisVerdict:
    return _check(S, "H2", "non-zero eigenvalues", [(i,) for i in range(S.n)], lambda r, i: r[i])


def check_h3(S: LinearFamily) -> HypothesisVerdict:
    pairs = list(combinations_with_replacement(range(S.n), 2))
    return _check(S, "H3", "no opposite eigenvalues", pairs, lambda r, i, k: r[i] + r[k])


def check_h4(S: LinearFamily) -> HypothesisVerdict:
    triples = [(i, k, m) for i, k in combinations_with_replacement(range(S.n), 2) for m in range(S.n)]
    return _check(S, "H4", "no eigenvalue is a sum of two", triples, lambda r, i, k, m: r[i] + r[k] - r[m])


def _candidate_tuples(n: int, bound: int):
    """q with q_i ≥ −1, at most two −1 entries, 0 < Σ|q_i| ≤ bound."""
    for negatives in range(0, 3):
        for neg in set(permutations([1] * negatives + [0] * (n - negatives))):
            neg_idx = [i for i in range(n) if neg[i]]
            free = [i for i in range(n) if not neg[i]]
            budget = bound - negatives
            if budget < 0:
                continue
            for values in product(range(budget + 1), repeat=len(free)):
                if sum(values) > budget:
                    continue
                q = [0] * n
                for i in neg_idx:
                    q[i] = -1
                for i, v in zip(free, values):
                    q[i] = v
                if any(q):
                    yield tuple(q)


def check_non_resonance(S: LinearFamily, bound: int) -> NonResonanceVerdict:
    # no real integer relation at all when [Re λ; Im λ] has full column rank
    if linalg.real_rank([list(r) for r in S.lam]) == S.n:
        return NonResonanceVerdict(non_resonant=True, certified=True, bound=bound)
    best = None
    for q in _candidate_tuples(S.n, bound):
        if all(
            not sum((S.lam[j][i] * q[i] for i in range(S.n) if q[i]), Scalar.zero())
            for j in range(S.p)
        ):
            key = (sum(abs(x) for x in q), tuple(-x for x in q))
            if best is None or key < best[0]:
                best = (key, q)
    if best is not None:
        return NonResonanceVerdict(non_resonant=False, certified=True, bound=bound, witness=best[1])
    return NonResonanceVerdict(non_resonant=True, certified=False, bound=bound)


def hypotheses_report(S: LinearFamily, d_nonres: int) -> HypothesesReport:
    return HypothesesReport(
        verdicts=[check_h1(S), check_h2(S), check_h3(S), check_h4(S)],
        non_resonance=check_non_resonance(S, d_nonres),
    )
