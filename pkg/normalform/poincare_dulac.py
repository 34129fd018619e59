"""
Poincaré–Dulac normalization of commuting families, degree by degree in x′.

At x′-degree m each slot (i, Q) with some non-zero divisor
δ_j = (Q, λ^j) − λ_ji is removed by the phase change x_i ↦ x_i + φ_iQ x^Q with
φ_iQ = −X_{j,i,Q}/δ_j for the smallest such j. The divisors are constants, so
the coefficients φ_iQ(x″) may depend on the parameters freely. The running
fields are pushed forward exactly after each degree; resonant slots are left
untouched.
"""

import logging
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from algebra import linalg
from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import InconsistentResonanceError, NonCommutingError
from normalform.family import FieldFamily, NormalizationResult
from polyvector.diffeo import DiffeoJet, invert_diffeo, pushforward
from polyvector.polyvector import PolyVector, lie_bracket
from spectrum.family import LinearFamily
from spectrum.invariants import is_invariant
from spectrum.resonance import ResonanceEntry, ResonanceReport

logger = logging.getLogger(__name__)


def check_commuting(fields: Sequence[PolyVector]):
    for a, b in combinations(range(len(fields)), 2):
        bracket = lie_bracket(fields[a], fields[b])
        if not bracket.is_zero():
            raise NonCommutingError(a, b, bracket)


def _divisors(S: LinearFamily, phase_q: Tuple[int, ...], i: int) -> List[Scalar]:
    return [v - S.lam[j][i] for j, v in enumerate(S.pairings(phase_q))]


def _slot_label(i: int, phase_q: Tuple[int, ...]) -> str:
    return f"x^{list(phase_q)} ∂{i + 1}"


def normalize_family(F: FieldFamily) -> NormalizationResult:
    S = F.linear_parts
    n, k = F.n_phase, F.n_param
    order = F.order
    fields = [X.truncate(order) for X in F.fields]
    check_commuting(fields)

    identity = DiffeoJet.identity(n, k, order)
    diffeo = identity
    for m in range(2, order + 1):
        corrections = [Jet.zero(n, k, order) for _ in range(n + k)]
        touched = False
        for i in range(n):
            parts = [X.component((i,)).phase_degree_part(m).split_phase() for X in fields]
            slots = sorted(set().union(*[p.keys() for p in parts]))
            for phase_q in slots:
                deltas = _divisors(S, phase_q, i)
                chosen = next((j for j, d in enumerate(deltas) if d), None)
                if chosen is None:
                    continue
                coefficient = parts[chosen].get(phase_q)
                if coefficient is None or coefficient.is_zero():
                    continue
                factor = -deltas[chosen].inverse()
                shift = phase_q + (0,) * k
                phi = Jet(n, k, order, {
                    tuple(a + b for a, b in zip(q, shift)): c * factor for q, c in coefficient.terms.items()
                })
                corrections[i] = corrections[i] + phi
                touched = True
        if not touched:
            continue
        step = DiffeoJet(
            [Jet.variable(v, n, k, order) + corrections[v] for v in range(n + k)]
        )
        inverse = invert_diffeo(step)
        fields = [pushforward(step, X, inverse=inverse) for X in fields]
        diffeo = step.compose(diffeo)
        _check_degree(S, fields, m)
        logger.debug(f"normalized x′-degree {m}")

    support = _support(S, fields, order)
    return NormalizationResult(diffeo=diffeo, normal_forms=fields, resonance_support=support, linear_parts=S)


def _check_degree(S: LinearFamily, fields: Sequence[PolyVector], m: int):
    """After the step at degree m, only resonant slots may carry coefficients."""
    for X in fields:
        for (i,), coef in X.terms.items():
            if i >= S.n:
                continue
            for phase_q in coef.phase_degree_part(m).split_phase():
                if any(_divisors(S, phase_q, i)):
                    raise InconsistentResonanceError(_slot_label(i, phase_q))


def _support(S: LinearFamily, fields: Sequence[PolyVector], order: int) -> ResonanceReport:
    entries = set()
    for X in fields:
        for (i,), coef in X.terms.items():
            for phase_q in coef.split_phase():
                if sum(phase_q) >= 2:
                    entries.add(ResonanceEntry(phase_q, (i,)))
    ordered = sorted(entries, key=lambda e: (sum(e.monomial), tuple(-x for x in e.monomial), e.target))
    return ResonanceReport(kind="vector", degree_bound=order, entries=ordered)


def normalize_field(X: PolyVector, S: LinearFamily) -> NormalizationResult:
    """Single-field convenience wrapper (p = 1)."""
    return normalize_family(FieldFamily([X], S, order=X.order))


def divide_by_linear_family(
    V: PolyVector, S: LinearFamily, columns: Optional[Sequence[int]] = None
) -> Optional[List[Jet]]:
    """
    Coefficients c with V = Σ_j c_j S_j, or None.

    Each phase component V_i must be divisible by x_i; the quotients w_i then
    satisfy Σ_j λ_ji c_j = w_i, solved on the independent columns of λ and
    checked on the rest.
    """
    n = S.n
    comps = V.vector_components()
    if any(not c.is_zero() for c in comps[n:]):
        return None
    quotients = []
    for i in range(n):
        w = comps[i].divide_monomial(tuple(1 if v == i else 0 for v in range(V.nvars)))
        if w is None:
            return None
        quotients.append(w)
    columns = list(columns) if columns is not None else list(S.free_indices())
    # λ_F^T c = w_F
    square = [[S.lam[j][i] for j in range(S.p)] for i in columns]
    inv = linalg.inverse(square)
    coeffs = []
    for j in range(S.p):
        total = Jet.zero(V.n_phase, V.n_param, quotients[0].order)
        for r, i in enumerate(columns):
            if inv[j][r]:
                total = total + quotients[i].scale(inv[j][r])
        coeffs.append(total)
    for i in range(n):
        rebuilt = Jet.zero(V.n_phase, V.n_param, quotients[i].order)
        for j in range(S.p):
            if S.lam[j][i]:
                rebuilt = rebuilt + coeffs[j].scale(S.lam[j][i])
        if rebuilt != quotients[i]:
            return None
    return coeffs


class TheoremHypothesisVerdict:
    """Outcome of the family-normal-form hypothesis check with the extracted matrix a."""

    def __init__(self, holds: bool, reason: str = "", matrix: Optional[List[List[Jet]]] = None):
        self.holds = holds
        self.reason = reason
        self.matrix = matrix

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "reason": self.reason,
            "matrix": None if self.matrix is None else [[a.to_list() for a in row] for row in self.matrix],
        }


def check_theorem_hypothesis(R: NormalizationResult, S: Optional[LinearFamily] = None) -> TheoremHypothesisVerdict:
    """
    NF_i = Σ_j a_ij S_j with a_ij invariant in x′ and a_ij(0, x″) = δ_ij.
    """
    S = S or R.linear_parts
    matrix = []
    for i, nf in enumerate(R.normal_forms):
        row = divide_by_linear_family(nf, S)
        if row is None:
            return TheoremHypothesisVerdict(False, f"normal form {i + 1} is not a combination of the S_j")
        for j, a in enumerate(row):
            for q in a.terms:
                if not is_invariant(S, q[: S.n]):
                    return TheoremHypothesisVerdict(
                        False, f"a[{i + 1}][{j + 1}] has non-invariant monomial {list(q[:S.n])}"
                    )
            expected = Jet.constant(1 if i == j else 0, a.n_phase, a.n_param, a.order)
            if a.restrict_phase() != expected:
                return TheoremHypothesisVerdict(False, f"a[{i + 1}][{j + 1}] is not δ on the parameter axis")
        matrix.append(row)
    return TheoremHypothesisVerdict(True, "", matrix)
