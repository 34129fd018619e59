"""
Resonant quadratic normal form.

The hamiltonians of the parameters form a commuting family; its normal form
is pushed through P, the phase bracket is checked to carry only resonant
monomials, and the quadratic coefficients are made constant.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from algebra.jet import Jet
from config import Config
from errors import HypothesisError, ResonantSupportError, UnexpectedNormalFormError
from normalform.family import FieldFamily
from normalform.poincare_dulac import (
    TheoremHypothesisVerdict,
    check_theorem_hypothesis,
    divide_by_linear_family,
    normalize_family,
)
from pipeline.cocycle import RescaleReport, rescale_quadratic_constants
from pipeline.poisson_jet import PoissonJet
from pipeline.reduction import reduce_poisson
from polyvector.diffeo import DiffeoJet, pushforward
from spectrum.family import LinearFamily
from spectrum.hypotheses import HypothesesReport, hypotheses_report
from spectrum.invariants import is_invariant
from spectrum.resonance import ResonanceReport

logger = logging.getLogger(__name__)


@dataclass
class Theorem1Report:
    hypotheses: HypothesesReport
    forced: bool = False
    reduced: bool = False
    resonance_support: Optional[ResonanceReport] = None
    family_form: Optional[TheoremHypothesisVerdict] = None
    rescale: Optional[RescaleReport] = None
    flags: dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "hypotheses": self.hypotheses.to_dict(),
            "forced": self.forced,
            "reduced": self.reduced,
            "resonance_support": None if self.resonance_support is None else self.resonance_support.to_dict(),
            "family_form": None if self.family_form is None else self.family_form.to_dict(),
            "rescale": None if self.rescale is None else self.rescale.to_dict(),
            "flags": dict(self.flags),
            "notes": list(self.notes),
        }


def bracket_resonance_violations(pj: PoissonJet) -> List[Tuple[int, int, Tuple[int, ...]]]:
    """(i, j, Q) with g_{i,j,Q} ≠ 0 and (Q, λ^r) ≠ λ_ri + λ_rj for some r."""
    S = pj.family
    bad = []
    for (i, j), jet in sorted(pj.bracket_table().g.items()):
        target = [S.lam[r][i] + S.lam[r][j] for r in range(S.p)]
        for phase_q in jet.split_phase():
            if S.pairings(phase_q) != target:
                bad.append((i, j, phase_q))
    return bad


def hamiltonian_family(pj: PoissonJet) -> FieldFamily:
    return FieldFamily(list(pj.hamiltonians()), pj.family, order=pj.order)


def family_matrix(pj: PoissonJet) -> Optional[List[List[Jet]]]:
    """a with X_k = Σ_l a_kl S_l, or None when some X_k is not of that shape."""
    rows = []
    for X in pj.hamiltonians():
        row = divide_by_linear_family(X, pj.family)
        if row is None:
            return None
        rows.append(row)
    return rows


def invariant_support(S: LinearFamily, matrix: List[List[Jet]]) -> bool:
    return all(is_invariant(S, q[: S.n]) for row in matrix for a in row for q in a.terms)


def _output_flags(pj: PoissonJet, free: Tuple[int, ...]) -> dict:
    like = Jet.zero(pj.n, pj.p, pj.order)
    slices = pj.bracket_table().quadratic_slices(like)
    matrix = family_matrix(pj)
    linearized = pj.P == pj.family.linear_poisson(pj.order)
    return {
        "constant_quadratic": all(s.is_constant() for s in slices.values()),
        "free_pairs_vanish": all(s.is_zero() for (i, j), s in slices.items() if i in free or j in free),
        "hamiltonian_invariant": matrix is not None and invariant_support(pj.family, matrix),
        "linearized": linearized,
        "resonant_support": not bracket_resonance_violations(pj),
    }


def non_resonant_form(pj: PoissonJet, free: Tuple[int, ...]) -> bool:
    """
    Σ_k (Σ_l ã_kl(x″) S_l)∧∂_{n+k} + Σ c_ij x_i x_j ∂_i∧∂_j with constant c_ij
    and no free index in a pair.
    """
    n = pj.n
    matrix = family_matrix(pj)
    if matrix is None or any(any(q[:n]) for row in matrix for a in row for q in a.terms):
        return False
    for (i, j), jet in pj.bracket_table().g.items():
        if i in free or j in free:
            if not jet.is_zero():
                return False
            continue
        pair = tuple(1 if k in (i, j) else 0 for k in range(n))
        parts = jet.split_phase()
        if any(q != pair for q in parts) or not all(c.is_constant() for c in parts.values()):
            return False
    return True


def check_output_shape(pj: PoissonJet, report: Theorem1Report) -> dict:
    """
    Fill ``report.flags`` and enforce the shapes the linear part forces.

    A non-resonant 𝓛 leaves only constant c_ij x_i x_j in the phase bracket,
    and n ≤ p + 1 leaves exactly 𝓛. With all of H1–H4 passing and no
    ``force`` a miss raises UnexpectedNormalFormError; otherwise it is noted.
    """
    free = report.rescale.free_indices if report.rescale is not None else ()
    report.flags = _output_flags(pj, free)
    enforce = report.hypotheses.all_pass and not report.forced
    misses = []
    verdict = report.hypotheses.non_resonance
    if verdict is not None and verdict.non_resonant:
        report.flags["non_resonant_form"] = non_resonant_form(pj, free)
        if not report.flags["non_resonant_form"]:
            # a bounded verdict can miss a far resonance
            misses.append(("𝓛 is non-resonant but the bracket keeps more than c_ij x_i x_j", verdict.certified))
    if pj.n <= pj.p + 1 and not report.flags["linearized"]:
        misses.append(("n ≤ p + 1 but the normal form is not 𝓛", True))
    for message, binding in misses:
        if enforce and binding:
            raise UnexpectedNormalFormError("theorem1", message)
        logger.warning(message)
        report.notes.append(message)
    return report.flags


def normalize_poisson_theorem1(
    pj: PoissonJet, force: bool = False, check_hypotheses: bool = True
) -> Tuple[PoissonJet, DiffeoJet, Theorem1Report]:
    """
    Φ with Φ_*P = Σ_k (Σ_l ã_kl S_l)∧∂_{n+k} + Σ c_ij x_i x_j ∂_i∧∂_j + resonant terms.

    H1–H4 failures and a family normal form that is not Σ a_kl S_l raise
    HypothesisError unless ``force``; ``check_hypotheses=False`` reports H1–H4
    without enforcing them.
    """
    S = pj.family
    report = Theorem1Report(hypotheses=hypotheses_report(S, Config.NONRES_BOUND), forced=force)
    failures = report.hypotheses.failures()
    if failures and check_hypotheses and not force:
        raise HypothesisError(f"hypotheses {', '.join(failures)} fail")
    if failures:
        report.notes.append(f"continuing with {', '.join(failures)} failing")

    diffeo = DiffeoJet.identity(pj.n, pj.p, pj.order)
    if not pj.is_reduced():
        pj, diffeo = reduce_poisson(pj)
        report.reduced = True

    result = normalize_family(hamiltonian_family(pj))
    report.resonance_support = result.resonance_support
    verdict = check_theorem_hypothesis(result, S)
    report.family_form = verdict
    if not verdict:
        if not force:
            raise HypothesisError(f"family normal form is not Σ a_kl S_l: {verdict.reason}")
        report.notes.append(f"family form fails: {verdict.reason}")

    step = result.diffeo
    normalized = pj.with_bivector(pushforward(step, pj.P))
    diffeo = step.compose(diffeo)
    bad = bracket_resonance_violations(normalized)
    if bad:
        i, j, q = bad[0]
        raise ResonantSupportError(
            f"{{x{i + 1}, x{j + 1}}} carries the non-resonant monomial {list(q)}"
        )

    rescaled, step, report.rescale = rescale_quadratic_constants(normalized)
    diffeo = step.compose(diffeo)
    check_output_shape(rescaled, report)
    logger.info(f"theorem 1 normal form reached, flags {report.flags}")
    return rescaled, diffeo, report
