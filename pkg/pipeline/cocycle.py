"""
Constant quadratic brackets.

The slices G_ij(x″) = g_{i,j,E_i+E_j} change under y_i = x_i·exp(−γ_i(x″)) by
the coboundary G_ij ↦ G_ij + Λ_j(γ_i) − Λ_i(γ_j), and satisfy the cyclic
identity Λ_i(G_jk) + Λ_j(G_ki) + Λ_k(G_ij) = 0. Over the free indices F of λ
the fields Λ_F can be made coordinate vector fields ∂_{z_r} by a linear
change of parameters; integrating G_{F[r], i} along z_r then kills the slices
one free index at a time and leaves the others constant.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from algebra import linalg
from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import CocycleError, LambdaRankError, StructuralError
from pipeline.poisson_jet import BracketTable, Pair, PoissonJet
from polyvector.diffeo import DiffeoJet, pushforward
from spectrum.family import LinearFamily

logger = logging.getLogger(__name__)


@dataclass
class CocycleVerdict:
    holds: bool
    triple: Optional[Tuple[int, int, int]] = None
    defect: Optional[Jet] = None

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "triple": None if self.triple is None else [t + 1 for t in self.triple],
            "defect": None if self.defect is None else self.defect.to_list(),
        }


@dataclass
class RescaleStage:
    index: int
    gammas: Dict[int, Jet]
    flags: Dict[str, bool]

    def to_dict(self) -> dict:
        return {
            "index": self.index + 1,
            "gammas": {str(i + 1): g.to_list() for i, g in sorted(self.gammas.items())},
            "flags": dict(self.flags),
        }


@dataclass
class RescaleReport:
    free_indices: Tuple[int, ...]
    stages: List[RescaleStage] = field(default_factory=list)
    constants: Dict[Pair, Scalar] = field(default_factory=dict)

    @property
    def standard_free_indices(self) -> bool:
        """F = {1..p}, so the zero condition reads min(i, j) ≤ p."""
        return self.free_indices == tuple(range(len(self.free_indices)))

    def to_dict(self) -> dict:
        return {
            "free_indices": [i + 1 for i in self.free_indices],
            "standard_free_indices": self.standard_free_indices,
            "stages": [s.to_dict() for s in self.stages],
            "constants": {f"{i + 1},{j + 1}": str(c) for (i, j), c in sorted(self.constants.items())},
        }


def _lambda_apply(S: LinearFamily, i: int, f: Jet) -> Jet:
    """Λ_i(f) = Σ_j λ_ji ∂f/∂x_{n+j}."""
    total = Jet.zero(f.n_phase, f.n_param, f.order)
    for j in range(S.p):
        if S.lam[j][i]:
            total = total + f.diff(S.n + j).scale(S.lam[j][i])
    return total


def _slices(table: BracketTable, like: Jet) -> Dict[Pair, Jet]:
    """G_ij for every ordered pair i ≠ j, antisymmetric."""
    out = {}
    for (i, j), jet in table.quadratic_slices(like).items():
        out[(i, j)] = jet
        out[(j, i)] = -jet
    return out


def cocycle_check(table: BracketTable, S: LinearFamily, like: Optional[Jet] = None) -> CocycleVerdict:
    like = like if like is not None else Jet.zero(S.n, S.p, 2)
    G = _slices(table, like)
    for i, j, k in combinations(range(S.n), 3):
        total = _lambda_apply(S, i, G[(j, k)]) + _lambda_apply(S, j, G[(k, i)]) + _lambda_apply(S, k, G[(i, j)])
        if not total.is_zero():
            return CocycleVerdict(False, (i, j, k), total)
    return CocycleVerdict(True)


def parameter_change(matrix, n: int, p: int, order: int) -> DiffeoJet:
    """Phase identity, z = M x″ on the parameters."""
    size = n + p
    full = linalg.identity(size)
    for r in range(p):
        for j in range(p):
            full[n + r][n + j] = matrix[r][j]
    return DiffeoJet.linear(full, n, p, order)


def rescale_diffeo(gammas: Dict[int, Jet], n: int, p: int, order: int) -> DiffeoJet:
    """y_i = x_i·exp(−γ_i(x″)); γ is lifted to ``order`` before the exponential."""
    comps = []
    for i in range(n):
        x_i = Jet.variable(i, n, p, order)
        gamma = gammas.get(i)
        if gamma is None or gamma.is_zero():
            comps.append(x_i)
            continue
        lifted = gamma.like(dict(gamma.terms), order=order)
        comps.append(x_i * (-lifted).exp())
    comps += [Jet.variable(n + j, n, p, order) for j in range(p)]
    return DiffeoJet(comps)


def _stage_flags(G: Dict[Pair, Jet], n: int, done: List[int]) -> Dict[str, bool]:
    """
    After the stages over ``done`` (free phase indices, by parameter slot):
    slices touching them vanish, and no slice depends on their parameters.
    """
    vanish = all(G[(k, i)].is_zero() for k in done for i in range(n) if i != k)
    slots = range(len(done))
    independent = all(not G[(i, j)].depends_on(n + r) for (i, j) in G for r in slots)
    return {"vanishing": vanish, "parameter_free": independent}


def rescale_quadratic_constants(pj: PoissonJet) -> Tuple[PoissonJet, DiffeoJet, RescaleReport]:
    S = pj.family
    n, p, order = pj.n, pj.p, pj.order
    free = S.free_indices()
    report = RescaleReport(free_indices=tuple(free))
    if len(free) < p:
        raise LambdaRankError(f"Λ has rank {len(free)} < p = {p}")
    if free != tuple(range(p)):
        logger.info(f"free indices of λ are {[i + 1 for i in free]}; zero condition applies to them")

    like = Jet.zero(n, p, order)
    verdict = cocycle_check(pj.bracket_table(), S, like)
    if not verdict:
        i, j, k = verdict.triple
        raise CocycleError(f"cyclic identity fails at ({i + 1}, {j + 1}, {k + 1})")

    lam_f = [[S.lam[j][i] for i in free] for j in range(p)]
    try:
        B = linalg.inverse(lam_f)
    except StructuralError as e:
        raise LambdaRankError("λ restricted to the free indices is singular") from e
    B_inv = linalg.inverse(B)

    to_frame = parameter_change(B, n, p, order)
    family = LinearFamily(linalg.mat_mul(B, [list(r) for r in S.lam]))
    current = PoissonJet(family, pushforward(to_frame, pj.P), validate=False)
    total = to_frame

    for r, k in enumerate(free):
        G = _slices(current.bracket_table(), like)
        gammas = {}
        for i in range(n):
            if i == k or G[(k, i)].is_zero():
                continue
            # Λ_k = ∂_{z_r} in this frame
            gammas[i] = G[(k, i)].integrate(n + r, order=G[(k, i)].order + 1)
        if gammas:
            step = rescale_diffeo(gammas, n, p, order)
            current = PoissonJet(family, pushforward(step, current.P), validate=False)
            total = step.compose(total)
        G = _slices(current.bracket_table(), like)
        flags = _stage_flags(G, n, list(free[: r + 1]))
        flags["cocycle"] = bool(cocycle_check(current.bracket_table(), family, like))
        report.stages.append(RescaleStage(k, gammas, flags))
        if not all(flags.values()):
            failed = [name for name, ok in flags.items() if not ok]
            raise CocycleError(f"stage {r + 1} (x{k + 1}) left {', '.join(failed)} unsatisfied")

    back = parameter_change(B_inv, n, p, order)
    result = pj.with_bivector(pushforward(back, current.P))
    total = back.compose(total)

    for (i, j), jet in result.bracket_table().quadratic_slices(like).items():
        if not jet.is_constant():
            raise CocycleError(f"slice ({i + 1}, {j + 1}) is not constant after rescaling")
        c = jet.constant_term()
        if c:
            report.constants[(i, j)] = c
    return result, total, report
