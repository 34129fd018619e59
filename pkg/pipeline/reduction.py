"""
Reduction to a family vanishing on the parameter axis.

A generic combination X = Σ_j t^j X_j has an invertible phase linearization,
so its zero set near 0 is a graph x′ = g(x″). Translating x′ ↦ x′ − g(x″)
makes every X_j vanish on x′ = 0.
"""

import logging
from typing import List, Tuple

from algebra import linalg
from algebra.jet import Jet, Substitution
from algebra.scalar import Scalar
from errors import (
    NonInvertibleLinearizationError,
    OrderTwoViolation,
    ParameterDependentEigenvaluesError,
    StageError,
    StructuralError,
)
from normalform.family import linear_phase_part
from pipeline.poisson_jet import PoissonJet
from polyvector.diffeo import DiffeoJet, pushforward
from polyvector.polyvector import PolyVector

logger = logging.getLogger(__name__)


def choose_combination(pj: PoissonJet) -> List[Scalar]:
    """
    Weights w_j = t^j with Σ_j w_j λ_j free of zeros.

    The first row alone is used when it has no zero eigenvalue.
    """
    lam = pj.family.lam
    p, n = pj.p, pj.n
    if all(lam[0][i] for i in range(n)):
        return [Scalar.one()] + [Scalar.zero()] * (p - 1)
    # each combined eigenvalue is a polynomial of degree < p in t
    for t in range(1, n * p + 2):
        weights = [Scalar(t) ** j for j in range(p)]
        mu = [sum((weights[j] * lam[j][i] for j in range(p)), Scalar.zero()) for i in range(n)]
        if all(mu):
            return weights
    raise NonInvertibleLinearizationError("Every combination of the S_j has a zero eigenvalue")


def _combine_fields(fields: List[PolyVector], weights: List[Scalar]) -> PolyVector:
    total = None
    for w, X in zip(weights, fields):
        if not w:
            continue
        term = X * w
        total = term if total is None else total + term
    return total


def solve_zero_set(X: PolyVector, n: int) -> List[Jet]:
    """
    g(x″) with X(g(x″), x″) = 0, by the fixed point g = −B⁻¹(c(x″) + h(g, x″)).

    B is the phase linearization at 0, c the part of X free of x′ and h the rest.
    """
    comps = X.vector_components()[:n]
    k = X.n_param
    order = X.order
    size = n + k
    B = [[comps[i].coefficient(tuple(1 if m == l else 0 for m in range(size))) for l in range(n)] for i in range(n)]
    try:
        b_inv = linalg.inverse(B)
    except StructuralError as e:
        raise NonInvertibleLinearizationError("Phase linearization of the combined field is singular") from e

    linear = []
    for i in range(n):
        terms = {q: c for q, c in comps[i].terms.items() if sum(q[:n]) == 1 and sum(q) == 1}
        linear.append(comps[i].like(terms))
    rest = [comps[i] - linear[i] for i in range(n)]
    params = [Jet.variable(n + j, n, k, order) for j in range(k)]
    g = [Jet.zero(n, k, order) for _ in range(n)]
    for _ in range(order + 1):
        sub = Substitution(g + params)
        values = [h.compose(g + params, cache=sub) for h in rest]
        new = []
        for i in range(n):
            total = Jet.zero(n, k, order)
            for l in range(n):
                if b_inv[i][l]:
                    total = total - values[l].scale(b_inv[i][l])
            new.append(total)
        if new == g:
            break
        g = new
    return g


def translation(g: List[Jet], n: int, k: int, order: int) -> DiffeoJet:
    """y′ = x′ − g(x″), y″ = x″."""
    comps = [Jet.variable(i, n, k, order) - g[i] for i in range(n)]
    comps += [Jet.variable(n + j, n, k, order) for j in range(k)]
    return DiffeoJet(comps)


def _check_reduced(pj: PoissonJet):
    n = pj.n
    for j, X in enumerate(pj.hamiltonians()):
        comps = X.vector_components()
        for i in range(n):
            if not comps[i].restrict_phase().is_zero():
                raise StageError("reduce_poisson", f"X{j + 1} does not vanish on the parameter axis")
            c = linear_phase_part(comps[i], i, n)
            if c is None or c != pj.family.lam[j][i]:
                raise ParameterDependentEigenvaluesError(
                    f"Linear part of X{j + 1} at x{i + 1} is not the constant {pj.family.lam[j][i]}"
                )


def check_order_two(pj: PoissonJet):
    """{x_i, x_j} ∈ 𝓜² in x′ for phase indices."""
    for (i, j), jet in pj.bracket_table().g.items():
        if jet.phase_valuation() < 2:
            raise OrderTwoViolation(
                f"{{x{i + 1}, x{j + 1}}} has a term of x′-degree {jet.phase_valuation()}"
            )


def reduce_poisson(pj: PoissonJet) -> Tuple[PoissonJet, DiffeoJet]:
    n, p, order = pj.n, pj.p, pj.order
    if pj.is_reduced():
        identity = DiffeoJet.identity(n, p, order)
        _check_reduced(pj)
        check_order_two(pj)
        return pj, identity

    weights = choose_combination(pj)
    X = _combine_fields(pj.hamiltonians(), weights)
    g = solve_zero_set(X, n)
    logger.debug(f"zero set of the combined field: {[str(c) for c in g]}")
    phi = translation(g, n, p, order)
    reduced = pj.with_bivector(pushforward(phi, pj.P))
    _check_reduced(reduced)
    check_order_two(reduced)
    return reduced, phi
