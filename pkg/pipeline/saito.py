"""
Division of polyvectors by the family X_1..X_p.

``saito_divide`` writes a bivector T with T∧X_1∧…∧X_p = 0 as Σ X_i∧A_i. At
jet level this is one linear system whose unknowns are the coefficients of
x^Q x″^R ∂_l in A_i, restricted to weight-zero slots (Q, λ^j) = λ_jl with
|Q| ≥ 1, so that [S_j, A_i] = 0 and A_i(0, x″) = 0 hold by construction.
Free variables of the system are set to zero.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from algebra import linalg
from algebra import multiindex as mi
from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import SaitoDivisionError
from normalform.poincare_dulac import divide_by_linear_family
from polyvector.polyvector import PolyVector, lie_bracket, sort_indices, wedge
from spectrum.family import LinearFamily

logger = logging.getLogger(__name__)

Unknown = Tuple[int, int, Tuple[int, ...]]


def _weight_zero_slots(S: LinearFamily, d: int) -> List[Tuple[int, Tuple[int, ...]]]:
    """(l, Q) with 1 ≤ |Q| ≤ d and (Q, λ^j) = λ_jl for all j."""
    slots = []
    for q in mi.up_to_degree(S.n, d, start=1):
        values = S.pairings(q)
        for l in range(S.n):
            if values == S.column(l):
                slots.append((l, q))
    return slots


def _unknowns(S: LinearFamily, p_fields: int, d: int) -> List[Unknown]:
    out = []
    for l, q in _weight_zero_slots(S, d):
        for r in mi.up_to_degree(S.p, d - sum(q)):
            for i in range(p_fields):
                out.append((i, l, q + r))
    return out


def _column(X: PolyVector, l: int, mono: Tuple[int, ...], d: int) -> Dict[Tuple, Scalar]:
    """Coefficients of X ∧ (x^mono ∂_l) up to degree d, keyed by (indices, monomial)."""
    out: Dict[Tuple, Scalar] = {}
    for (a,), coef in X.terms.items():
        sign, key = sort_indices((a, l))
        if not sign:
            continue
        for q, c in coef.terms.items():
            m = tuple(x + y for x, y in zip(q, mono))
            if sum(m) > d:
                continue
            entry = (key, m)
            value = c if sign > 0 else -c
            out[entry] = out.get(entry, Scalar.zero()) + value
    return {k: v for k, v in out.items() if v}


def _check_rank_condition(T: PolyVector, X: Sequence[PolyVector]):
    if T.degree + len(X) > T.nvars:
        return
    product = T
    for field in X:
        product = wedge(product, field)
    if not product.is_zero():
        raise SaitoDivisionError("T ∧ X_1 ∧ … ∧ X_p does not vanish up to order")


def saito_divide(T: PolyVector, X: Sequence[PolyVector], S: LinearFamily) -> List[PolyVector]:
    X = list(X)
    if T.degree != 2:
        raise SaitoDivisionError(f"expected a bivector, got degree {T.degree}")
    n, k = T.n_phase, T.n_param
    d = min([T.order] + [field.order for field in X])
    if any(jet.phase_valuation() < 2 for jet in T.terms.values()):
        raise SaitoDivisionError("T has terms of x′-degree below 2")
    _check_rank_condition(T, X)
    if T.is_zero():
        return [PolyVector.zero(1, n, k, d) for _ in X]

    unknowns = _unknowns(S, len(X), d - 1)
    columns = [_column(X[i], l, mono, d) for i, l, mono in unknowns]
    target: Dict[Tuple, Scalar] = {}
    for idx, jet in T.truncate(d).terms.items():
        for q, c in jet.terms.items():
            target[(idx, q)] = c
    keys = sorted(set(target).union(*[set(c) for c in columns]))
    row_of = {key: r for r, key in enumerate(keys)}
    matrix = [[Scalar.zero()] * len(unknowns) for _ in keys]
    for u, col in enumerate(columns):
        for key, value in col.items():
            matrix[row_of[key]][u] = value
    rhs = [target.get(key, Scalar.zero()) for key in keys]
    logger.debug(f"division system with {len(keys)} equations and {len(unknowns)} unknowns")
    solution = linalg.solve(matrix, rhs)
    if solution is None:
        raise SaitoDivisionError(f"no weight-zero division up to order {d}")

    comps: List[List[Dict]] = [[{} for _ in range(n + k)] for _ in X]
    for (i, l, mono), value in zip(unknowns, solution):
        if value:
            comps[i][l][mono] = value
    A = [PolyVector.vector_field([Jet(n, k, d, terms) for terms in field_comps]) for field_comps in comps]

    rebuilt = PolyVector.zero(2, n, k, d)
    for field, a in zip(X, A):
        rebuilt = rebuilt + wedge(field, a)
    if rebuilt.truncate(d) != T.truncate(d):
        raise SaitoDivisionError("division does not reconstruct T")
    for s in S.S_fields(d, n_param=k):
        if any(not lie_bracket(s, a).is_zero() for a in A):
            raise SaitoDivisionError("a quotient does not commute with the S_j")
    return A


def divide_by_family(
    V: PolyVector,
    X: Sequence[PolyVector],
    S: LinearFamily,
    matrix: Optional[List[List[Jet]]] = None,
) -> List[Jet]:
    """
    θ with V = Σ_l θ_l X_l.

    With X_l = Σ_m a_lm S_m and V = Σ_m c_m S_m this is θ = (aᵀ)⁻¹ c.
    """
    c = divide_by_linear_family(V, S)
    if c is None:
        raise SaitoDivisionError("vector field is not a combination of the S_j")
    if matrix is None:
        matrix = []
        for field in X:
            row = divide_by_linear_family(field, S)
            if row is None:
                raise SaitoDivisionError("family member is not a combination of the S_j")
            matrix.append(row)
    p = len(matrix)
    transposed = [[matrix[l][m] for l in range(p)] for m in range(p)]
    theta = linalg.jet_mat_vec(linalg.jet_matrix_inverse(transposed), c)

    order = min(t.order for t in theta)
    rebuilt = PolyVector.zero(1, V.n_phase, V.n_param, order)
    for t, field in zip(theta, X):
        rebuilt = rebuilt + field * t
    if rebuilt.truncate(order) != V.truncate(order):
        raise SaitoDivisionError("family division does not reconstruct the field")
    return theta
