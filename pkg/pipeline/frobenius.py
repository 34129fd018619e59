"""
Linear total differential systems ∂β/∂x_{v_i} = −Θ_i β + r_i.

The solution vanishing on {x_v = 0} is built one variable at a time: on the
slice where the later variables vanish, β solves the ODE in v_i with initial
value the previous solution, by Picard iteration. Compatibility is checked
first and every equation is re-verified on the result.
"""

from itertools import combinations
from typing import List, Optional, Sequence

from algebra import linalg
from algebra.jet import Jet
from errors import IncompatibleSystemError

JetMatrix = List[List[Jet]]


def _zero_matrix(size: int, like: Jet) -> JetMatrix:
    return [[Jet.zero(like.n_phase, like.n_param, like.order) for _ in range(size)] for _ in range(size)]


def _sub(a: Sequence[Jet], b: Sequence[Jet]) -> List[Jet]:
    return [x - y for x, y in zip(a, b)]


def _mat_sub(a: JetMatrix, b: JetMatrix) -> JetMatrix:
    return [_sub(r, s) for r, s in zip(a, b)]


def _all_zero(jets, order: int) -> bool:
    return all(j.truncate(order).is_zero() for j in jets)


def check_compatibility(thetas: Sequence[JetMatrix], rhs: Sequence[Sequence[Jet]], variables: Sequence[int], order: int):
    """
    −∂_jΘ_i + Θ_iΘ_j = −∂_iΘ_j + Θ_jΘ_i and ∂_j r_i − Θ_i r_j = ∂_i r_j − Θ_j r_i.
    """
    for a, b in combinations(range(len(variables)), 2):
        vi, vj = variables[a], variables[b]
        ti, tj = thetas[a], thetas[b]
        left = _mat_sub(linalg.jet_mat_mul(ti, tj), [[e.diff(vj) for e in r] for r in ti])
        right = _mat_sub(linalg.jet_mat_mul(tj, ti), [[e.diff(vi) for e in r] for r in tj])
        if not _all_zero([x for r in _mat_sub(left, right) for x in r], order):
            raise IncompatibleSystemError(f"Θ fails the curvature condition for x{vi + 1}, x{vj + 1}")
        left = _sub([e.diff(vj) for e in rhs[a]], linalg.jet_mat_vec(ti, rhs[b]))
        right = _sub([e.diff(vi) for e in rhs[b]], linalg.jet_mat_vec(tj, rhs[a]))
        if not _all_zero(_sub(left, right), order):
            raise IncompatibleSystemError(f"right-hand sides are incompatible for x{vi + 1}, x{vj + 1}")


def frobenius_solve(
    thetas: Sequence[Optional[JetMatrix]],
    rhs: Sequence[Sequence[Jet]],
    variables: Sequence[int],
) -> List[Jet]:
    if not variables:
        raise IncompatibleSystemError("no integration variables")
    if len(thetas) != len(variables) or len(rhs) != len(variables):
        raise IncompatibleSystemError("one Θ and one right-hand side are needed per variable")
    size = len(rhs[0])
    like = rhs[0][0]
    order = min(e.order for r in rhs for e in r)
    thetas = [t if t is not None else _zero_matrix(size, like) for t in thetas]
    order = min([order] + [e.order for t in thetas for r in t for e in r])
    if order < 1:
        raise IncompatibleSystemError("order too low to integrate")

    check_compatibility(thetas, rhs, variables, order - 1)

    beta = [Jet.zero(like.n_phase, like.n_param, order) for _ in range(size)]
    for idx, v in enumerate(variables):
        later = list(variables[idx + 1:])
        theta = [[e.restrict_zero(later) for e in r] for r in thetas[idx]]
        r_slice = [e.restrict_zero(later) for e in rhs[idx]]
        base = beta
        current = base
        for _ in range(order + 2):
            integrand = _sub(r_slice, linalg.jet_mat_vec(theta, current))
            new = [
                b + f.truncate(order - 1).integrate(v, order=order)
                for b, f in zip(base, integrand)
            ]
            if new == current:
                break
            current = new
        beta = current

    for idx, v in enumerate(variables):
        residual = _sub(
            [b.diff(v) for b in beta],
            _sub(rhs[idx], linalg.jet_mat_vec(thetas[idx], beta)),
        )
        if not _all_zero(residual, order - 1):
            raise IncompatibleSystemError(f"solution fails the equation in x{v + 1}")
    return beta
