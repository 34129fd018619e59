"""
Flow-box coordinates for a vector field transverse to {x_{n+q} = 0}.

Ψ(y) = flow of Ã for time y_{n+q} started at (y with y_{n+q} = 0) solves
Z = Z₀ + ∫₀^{y_{n+q}} Ã(Z) by Picard iteration. G = Ψ⁻¹ sends Ã to ∂_{n+q};
fields commuting with Ã and tangent to the slice are kept.
"""

import logging
from typing import Sequence

from algebra.jet import Jet, Substitution
from errors import StraighteningError
from polyvector.diffeo import DiffeoJet, invert_diffeo, pushforward
from polyvector.polyvector import PolyVector, lie_bracket

logger = logging.getLogger(__name__)


def coordinate_field(var: int, n_phase: int, n_param: int, order: int) -> PolyVector:
    return PolyVector.basis((var,), n_phase, n_param, order)


def is_coordinate_field(field: PolyVector, var: int) -> bool:
    return field == coordinate_field(var, field.n_phase, field.n_param, field.order)


def flow_box(field: PolyVector, var: int) -> DiffeoJet:
    n, k, order = field.n_phase, field.n_param, field.order
    comps = field.vector_components()
    ys = [Jet.variable(v, n, k, order) for v in range(n + k)]
    base = [y if v != var else Jet.zero(n, k, order) for v, y in enumerate(ys)]
    Z = ys
    for _ in range(order + 2):
        sub = Substitution(Z)
        new = [
            base[v] + comps[v].compose(Z, cache=sub).truncate(order - 1).integrate(var, order=order)
            for v in range(n + k)
        ]
        if new == Z:
            break
        Z = new
    return DiffeoJet(Z)


def straighten_field(field: PolyVector, q: int, preserve: Sequence[PolyVector] = ()) -> DiffeoJet:
    """
    G with G_*Ã = ∂_{n+q}; each V in ``preserve`` must commute with Ã.
    """
    if field.degree != 1:
        raise StraighteningError(f"expected a vector field, got degree {field.degree}")
    n, k, order = field.n_phase, field.n_param, field.order
    var = n + q
    if order < 1:
        raise StraighteningError("order too low to straighten")
    at_origin = [c.constant_term() for c in field.vector_components()]
    if any(c != (1 if v == var else 0) for v, c in enumerate(at_origin)):
        raise StraighteningError(f"field is not ∂{var + 1} at the origin")
    for idx, V in enumerate(preserve):
        if not lie_bracket(field, V).is_zero():
            raise StraighteningError(f"field does not commute with preserved field {idx + 1}")
    if is_coordinate_field(field, var):
        return DiffeoJet.identity(n, k, order)

    psi = flow_box(field, var)
    G = invert_diffeo(psi)
    pushed = pushforward(G, field, inverse=psi)
    if pushed != coordinate_field(var, n, k, pushed.order):
        raise StraighteningError(f"flow box does not send the field to ∂{var + 1}")
    for idx, V in enumerate(preserve):
        image = pushforward(G, V, inverse=psi)
        if image != V.truncate(image.order):
            raise StraighteningError(f"preserved field {idx + 1} moved under straightening")
    logger.debug(f"straightened along x{var + 1} at order {G.order}")
    return G
