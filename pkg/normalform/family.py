"""Commuting families of vector fields with diagonal, parameter-free linear parts."""

from dataclasses import dataclass, field
from typing import List, Optional

from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import ConstructorCheckError
from polyvector.diffeo import DiffeoJet, pushforward_by_coordinates
from polyvector.polyvector import PolyVector
from spectrum.family import LinearFamily
from spectrum.resonance import ResonanceReport


def linear_phase_part(component: Jet, i: int, n_phase: int) -> Optional[Scalar]:
    """
    The x′-degree-one part of a component, when it is c·x_i with c constant.

    Returns None if it involves other phase variables or the parameters.
    """
    part = component.phase_degree_part(1)
    coefficient = Scalar.zero()
    for q, c in part.terms.items():
        if q[i] != 1 or sum(q) != 1:
            return None
        coefficient = c
    return coefficient


@dataclass
class FieldFamily:
    """
    p vector fields X_j over n phase and k parameter variables.

    Every field has phase components only, vanishes on the parameter axis
    x′ = 0 and has x′-linear part S_j.
    """

    fields: List[PolyVector]
    linear_parts: LinearFamily
    order: int = 0

    def __post_init__(self):
        if len(self.fields) != self.linear_parts.p:
            raise ConstructorCheckError(f"Expected {self.linear_parts.p} fields, got {len(self.fields)}")
        n = self.linear_parts.n
        for j, X in enumerate(self.fields):
            if X.degree != 1:
                raise ConstructorCheckError(f"Field {j + 1} is not a vector field")
            if X.n_phase != n:
                raise ConstructorCheckError(f"Field {j + 1} has {X.n_phase} phase variables, expected {n}")
            comps = X.vector_components()
            if any(not c.is_zero() for c in comps[n:]):
                raise ConstructorCheckError(f"Field {j + 1} has parameter components")
            for i in range(n):
                if not comps[i].restrict_phase().is_zero():
                    raise ConstructorCheckError(f"Field {j + 1} does not vanish on the parameter axis")
                c = linear_phase_part(comps[i], i, n)
                if c is None or c != self.linear_parts.lam[j][i]:
                    raise ConstructorCheckError(
                        f"Linear part of field {j + 1} at x{i + 1} is not the constant eigenvalue "
                        f"{self.linear_parts.lam[j][i]}"
                    )
        if not self.order:
            self.order = min(X.order for X in self.fields)

    @property
    def n_phase(self) -> int:
        return self.linear_parts.n

    @property
    def n_param(self) -> int:
        return self.fields[0].n_param


@dataclass
class NormalizationResult:
    diffeo: DiffeoJet
    normal_forms: List[PolyVector]
    resonance_support: ResonanceReport
    linear_parts: Optional[LinearFamily] = None
    log: List[str] = field(default_factory=list)

    def verify(self, fields: List[PolyVector]) -> bool:
        """Φ_* X_i = NF_i, recomputed through the coordinate pushforward."""
        inverse = self.diffeo.inverse()
        for X, nf in zip(fields, self.normal_forms):
            pushed = pushforward_by_coordinates(self.diffeo, X, inverse=inverse)
            order = min(pushed.order, nf.order)
            if pushed.truncate(order) != nf.truncate(order):
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "diffeo": self.diffeo.to_dict(),
            "normal_forms": [nf.to_dict() for nf in self.normal_forms],
            "resonance_support": self.resonance_support.to_dict(),
        }
