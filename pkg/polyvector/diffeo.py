"""
Formal coordinate changes y = Φ(x) fixing the origin, and pushforwards.

Two independent pushforward paths are provided: the Jacobian path pushes each
∂_i through DΦ, the coordinate path contracts T with dΦ_{k1}∧…∧dΦ_{kq}. The
pipelines use the first and verify with the second.
"""

from itertools import combinations, permutations
from typing import Dict, List, Optional, Sequence

from algebra import linalg
from algebra.jet import Jet, Substitution
from algebra.scalar import Scalar
from errors import DomainError, ParseError, StructuralError
from polyvector.polyvector import Indices, PolyVector, as_polyvector, sort_indices, wedge


class DiffeoJet:
    """Components Φ_0..Φ_{N−1}; y_i = Φ_i(x)."""

    __slots__ = ("components", "n_phase", "n_param", "order")

    def __init__(self, components: Sequence[Jet]):
        components = list(components)
        if not components:
            raise StructuralError("A diffeo needs components")
        first = components[0]
        if len(components) != first.nvars:
            raise StructuralError(f"Expected {first.nvars} components, got {len(components)}")
        for c in components:
            first._check(c)
            if c.constant_term():
                raise DomainError("Diffeo must fix the origin")
        self.order = min(c.order for c in components)
        self.components = tuple(c.truncate(self.order) for c in components)
        self.n_phase = first.n_phase
        self.n_param = first.n_param

    @classmethod
    def identity(cls, n_phase: int, n_param: int, order: int) -> "DiffeoJet":
        return cls([Jet.variable(k, n_phase, n_param, order) for k in range(n_phase + n_param)])

    @classmethod
    def linear(cls, matrix: Sequence[Sequence], n_phase: int, n_param: int, order: int) -> "DiffeoJet":
        """y_i = Σ_k M_ik x_k."""
        size = n_phase + n_param
        xs = [Jet.variable(k, n_phase, n_param, order) for k in range(size)]
        return cls([_combine(row, xs, n_phase, n_param, order) for row in matrix])

    @property
    def nvars(self) -> int:
        return self.n_phase + self.n_param

    def linear_part(self) -> List[List[Scalar]]:
        size = self.nvars
        return [
            [c.coefficient(tuple(1 if k == m else 0 for m in range(size))) for k in range(size)]
            for c in self.components
        ]

    def is_tangent_to_identity(self) -> bool:
        return self.linear_part() == linalg.identity(self.nvars)

    def is_identity(self) -> bool:
        return all(c == Jet.variable(k, self.n_phase, self.n_param, self.order) for k, c in enumerate(self.components))

    def compose(self, other: "DiffeoJet") -> "DiffeoJet":
        """(self ∘ other)(x) = self(other(x))."""
        sub = Substitution(other.components)
        return DiffeoJet([c.compose(other.components, cache=sub) for c in self.components])

    def inverse(self) -> "DiffeoJet":
        return invert_diffeo(self)

    def pullback(self, f: Jet) -> Jet:
        """f ∘ Φ."""
        return f.compose(self.components)

    def jacobian(self) -> List[List[Jet]]:
        """Entries ∂Φ_i/∂x_k."""
        return [[c.diff(k) for k in range(self.nvars)] for c in self.components]

    def truncate(self, d: int) -> "DiffeoJet":
        return DiffeoJet([c.truncate(d) for c in self.components])

    def __eq__(self, other):
        if not isinstance(other, DiffeoJet):
            return NotImplemented
        return self.components == other.components

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "n_phase": self.n_phase,
            "n_param": self.n_param,
            "order": self.order,
            "components": [c.to_list() for c in self.components],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiffeoJet":
        try:
            n_phase, n_param, order = int(data["n_phase"]), int(data["n_param"]), int(data["order"])
            raw = data["components"]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"diffeo is missing a field: {e}") from e
        if len(raw) != n_phase + n_param:
            raise ParseError(f"diffeo needs {n_phase + n_param} components")
        return cls([Jet.from_list(c, n_phase, n_param, order) for c in raw])

    def __repr__(self):
        body = ", ".join(f"y{k + 1} = {c}" for k, c in enumerate(self.components))
        return f"DiffeoJet[order {self.order}]({body})"


def _combine(coeffs: Sequence, jets: Sequence[Jet], n_phase: int, n_param: int, order: int) -> Jet:
    total = Jet.zero(n_phase, n_param, order)
    for c, j in zip(coeffs, jets):
        c = Scalar.coerce(c)
        if c:
            total = total + j.scale(c)
    return total


def invert_diffeo(phi: DiffeoJet) -> DiffeoJet:
    """Fixed-point inversion Ψ = A⁻¹(y − h(Ψ)) for Φ = A x + h."""
    try:
        a_inv = linalg.inverse(phi.linear_part())
    except StructuralError as e:
        raise StructuralError("Diffeo has a singular linear part") from e
    n_phase, n_param, order = phi.n_phase, phi.n_param, phi.order
    ys = [Jet.variable(k, n_phase, n_param, order) for k in range(phi.nvars)]
    nonlinear = [c - c.homogeneous_part(1) for c in phi.components]
    psi = [_combine(row, ys, n_phase, n_param, order) for row in a_inv]
    if all(h.is_zero() for h in nonlinear):
        return DiffeoJet(psi)
    for _ in range(order):
        sub = Substitution(psi)
        shifted = [y - h.compose(psi, cache=sub) for y, h in zip(ys, nonlinear)]
        new = [_combine(row, shifted, n_phase, n_param, order) for row in a_inv]
        if new == psi:
            break
        psi = new
    return DiffeoJet(psi)


def _check_split(phi: DiffeoJet, T: PolyVector):
    if (phi.n_phase, phi.n_param) != (T.n_phase, T.n_param):
        raise StructuralError("Diffeo and polyvector live on different variable splits")


def _trusted_order(phi: DiffeoJet, T: PolyVector) -> int:
    return max(0, min(T.order, phi.order + T.valuation() - 1))


def _compose_all(T: PolyVector, psi: DiffeoJet, order: int) -> PolyVector:
    sub = Substitution(psi.components)
    out = {idx: jet.compose(psi.components, cache=sub) for idx, jet in T.terms.items()}
    return PolyVector(T.degree, T.n_phase, T.n_param, order, out)


def pushforward(phi: DiffeoJet, T, inverse: Optional[DiffeoJet] = None) -> PolyVector:
    """Φ_*T (y) = DΦ(Φ⁻¹(y)) T(Φ⁻¹(y)), through the Jacobian."""
    T = as_polyvector(T)
    _check_split(phi, T)
    psi = inverse if inverse is not None else invert_diffeo(phi)
    order = _trusted_order(phi, T)
    if T.degree == 0:
        return _compose_all(T, psi, order)

    jac = phi.jacobian()
    # image of ∂_i is Σ_k ∂_iΦ_k ∂_k
    images = [
        PolyVector.vector_field([jac[k][i] for k in range(phi.nvars)]) for i in range(phi.nvars)
    ]
    cache: Dict[Indices, PolyVector] = {}

    def image(idx: Indices) -> PolyVector:
        if idx not in cache:
            result = images[idx[0]]
            for i in idx[1:]:
                result = wedge(result, images[i])
            cache[idx] = result
        return cache[idx]

    total = PolyVector.zero(T.degree, T.n_phase, T.n_param, min(T.order, phi.order))
    for idx, coef in T.terms.items():
        total = total + image(idx) * coef
    return _compose_all(total, psi, order)


def pushforward_by_coordinates(phi: DiffeoJet, T, inverse: Optional[DiffeoJet] = None) -> PolyVector:
    """Φ_*T with components ⟨T, dΦ_{k1}∧…∧dΦ_{kq}⟩ ∘ Φ⁻¹."""
    T = as_polyvector(T)
    _check_split(phi, T)
    psi = inverse if inverse is not None else invert_diffeo(phi)
    order = _trusted_order(phi, T)
    if T.degree == 0:
        return _compose_all(T, psi, order)

    q = T.degree
    grads = [[c.diff(i) for i in range(phi.nvars)] for c in phi.components]
    perms = [(p, sort_indices(p)[0]) for p in permutations(range(q))]
    work = min(T.order, phi.order)
    out: Dict[Indices, Jet] = {}
    for target in combinations(range(phi.nvars), q):
        total = Jet.zero(T.n_phase, T.n_param, work)
        for idx, coef in T.terms.items():
            det = Jet.zero(T.n_phase, T.n_param, work)
            for perm, sign in perms:
                term = coef
                for s in range(q):
                    term = term * grads[target[perm[s]]][idx[s]]
                    if term.is_zero():
                        break
                det = det + term if sign > 0 else det - term
            total = total + det
        if not total.is_zero():
            out[target] = total
    return _compose_all(PolyVector(q, T.n_phase, T.n_param, work, out), psi, order)
