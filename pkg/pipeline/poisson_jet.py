"""
Poisson jets in the semi-direct frame C^p ⋉ C^n.

P lives over N = n + p variables; the hamiltonians of the parameter
coordinates are X_k = hamiltonian_field(P, x_{n+k}) and the bracket between
phase coordinates is g_ij = {x_i, x_j}.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import ConstructorCheckError, DomainError, ParseError
from polyvector.poisson import hamiltonian_field, jacobi_sums
from polyvector.polyvector import PolyVector
from spectrum.family import LinearFamily

Pair = Tuple[int, int]


@dataclass
class BracketTable:
    """g_ij = {x_i, x_j} for phase indices i < j."""

    n_phase: int
    g: Dict[Pair, Jet] = field(default_factory=dict)

    def entry(self, i: int, j: int) -> Optional[Jet]:
        """Signed lookup; None when the pair carries no terms."""
        if i == j:
            return None
        if i < j:
            return self.g.get((i, j))
        jet = self.g.get((j, i))
        return None if jet is None else -jet

    def quadratic_slice(self, i: int, j: int, like: Jet) -> Jet:
        """g_{i,j,E_i+E_j}(x″), the coefficient of x_i x_j."""
        jet = self.entry(i, j)
        if jet is None:
            return Jet.zero(like.n_phase, like.n_param, max(like.order - 2, 0))
        q = tuple(1 if k in (i, j) else 0 for k in range(self.n_phase))
        return jet.phase_coefficient(q)

    def quadratic_slices(self, like: Jet) -> Dict[Pair, Jet]:
        return {(i, j): self.quadratic_slice(i, j, like) for i, j in combinations(range(self.n_phase), 2)}

    def to_dict(self) -> dict:
        return {f"{i + 1},{j + 1}": jet.to_list() for (i, j), jet in sorted(self.g.items())}


class PoissonJet:
    """
    A bivector P with its eigenvalue family.

    Construction checks H5 ({x_{n+i}, x_{n+j}} = 0), the Jacobi identity to
    the trusted order and the x′-linear part of every hamiltonian on the
    phase space x″ = 0. ``validate=False`` skips them for diagnostics.
    """

    def __init__(self, family: LinearFamily, P: PolyVector, validate: bool = True):
        if P.degree != 2:
            raise ConstructorCheckError(f"P must be a bivector, got degree {P.degree}")
        if (P.n_phase, P.n_param) != (family.n, family.p):
            raise ConstructorCheckError(
                f"P lives on {P.n_phase}+{P.n_param} variables, family needs {family.n}+{family.p}"
            )
        self.family = family
        self.P = P
        self._hamiltonians: Optional[List[PolyVector]] = None
        if validate:
            self.validate()

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def p(self) -> int:
        return self.family.p

    @property
    def order(self) -> int:
        return self.P.order

    def with_bivector(self, P: PolyVector, family: Optional[LinearFamily] = None, validate: bool = True) -> "PoissonJet":
        return PoissonJet(family or self.family, P, validate=validate)

    # Checks

    def validate(self):
        self.check_h5()
        self.check_jacobi()
        self.check_linear_part()

    def check_h5(self):
        n = self.n
        for a, b in combinations(range(self.p), 2):
            if not self.P.component((n + a, n + b)).is_zero():
                raise ConstructorCheckError(
                    f"H5 fails: {{x{n + a + 1}, x{n + b + 1}}} is not zero"
                )

    def check_jacobi(self):
        sums = jacobi_sums(self.P)
        if sums:
            (i, j, k), defect = next(iter(sorted(sums.items())))
            raise ConstructorCheckError(
                f"Jacobi identity fails at (x{i + 1}, x{j + 1}, x{k + 1}): {defect}"
            )

    def check_linear_part(self):
        """DX_k at x = 0 restricted to the phase directions is diag(λ_k)."""
        if any(jet.constant_term() for jet in self.P.terms.values()):
            raise ConstructorCheckError("P must vanish at the origin")
        for k, X in enumerate(self.hamiltonians()):
            comps = X.vector_components()
            for i in range(self.n):
                linear = comps[i].restrict_parameters().homogeneous_part(1)
                expected = Jet.variable(i, self.n, self.p, linear.order).scale(self.family.lam[k][i])
                if linear != expected:
                    raise ConstructorCheckError(
                        f"Linear part of X{k + 1} at x{i + 1} is {linear}, expected {expected}"
                    )

    def linear_part_matches(self) -> bool:
        """Full 1-jet of P equals 𝓛."""
        linear = self.P.map_coefficients(lambda jet: jet.homogeneous_part(1), order=self.order)
        return linear == self.family.linear_poisson(self.order)

    # Derived data

    def hamiltonians(self) -> List[PolyVector]:
        if self._hamiltonians is None:
            n, p, order = self.n, self.p, self.order
            self._hamiltonians = [
                hamiltonian_field(self.P, Jet.variable(n + k, n, p, order)) for k in range(p)
            ]
        return self._hamiltonians

    def is_reduced(self) -> bool:
        """Every X_k vanishes on the parameter axis x′ = 0."""
        return all(
            c.restrict_phase().is_zero()
            for X in self.hamiltonians()
            for c in X.vector_components()[: self.n]
        )

    def linear_part(self) -> PolyVector:
        return self.P.map_coefficients(lambda jet: jet.homogeneous_part(1), order=self.order)

    def structure_constants(self) -> Dict[Tuple[int, int, int], Scalar]:
        """c_ij^k = ∂P_ij/∂x_k(0) for i < j, nonzero entries only."""
        size = self.n + self.p
        out = {}
        for (i, j), jet in self.P.items():
            for k in range(size):
                c = jet.coefficient(tuple(1 if m == k else 0 for m in range(size)))
                if c:
                    out[(i, j, k)] = c
        return out

    def bracket_table(self) -> BracketTable:
        g = {}
        for i, j in combinations(range(self.n), 2):
            jet = self.P.component((i, j))
            if not jet.is_zero():
                g[(i, j)] = jet
        return BracketTable(self.n, g)

    def phase_bivector(self) -> PolyVector:
        """The part Σ_{i<j≤n} g_ij ∂_i∧∂_j."""
        terms = {idx: jet for idx, jet in self.P.terms.items() if idx[1] < self.n}
        return PolyVector(2, self.n, self.p, self.order, terms)

    # Serialization

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "order": self.order,
            "lambda": self.family.to_list(),
            "brackets": {
                f"{i + 1},{j + 1}": jet.to_list() for (i, j), jet in self.P.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict, validate: bool = True) -> "PoissonJet":
        try:
            n, p, order = int(data["n"]), int(data["p"]), int(data["order"])
            family = LinearFamily.from_list(data["lambda"])
            raw = data.get("brackets", {})
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"Poisson jet is missing a field: {e}") from e
        if (family.n, family.p) != (n, p):
            raise ParseError(f"lambda is {family.p}x{family.n}, expected {p}x{n}")
        P = bivector_from_brackets(raw, n, p, order)
        return cls(family, P, validate=validate)

    def __repr__(self):
        return f"PoissonJet(n={self.n}, p={self.p}, order={self.order})"


def bivector_from_brackets(raw: dict, n: int, p: int, order: int) -> PolyVector:
    """Parse {"i,j": jet} with 1-based indices into a bivector."""
    if not isinstance(raw, dict):
        raise ParseError("brackets must be an object keyed by 'i,j'")
    size = n + p
    terms: Dict[Pair, Jet] = {}
    for key, jet_data in raw.items():
        try:
            i, j = (int(x) for x in str(key).split(","))
        except ValueError as e:
            raise ParseError(f"bad bracket key {key!r}", "brackets") from e
        if not (1 <= i <= size and 1 <= j <= size) or i == j:
            raise ParseError(f"bracket key {key!r} out of range 1..{size}", "brackets")
        try:
            jet = Jet.from_list(jet_data, n, p, order)
        except DomainError as e:
            raise ParseError(f"bracket {key!r}: {e}", "brackets") from e
        a, b = i - 1, j - 1
        if a > b:
            a, b, jet = b, a, -jet
        terms[(a, b)] = terms[(a, b)] + jet if (a, b) in terms else jet
    return PolyVector(2, n, p, order, terms)
