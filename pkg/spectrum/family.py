"""The eigenvalue matrix λ of the linear family S_1..S_p and its derived views."""

from typing import List, Sequence, Tuple

from algebra import linalg
from algebra.jet import Jet
from algebra.multiindex import pairing
from algebra.scalar import Scalar
from errors import ConstructorCheckError, ParseError, StructuralError
from polyvector.polyvector import PolyVector


class LinearFamily:
    """
    λ as a p×n matrix: row j holds the eigenvalues of S_j = Σ_i λ_ji x_i ∂_i.

    The rows must be linearly independent over C.
    """

    def __init__(self, lam: Sequence[Sequence]):
        rows = [[Scalar.from_dict(c) if not isinstance(c, Scalar) else c for c in row] for row in lam]
        if not rows or not rows[0]:
            raise ConstructorCheckError("Linear family needs p ≥ 1 rows and n ≥ 1 columns")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ConstructorCheckError("Eigenvalue rows have different lengths")
        if linalg.rank(rows) != len(rows):
            raise ConstructorCheckError("Eigenvalue rows are linearly dependent over C")
        self.lam: Tuple[Tuple[Scalar, ...], ...] = tuple(tuple(r) for r in rows)
        self.p = len(rows)
        self.n = n

    def row(self, j: int) -> Tuple[Scalar, ...]:
        return self.lam[j]

    def column(self, i: int) -> List[Scalar]:
        return [self.lam[j][i] for j in range(self.p)]

    def is_real(self) -> bool:
        return all(c.is_real() for r in self.lam for c in r)

    def free_indices(self) -> Tuple[int, ...]:
        """Phase indices whose Λ_i are independent: the pivot columns of rref(λ)."""
        _, pivots = linalg.rref([list(r) for r in self.lam])
        return pivots

    def S_fields(self, order: int, n_param: int = None) -> List[PolyVector]:
        """S_1..S_p as vector fields over n phase and n_param (default p) parameter variables."""
        n_param = self.p if n_param is None else n_param
        fields = []
        for j in range(self.p):
            components = [Jet.zero(self.n, n_param, order) for _ in range(self.n + n_param)]
            for i in range(self.n):
                components[i] = Jet.variable(i, self.n, n_param, order).scale(self.lam[j][i])
            fields.append(PolyVector.vector_field(components))
        return fields

    def Lambda_fields(self, order: int) -> List[PolyVector]:
        """Λ_i = Σ_j λ_ji ∂_{n+j} over the N = n + p variables."""
        fields = []
        for i in range(self.n):
            components = [Jet.zero(self.n, self.p, order) for _ in range(self.n + self.p)]
            for j in range(self.p):
                components[self.n + j] = Jet.constant(self.lam[j][i], self.n, self.p, order)
            fields.append(PolyVector.vector_field(components))
        return fields

    def linear_poisson(self, order: int) -> PolyVector:
        """𝓛 = Σ_k S_k ∧ ∂_{n+k}."""
        terms = {}
        for k in range(self.p):
            for i in range(self.n):
                if self.lam[k][i]:
                    terms[(i, self.n + k)] = Jet.variable(i, self.n, self.p, order).scale(self.lam[k][i])
        return PolyVector(2, self.n, self.p, order, terms)

    def pairings(self, q: Sequence[int]) -> List[Scalar]:
        """((Q, λ^j))_j for Q over the phase variables."""
        return [Scalar.coerce(pairing(q, self.lam[j])) for j in range(self.p)]

    def __eq__(self, other):
        if not isinstance(other, LinearFamily):
            return NotImplemented
        return self.lam == other.lam

    __hash__ = None

    def to_list(self) -> List[List[str]]:
        return [[str(c) for c in r] for r in self.lam]

    @classmethod
    def from_list(cls, data) -> "LinearFamily":
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise ParseError("lambda must be a list of rows")
        return cls(data)

    def __repr__(self):
        return f"LinearFamily({self.to_list()})"


def weight(S: LinearFamily, q: Sequence[int], i: int) -> List[Scalar]:
    """α_{Q,i}(S): the p values (Q, λ^j) − λ_ji."""
    if len(q) != S.n:
        raise StructuralError(f"Multi-index must have {S.n} entries, got {len(q)}")
    if not 0 <= i < S.n:
        raise StructuralError(f"Index {i + 1} out of range 1..{S.n}")
    return [v - S.lam[j][i] for j, v in enumerate(S.pairings(q))]
