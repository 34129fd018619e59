"""
Polyvector fields with jet coefficients.

A PolyVector of degree k stores Σ_I T_I ∂_{i1}∧…∧∂_{ik} with strictly
increasing index tuples I. Degree 0 wraps a single Jet so that functions,
vector fields and bivectors share one bracket.

The Schouten bracket follows the sign rules

    [A, B] = (−1)^{ab} [B, A]
    [A, B∧C] = [A, B]∧C + (−1)^{ab+b} B∧[A, C]

with [X, T] the Lie derivative when X is a vector field.
"""

from types import MappingProxyType
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import ParseError, StructuralError

Indices = Tuple[int, ...]


def sort_indices(indices: Sequence[int]) -> Tuple[int, Indices]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


class PolyVector:
    """Immutable degree-k polyvector over N = n_phase + n_param variables."""

    __slots__ = ("degree", "n_phase", "n_param", "order", "_terms")

    def __init__(
        self,
        degree: int,
        n_phase: int,
        n_param: int,
        order: int,
        terms: Optional[Mapping[Sequence[int], Jet]] = None,
    ):
        size = n_phase + n_param
        if not 0 <= degree <= size:
            raise StructuralError(f"Degree {degree} out of range for {size} variables")
        terms = dict(terms or {})
        for jet in terms.values():
            if not isinstance(jet, Jet):
                raise StructuralError("PolyVector coefficients must be Jets")
            if jet.n_phase != n_phase or jet.n_param != n_param:
                raise StructuralError("Coefficient variable split does not match the polyvector")
            order = min(order, jet.order)
        clean: Dict[Indices, Jet] = {}
        for idx, jet in terms.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree or any(not 0 <= i < size for i in idx):
                raise StructuralError(f"Bad index tuple {idx} for degree {degree}")
            sign, key = sort_indices(idx)
            if not sign:
                continue
            jet = jet.truncate(order)
            if sign < 0:
                jet = -jet
            clean[key] = clean[key] + jet if key in clean else jet
        self.degree = degree
        self.n_phase = n_phase
        self.n_param = n_param
        self.order = order
        self._terms = {k: v for k, v in clean.items() if not v.is_zero()}

    @classmethod
    def _raw(cls, degree: int, n_phase: int, n_param: int, order: int, terms: Dict) -> "PolyVector":
        obj = object.__new__(cls)
        obj.degree = degree
        obj.n_phase = n_phase
        obj.n_param = n_param
        obj.order = order
        obj._terms = {k: v for k, v in terms.items() if not v.is_zero()}
        return obj

    # Constructors

    @classmethod
    def zero(cls, degree: int, n_phase: int, n_param: int, order: int) -> "PolyVector":
        return cls(degree, n_phase, n_param, order)

    @classmethod
    def basis(
        cls,
        indices: Sequence[int],
        n_phase: int,
        n_param: int,
        order: int,
        coefficient: Optional[Jet] = None,
    ) -> "PolyVector":
        """coefficient · ∂_{i1}∧…∧∂_{ik} (coefficient 1 by default)."""
        if coefficient is None:
            coefficient = Jet.one(n_phase, n_param, order)
        return cls(len(indices), n_phase, n_param, order, {tuple(indices): coefficient})

    @classmethod
    def vector_field(cls, components: Sequence[Jet]) -> "PolyVector":
        if not components:
            raise StructuralError("A vector field needs at least one component")
        first = components[0]
        if len(components) != first.nvars:
            raise StructuralError(f"Expected {first.nvars} components, got {len(components)}")
        order = min(c.order for c in components)
        return cls(1, first.n_phase, first.n_param, order, {(k,): c for k, c in enumerate(components)})

    @classmethod
    def from_jet(cls, f: Jet) -> "PolyVector":
        return cls(0, f.n_phase, f.n_param, f.order, {(): f})

    def like(self, degree: int, terms: Dict, order: Optional[int] = None) -> "PolyVector":
        return PolyVector._raw(degree, self.n_phase, self.n_param, self.order if order is None else order, terms)

    # Views

    @property
    def nvars(self) -> int:
        return self.n_phase + self.n_param

    @property
    def terms(self) -> Mapping[Indices, Jet]:
        return MappingProxyType(self._terms)

    def items(self) -> List[Tuple[Indices, Jet]]:
        return sorted(self._terms.items())

    def component(self, indices: Sequence[int]) -> Jet:
        """Signed coefficient for any ordering of the indices."""
        sign, key = sort_indices(indices)
        jet = self._terms.get(key) if sign else None
        if jet is None:
            return Jet.zero(self.n_phase, self.n_param, self.order)
        return jet if sign > 0 else -jet

    def as_jet(self) -> Jet:
        if self.degree != 0:
            raise StructuralError(f"Degree {self.degree} polyvector is not a function")
        return self.component(())

    def vector_components(self) -> List[Jet]:
        if self.degree != 1:
            raise StructuralError(f"Degree {self.degree} polyvector is not a vector field")
        return [self.component((k,)) for k in range(self.nvars)]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def valuation(self) -> int:
        if not self._terms:
            return self.order + 1
        return min(j.valuation() for j in self._terms.values())

    # Linear structure

    def _check(self, other: "PolyVector"):
        if (self.n_phase, self.n_param) != (other.n_phase, other.n_param):
            raise StructuralError("Polyvector variable splits differ")
        if self.degree != other.degree:
            raise StructuralError(f"Cannot add degrees {self.degree} and {other.degree}")

    def __add__(self, other: "PolyVector") -> "PolyVector":
        if not isinstance(other, PolyVector):
            return NotImplemented
        self._check(other)
        order = min(self.order, other.order)
        out = {k: v.truncate(order) for k, v in self._terms.items()}
        for k, v in other._terms.items():
            out[k] = out[k] + v if k in out else v.truncate(order)
        return self.like(self.degree, out, order=order)

    def __neg__(self):
        return self.like(self.degree, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "PolyVector") -> "PolyVector":
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Union[Jet, Scalar, int]) -> "PolyVector":
        """Multiply every coefficient by a function or constant."""
        if isinstance(other, PolyVector):
            return NotImplemented
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return self.like(self.degree, {k: v * other for k, v in self._terms.items()}, order=order)
        return self.like(self.degree, {k: v.scale(other) for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        """Same degree, split and coefficients; orders are not compared."""
        if not isinstance(other, PolyVector):
            return NotImplemented
        return (
            self.degree == other.degree
            and (self.n_phase, self.n_param) == (other.n_phase, other.n_param)
            and self._terms == other._terms
        )

    __hash__ = None

    def truncate(self, d: int) -> "PolyVector":
        d = min(d, self.order)
        return self.like(self.degree, {k: v.truncate(d) for k, v in self._terms.items()}, order=d)

    def map_coefficients(self, fn: Callable[[Jet], Jet], order: Optional[int] = None) -> "PolyVector":
        out = {k: fn(v) for k, v in self._terms.items()}
        if order is None:
            order = min((v.order for v in out.values()), default=self.order)
        return PolyVector(self.degree, self.n_phase, self.n_param, order, out)

    def restrict_zero(self, variables: Iterable[int]) -> "PolyVector":
        vs = list(variables)
        return self.like(self.degree, {k: v.restrict_zero(vs) for k, v in self._terms.items()})

    def restrict_parameters(self) -> "PolyVector":
        return self.restrict_zero(range(self.n_phase, self.nvars))

    # Vector fields

    def apply(self, f: Jet) -> Jet:
        """Derivation X(f) = Σ X_i ∂_i f for a vector field."""
        if self.degree != 1:
            raise StructuralError("Only vector fields act on functions")
        total = Jet.zero(self.n_phase, self.n_param, min(self.order, f.order))
        for (i,), coef in self._terms.items():
            total = total + coef * f.diff(i)
        return total

    # Serialization

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [
                {"indices": [i + 1 for i in idx], "jet": jet.to_list()}
                for idx, jet in self.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, n_phase: int, n_param: int, order: int) -> "PolyVector":
        if not isinstance(data, dict) or "degree" not in data:
            raise ParseError("PolyVector needs a 'degree' field")
        degree = data["degree"]
        size = n_phase + n_param
        terms: Dict[Indices, Jet] = {}
        for k, entry in enumerate(data.get("terms", [])):
            idx = entry.get("indices")
            if not isinstance(idx, list) or len(idx) != degree or any(
                not isinstance(i, int) or not 1 <= i <= size for i in idx
            ):
                raise ParseError(f"indices must list {degree} values in 1..{size}", f"term {k}")
            sign, key = sort_indices([i - 1 for i in idx])
            if not sign:
                raise ParseError("repeated index", f"term {k}")
            jet = Jet.from_list(entry.get("jet", []), n_phase, n_param, order)
            if sign < 0:
                jet = -jet
            terms[key] = terms[key] + jet if key in terms else jet
        return cls(degree, n_phase, n_param, order, terms)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for idx, jet in self.items():
            basis = "∧".join(f"∂{i + 1}" for i in idx)
            parts.append(f"({jet}){basis}" if basis else str(jet))
        return " + ".join(parts)

    def __repr__(self):
        return f"PolyVector[deg {self.degree}, order {self.order}]({self})"


def as_polyvector(obj: Union[Jet, PolyVector]) -> PolyVector:
    if isinstance(obj, PolyVector):
        return obj
    if isinstance(obj, Jet):
        return PolyVector.from_jet(obj)
    raise StructuralError(f"Expected a Jet or PolyVector, got {type(obj).__name__}")


def _check_pair(a: PolyVector, b: PolyVector):
    if (a.n_phase, a.n_param) != (b.n_phase, b.n_param):
        raise StructuralError("Polyvector variable splits differ")


def wedge(a: Union[Jet, PolyVector], b: Union[Jet, PolyVector]) -> PolyVector:
    a, b = as_polyvector(a), as_polyvector(b)
    _check_pair(a, b)
    degree = a.degree + b.degree
    if degree > a.nvars:
        raise StructuralError(f"Wedge degree {degree} exceeds {a.nvars} variables")
    order = min(a.order, b.order)
    out: Dict[Indices, Jet] = {}
    for ia, fa in a._terms.items():
        for ib, fb in b._terms.items():
            sign, key = sort_indices(ia + ib)
            if not sign:
                continue
            c = fa * fb
            if sign < 0:
                c = -c
            out[key] = out[key] + c if key in out else c
    return PolyVector._raw(degree, a.n_phase, a.n_param, order, out)


def wedge_power(p: PolyVector, k: int) -> PolyVector:
    """P∧…∧P (k factors); degrees beyond N give the zero polyvector of top degree."""
    if k < 1:
        raise StructuralError("wedge_power needs k ≥ 1")
    result = p
    for _ in range(k - 1):
        if result.degree + p.degree > p.nvars:
            return PolyVector.zero(p.nvars, p.n_phase, p.n_param, p.order)
        result = wedge(result, p)
    return result


def _lie_term(a: int, f: Jet, indices: Indices, g: Jet) -> Dict[Indices, Jet]:
    """L_X (g ∂_J) for X = f ∂_a."""
    out: Dict[Indices, Jet] = {}

    def put(key, c):
        if not c.is_zero():
            out[key] = out[key] + c if key in out else c

    put(indices, f * g.diff(a))
    for t, j in enumerate(indices):
        df = f.diff(j)
        if df.is_zero():
            continue
        replaced = indices[:t] + (a,) + indices[t + 1:]
        sign, key = sort_indices(replaced)
        if not sign:
            continue
        c = g * df
        put(key, c if sign < 0 else -c)
    return out


def _bracket_term(
    ia: Indices, f: Jet, ib: Indices, g: Jet, n_phase: int, n_param: int, order: int
) -> PolyVector:
    p, q = len(ia), len(ib)
    if p == 0:
        out: Dict[Indices, Jet] = {}
        for t, j in enumerate(ib):
            c = g * f.diff(j)
            if c.is_zero():
                continue
            key = ib[:t] + ib[t + 1:]
            if t % 2:
                c = -c
            out[key] = out[key] + c if key in out else c
        return PolyVector._raw(q - 1, n_phase, n_param, order, out)
    if p == 1:
        return PolyVector._raw(q, n_phase, n_param, order, _lie_term(ia[0], f, ib, g))

    # A = X ∧ A′ with X = f ∂_{a0}, A′ = ∂_{a1..}
    rest = PolyVector.basis(ia[1:], n_phase, n_param, order)
    x_field = PolyVector.basis(ia[:1], n_phase, n_param, order, coefficient=f)
    lie = PolyVector._raw(q, n_phase, n_param, order, _lie_term(ia[0], f, ib, g))
    inner = _bracket_term(ia[1:], Jet.one(n_phase, n_param, order), ib, g, n_phase, n_param, order)

    first = wedge(lie, rest)
    if q % 2:
        first = -first
    second = wedge(x_field, inner)
    sign = (q + 1 + q * (p - 1)) % 2
    result = first
    if not second.is_zero():
        result = result - second if sign else result + second
    return -result if (p * q) % 2 else result


def schouten(a: Union[Jet, PolyVector], b: Union[Jet, PolyVector]) -> PolyVector:
    """
    Schouten–Nijenhuis bracket of degrees (p, q), landing in degree p+q−1.

    The result carries the order to which it is trusted:
    min(ord a, ord b, val a + ord b − 1, val b + ord a − 1).
    """
    a, b = as_polyvector(a), as_polyvector(b)
    _check_pair(a, b)
    degree = a.degree + b.degree - 1
    if degree < 0:
        raise StructuralError("The bracket of two functions is undefined")
    if degree > a.nvars:
        raise StructuralError(f"Bracket degree {degree} exceeds {a.nvars} variables")
    order = min(a.order, b.order)
    trusted = max(0, min(order, a.valuation() + b.order - 1, b.valuation() + a.order - 1))
    total = PolyVector.zero(degree, a.n_phase, a.n_param, order)
    for ia, f in a._terms.items():
        for ib, g in b._terms.items():
            total = total + _bracket_term(ia, f, ib, g, a.n_phase, a.n_param, order)
    return total.truncate(trusted)


def lie_derivative(x: PolyVector, t: Union[Jet, PolyVector]) -> PolyVector:
    if x.degree != 1:
        raise StructuralError("Lie derivative needs a vector field")
    return schouten(x, t)


def lie_bracket(x: PolyVector, y: PolyVector) -> PolyVector:
    if x.degree != 1 or y.degree != 1:
        raise StructuralError("Lie bracket needs two vector fields")
    return schouten(x, y)
