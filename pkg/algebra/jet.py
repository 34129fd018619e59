"""
Truncated multivariate polynomials over Q(i).

A Jet lives in N = n_phase + n_param variables; variables 0..n_phase-1 are
the phase coordinates x′ and the rest are the parameters x″. ``order`` is the
degree up to which the coefficients are trusted. Terms are a canonical map
MultiIndex -> Scalar with no zero values and no degree above ``order``.
"""

from math import factorial
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from algebra import multiindex as mi
from algebra.multiindex import MultiIndex
from algebra.scalar import Scalar
from errors import DomainError, ParseError, StructuralError, TruncationLossError


def _mul_terms(a: Mapping, b: Mapping, order: int) -> Dict[MultiIndex, Scalar]:
    out: Dict[MultiIndex, Scalar] = {}
    b_items = sorted(((q, c, sum(q)) for q, c in b.items()), key=lambda t: t[2])
    for qa, ca in a.items():
        room = order - sum(qa)
        if room < 0:
            continue
        for qb, cb, db in b_items:
            if db > room:
                break
            q = tuple(x + y for x, y in zip(qa, qb))
            c = ca * cb
            prev = out.get(q)
            out[q] = c if prev is None else prev + c
    return {q: c for q, c in out.items() if c}


class Jet:
    """Immutable truncated polynomial."""

    __slots__ = ("n_phase", "n_param", "order", "_terms")

    def __init__(
        self,
        n_phase: int,
        n_param: int,
        order: int,
        terms: Optional[Mapping[MultiIndex, object]] = None,
    ):
        if n_phase < 0 or n_param < 0 or order < 0:
            raise StructuralError("Variable counts and order must be non-negative")
        size = n_phase + n_param
        clean: Dict[MultiIndex, Scalar] = {}
        for q, c in (terms or {}).items():
            q = tuple(int(x) for x in q)
            if len(q) != size or any(x < 0 for x in q):
                raise StructuralError(f"Bad monomial {q} for {size} variables")
            if sum(q) > order:
                continue
            c = Scalar.coerce(c)
            if c:
                prev = clean.get(q)
                clean[q] = c if prev is None else prev + c
        self.n_phase = n_phase
        self.n_param = n_param
        self.order = order
        self._terms = {q: c for q, c in clean.items() if c}

    @classmethod
    def _raw(cls, n_phase: int, n_param: int, order: int, terms: Dict) -> "Jet":
        obj = object.__new__(cls)
        obj.n_phase = n_phase
        obj.n_param = n_param
        obj.order = order
        obj._terms = terms
        return obj

    # Constructors

    @classmethod
    def zero(cls, n_phase: int, n_param: int, order: int) -> "Jet":
        return cls._raw(n_phase, n_param, order, {})

    @classmethod
    def constant(cls, value, n_phase: int, n_param: int, order: int) -> "Jet":
        c = Scalar.coerce(value)
        terms = {mi.zero(n_phase + n_param): c} if c else {}
        return cls._raw(n_phase, n_param, order, terms)

    @classmethod
    def one(cls, n_phase: int, n_param: int, order: int) -> "Jet":
        return cls.constant(1, n_phase, n_param, order)

    @classmethod
    def variable(cls, i: int, n_phase: int, n_param: int, order: int) -> "Jet":
        q = mi.unit(i, n_phase + n_param)
        return cls._raw(n_phase, n_param, order, {q: Scalar.one()} if order >= 1 else {})

    @classmethod
    def monomial(cls, q: Sequence[int], coefficient, n_phase: int, n_param: int, order: int) -> "Jet":
        return cls(n_phase, n_param, order, {tuple(q): coefficient})

    def like(self, terms: Dict, order: Optional[int] = None) -> "Jet":
        """A jet over the same variables built from trusted terms."""
        return Jet._raw(self.n_phase, self.n_param, self.order if order is None else order, terms)

    # Views

    @property
    def nvars(self) -> int:
        return self.n_phase + self.n_param

    @property
    def terms(self) -> Mapping[MultiIndex, Scalar]:
        return MappingProxyType(self._terms)

    def items(self) -> List[Tuple[MultiIndex, Scalar]]:
        """Terms in graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: mi.graded_lex_key(t[0]))

    def coefficient(self, q: Sequence[int]) -> Scalar:
        return self._terms.get(tuple(q), Scalar.zero())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def constant_term(self) -> Scalar:
        return self.coefficient(mi.zero(self.nvars))

    def is_constant(self) -> bool:
        return all(sum(q) == 0 for q in self._terms)

    def valuation(self) -> int:
        """Lowest total degree present; order + 1 for the zero jet."""
        if not self._terms:
            return self.order + 1
        return min(sum(q) for q in self._terms)

    def max_degree(self) -> int:
        return max((sum(q) for q in self._terms), default=-1)

    def phase_valuation(self) -> int:
        if not self._terms:
            return self.order + 1
        return min(sum(q[: self.n_phase]) for q in self._terms)

    def depends_on(self, var: int) -> bool:
        return any(q[var] for q in self._terms)

    # Compatibility

    def _check(self, other: "Jet"):
        if self.n_phase != other.n_phase or self.n_param != other.n_param:
            raise StructuralError(
                f"Variable split mismatch: ({self.n_phase},{self.n_param}) vs ({other.n_phase},{other.n_param})"
            )

    def _as_jet(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            return other
        return Jet.constant(other, self.n_phase, self.n_param, self.order)

    # Ring operations

    def __add__(self, other):
        try:
            other = self._as_jet(other)
        except DomainError:
            return NotImplemented
        order = min(self.order, other.order)
        out = {q: c for q, c in self._terms.items() if sum(q) <= order}
        for q, c in other._terms.items():
            if sum(q) > order:
                continue
            prev = out.get(q)
            if prev is None:
                out[q] = c
            else:
                s = prev + c
                if s:
                    out[q] = s
                else:
                    del out[q]
        return Jet._raw(self.n_phase, self.n_param, order, out)

    __radd__ = __add__

    def __neg__(self):
        return self.like({q: -c for q, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._as_jet(other)
        except DomainError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            order = min(self.order, other.order)
            return Jet._raw(self.n_phase, self.n_param, order, _mul_terms(self._terms, other._terms, order))
        try:
            c = Scalar.coerce(other)
        except DomainError:
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def scale(self, c) -> "Jet":
        c = Scalar.coerce(c)
        if not c:
            return Jet.zero(self.n_phase, self.n_param, self.order)
        return self.like({q: v * c for q, v in self._terms.items()})

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        return self.scale(Scalar.coerce(other).inverse())

    def __pow__(self, k: int) -> "Jet":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Jet.one(self.n_phase, self.n_param, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        """Equal terms over the same variables; orders are not compared."""
        if isinstance(other, Jet):
            return (
                self.n_phase == other.n_phase
                and self.n_param == other.n_param
                and self._terms == other._terms
            )
        try:
            return self == self._as_jet(other)
        except DomainError:
            return NotImplemented

    __hash__ = None

    def equal_to_order(self, other: "Jet", d: int) -> bool:
        return self.truncate(d) == other.truncate(d)

    # Truncation and restriction

    def truncate(self, d: int) -> "Jet":
        d = min(d, self.order)
        if d < 0:
            raise StructuralError("Cannot truncate below degree 0")
        return self.like({q: c for q, c in self._terms.items() if sum(q) <= d}, order=d)

    def homogeneous_part(self, d: int) -> "Jet":
        return self.like({q: c for q, c in self._terms.items() if sum(q) == d})

    def phase_degree_part(self, m: int) -> "Jet":
        """Terms of degree exactly m in the phase variables."""
        n = self.n_phase
        return self.like({q: c for q, c in self._terms.items() if sum(q[:n]) == m})

    def restrict_zero(self, variables: Iterable[int]) -> "Jet":
        """Set the given variables to 0."""
        vs = list(variables)
        return self.like({q: c for q, c in self._terms.items() if not any(q[v] for v in vs)})

    def restrict_parameters(self) -> "Jet":
        """Value on the phase space x″ = 0."""
        return self.restrict_zero(range(self.n_phase, self.nvars))

    def restrict_phase(self) -> "Jet":
        """Value on the parameter axis x′ = 0."""
        return self.restrict_zero(range(self.n_phase))

    def split_phase(self) -> Dict[MultiIndex, "Jet"]:
        """
        Expansion f = Σ_Q f_Q(x″) (x′)^Q.

        Each f_Q is returned as a jet over the same variables with no phase
        dependence, trusted to order - |Q|.
        """
        n = self.n_phase
        parts: Dict[MultiIndex, Dict] = {}
        for q, c in self._terms.items():
            phase = q[:n]
            parts.setdefault(phase, {})[(0,) * n + q[n:]] = c
        return {
            phase: Jet._raw(self.n_phase, self.n_param, max(self.order - sum(phase), 0), terms)
            for phase, terms in sorted(parts.items(), key=lambda t: mi.graded_lex_key(t[0]))
        }

    def phase_coefficient(self, phase: Sequence[int]) -> "Jet":
        """The coefficient function f_Q(x″) of (x′)^Q."""
        n = self.n_phase
        phase = tuple(phase)
        terms = {(0,) * n + q[n:]: c for q, c in self._terms.items() if q[:n] == phase}
        return Jet._raw(self.n_phase, self.n_param, max(self.order - sum(phase), 0), terms)

    def times_monomial(self, q: Sequence[int]) -> "Jet":
        """Multiply by x^q, keeping the order."""
        q = tuple(q)
        out = {}
        for r, c in self._terms.items():
            s = tuple(a + b for a, b in zip(r, q))
            if sum(s) <= self.order:
                out[s] = c
        return self.like(out)

    def divide_monomial(self, q: Sequence[int]) -> Optional["Jet"]:
        """Exact division by x^q, or None when some term is not divisible."""
        q = tuple(q)
        out = {}
        for r, c in self._terms.items():
            if not mi.divides(q, r):
                return None
            out[mi.sub(r, q)] = c
        return self.like(out, order=max(self.order - sum(q), 0))

    def embed(self, n_phase: int, n_param: int, phase_map: Sequence[int], param_map: Sequence[int]) -> "Jet":
        """Rename variables into a larger space; maps give the new positions."""
        size = n_phase + n_param
        targets = list(phase_map) + list(param_map)
        if len(targets) != self.nvars:
            raise StructuralError("Embedding needs one target per variable")
        out = {}
        for q, c in self._terms.items():
            new = [0] * size
            for k, e in enumerate(q):
                if e:
                    new[targets[k]] += e
            out[tuple(new)] = c
        return Jet._raw(n_phase, n_param, self.order, out)

    # Calculus

    def diff(self, var: int) -> "Jet":
        if not 0 <= var < self.nvars:
            raise StructuralError(f"Variable {var} out of range")
        out = {}
        for q, c in self._terms.items():
            e = q[var]
            if e:
                r = q[:var] + (e - 1,) + q[var + 1:]
                out[r] = c * e
        return self.like(out)

    def integrate(self, var: int, order: Optional[int] = None) -> "Jet":
        """
        Antiderivative in a parameter variable vanishing at var = 0.

        With ``order`` = self.order + 1 the result is the exact lift; any term
        that would land above the target order raises TruncationLossError.
        """
        if not self.n_phase <= var < self.nvars:
            raise StructuralError(f"Integration variable {var} is not a parameter")
        target = self.order if order is None else order
        if target > self.order + 1:
            raise StructuralError(f"Antiderivative is trusted to {self.order + 1} at most")
        out = {}
        for q, c in self._terms.items():
            r = q[:var] + (q[var] + 1,) + q[var + 1:]
            if sum(r) > target:
                raise TruncationLossError(
                    f"Integrating {_monomial_str(q)} in x{var + 1} exceeds order {target}"
                )
            out[r] = c / (q[var] + 1)
        return self.like(out, order=target)

    def compose(self, subst: Sequence["Jet"], allow_constants: bool = False, cache: "Substitution" = None) -> "Jet":
        if cache is None:
            cache = Substitution(subst, allow_constants=allow_constants)
        return cache.apply(self)

    def exp(self) -> "Jet":
        if self.constant_term():
            raise DomainError("exp needs a jet with zero constant term")
        result = Jet.one(self.n_phase, self.n_param, self.order)
        power = result
        for k in range(1, self.order + 1):
            power = power * self
            if power.is_zero():
                break
            result = result + power / factorial(k)
        return result

    # Serialization

    def to_list(self) -> List[dict]:
        return [
            {"monomial": list(q), **c.to_dict()}
            for q, c in self.items()
        ]

    @classmethod
    def from_list(cls, data: Sequence[dict], n_phase: int, n_param: int, order: int) -> "Jet":
        if not isinstance(data, list):
            raise ParseError("Jet must be a list of terms")
        size = n_phase + n_param
        terms: Dict[MultiIndex, Scalar] = {}
        for k, entry in enumerate(data):
            if not isinstance(entry, dict) or "monomial" not in entry:
                raise ParseError("term needs a 'monomial' field", f"term {k}")
            q = entry["monomial"]
            if (
                not isinstance(q, list)
                or len(q) != size
                or not all(isinstance(x, int) and x >= 0 for x in q)
            ):
                raise ParseError(f"monomial must list {size} non-negative ints", f"term {k}")
            if sum(q) > order:
                raise ParseError(f"monomial degree {sum(q)} exceeds order {order}", f"term {k}")
            c = Scalar(entry.get("re", 0), entry.get("im", 0))
            terms[tuple(q)] = terms.get(tuple(q), Scalar.zero()) + c
        return cls(n_phase, n_param, order, terms)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for q, c in self.items():
            mono = _monomial_str(q)
            if mono == "1":
                parts.append(f"({c})" if c.im else str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}" if c.im else f"{c}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Jet[{self.n_phase}+{self.n_param}, order {self.order}]({self})"


def _monomial_str(q: Sequence[int]) -> str:
    factors = []
    for k, e in enumerate(q):
        if e == 1:
            factors.append(f"x{k + 1}")
        elif e > 1:
            factors.append(f"x{k + 1}^{e}")
    return "*".join(factors) or "1"


class Substitution:
    """
    Shared power cache for composing many jets with the same substitution.

    Monomials s^Q are built from s^(Q - E_k) by one multiplication each.
    """

    def __init__(self, subst: Sequence[Jet], allow_constants: bool = False):
        subst = list(subst)
        if not subst:
            raise StructuralError("Empty substitution")
        first = subst[0]
        for s in subst:
            first._check(s)
        if not allow_constants and any(s.constant_term() for s in subst):
            raise DomainError("Substitution has a constant term; pass allow_constants=True")
        self.subst = subst
        self.n_phase = first.n_phase
        self.n_param = first.n_param
        self.order = min(s.order for s in subst)
        zero = mi.zero(first.nvars)
        self._cache: Dict[MultiIndex, Dict] = {zero: {zero: Scalar.one()}}

    def _power(self, q: MultiIndex, order: int) -> Dict:
        hit = self._cache.get(q)
        if hit is not None:
            return hit
        k = max(i for i, e in enumerate(q) if e)
        prev = q[:k] + (q[k] - 1,) + q[k + 1:]
        terms = _mul_terms(self._power(prev, order), self.subst[k]._terms, order)
        self._cache[q] = terms
        return terms

    def apply(self, f: Jet) -> Jet:
        if f.nvars != len(self.subst):
            raise StructuralError(f"Substitution arity {len(self.subst)} does not match {f.nvars} variables")
        order = min(f.order, self.order)
        out: Dict[MultiIndex, Scalar] = {}
        for q, c in f._terms.items():
            for r, v in self._power(q, self.order).items():
                if sum(r) > order:
                    continue
                term = v * c
                prev = out.get(r)
                out[r] = term if prev is None else prev + term
        return Jet._raw(self.n_phase, self.n_param, order, {r: c for r, c in out.items() if c})


def jet_mul(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_diff(f: Jet, var: int) -> Jet:
    return f.diff(var)


def jet_integrate(f: Jet, var: int, order: Optional[int] = None) -> Jet:
    return f.integrate(var, order=order)


def jet_compose(f: Jet, subst: Sequence[Jet], allow_constants: bool = False) -> Jet:
    return f.compose(subst, allow_constants=allow_constants)


def jet_exp(g: Jet) -> Jet:
    return g.exp()
