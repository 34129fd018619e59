"""Poisson brackets, hamiltonian fields and the Jacobi test for bivectors."""

from itertools import combinations
from typing import Dict, Tuple

from algebra.jet import Jet
from errors import StructuralError
from polyvector.polyvector import PolyVector, schouten


def _require_bivector(P: PolyVector):
    if P.degree != 2:
        raise StructuralError(f"Expected a bivector, got degree {P.degree}")


def poisson_bracket(P: PolyVector, f: Jet, g: Jet) -> Jet:
    """{f, g} = Σ_{i<j} P_ij (∂_i f ∂_j g − ∂_i g ∂_j f)."""
    _require_bivector(P)
    order = min(P.order, f.order, g.order)
    total = Jet.zero(P.n_phase, P.n_param, order)
    df = [f.diff(k) for k in range(P.nvars)]
    dg = [g.diff(k) for k in range(P.nvars)]
    for (i, j), coef in P.terms.items():
        total = total + coef * (df[i] * dg[j] - dg[i] * df[j])
    return total


def hamiltonian_field(P: PolyVector, f: Jet) -> PolyVector:
    """X_f = Σ_i {x_i, f} ∂_i, so that X_f(g) = {g, f}."""
    _require_bivector(P)
    order = min(P.order, f.order)
    df = [f.diff(k) for k in range(P.nvars)]
    components = [Jet.zero(P.n_phase, P.n_param, order) for _ in range(P.nvars)]
    for (i, j), coef in P.terms.items():
        # {x_i, f} gets +P_ij ∂_j f, {x_j, f} gets −P_ij ∂_i f
        components[i] = components[i] + coef * df[j]
        components[j] = components[j] - coef * df[i]
    return PolyVector.vector_field(components)


def jacobi_defect(P: PolyVector) -> PolyVector:
    """[P, P]; zero up to its order exactly when P is Poisson to that order."""
    _require_bivector(P)
    return schouten(P, P)


def jacobi_sums(P: PolyVector) -> Dict[Tuple[int, int, int], Jet]:
    """
    Cyclic sums J_ijk = Σ_l (P_il ∂_l P_jk + P_jl ∂_l P_ki + P_kl ∂_l P_ij).

    Only nonzero sums are returned, keyed by i < j < k. They satisfy
    [P, P]_ijk = −2 J_ijk.
    """
    _require_bivector(P)
    size = P.nvars
    comp = {}
    for i in range(size):
        for j in range(size):
            if i != j:
                comp[(i, j)] = P.component((i, j))
    zero = Jet.zero(P.n_phase, P.n_param, P.order)

    def entry(a, b):
        return comp.get((a, b), zero)

    trusted = max(0, min(P.order, P.valuation() + P.order - 1))
    sums = {}
    for i, j, k in combinations(range(size), 3):
        total = zero
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            target = entry(b, c)
            if target.is_zero():
                continue
            for l in range(size):
                pal = entry(a, l)
                if not pal.is_zero():
                    total = total + pal * target.diff(l)
        total = total.truncate(trusted)
        if not total.is_zero():
            sums[(i, j, k)] = total
    return sums


def is_poisson(P: PolyVector) -> bool:
    return jacobi_defect(P).is_zero()
