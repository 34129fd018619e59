import random
from itertools import combinations

import pytest

from algebra import multiindex as mi
from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import DomainError, StructuralError
from polyvector.diffeo import DiffeoJet, invert_diffeo, pushforward, pushforward_by_coordinates
from polyvector.poisson import hamiltonian_field, is_poisson, jacobi_defect, jacobi_sums, poisson_bracket
from polyvector.polyvector import PolyVector, lie_bracket, schouten, sort_indices, wedge, wedge_power
from spectrum.family import LinearFamily, weight


@pytest.fixture
def family():
    """λ = (2, 3): one field S = 2x1∂1 + 3x2∂2."""
    return LinearFamily([["2", "3"]])


@pytest.fixture
def linear_poisson(family):
    """𝓛 = S∧∂3 at order 4."""
    return family.linear_poisson(4)


def d(i, n_phase=3, n_param=0, order=3):
    return PolyVector.basis((i,), n_phase, n_param, order)


def x(i, n_phase=3, n_param=0, order=3):
    return Jet.variable(i, n_phase, n_param, order)


class TestPolyVector:
    """Test cases for polyvector algebra."""

    def test_sort_indices(self):
        """Sign of the sorting permutation, zero on repeats."""
        assert sort_indices((2, 0, 1)) == (1, (0, 1, 2))
        assert sort_indices((1, 0)) == (-1, (0, 1))
        assert sort_indices((1, 1))[0] == 0

    def test_wedge_antisymmetry(self):
        """∂2∧∂1 = −∂1∧∂2 and ∂1∧∂1 = 0."""
        assert wedge(d(1), d(0)).component((0, 1)) == -1
        assert wedge(d(0), d(1)) == PolyVector.basis((0, 1), 3, 0, 3)
        assert wedge(d(0), d(0)).is_zero()

    def test_wedge_power_of_rank_two(self):
        """A bivector of rank 2 has zero square."""
        P = wedge(d(0), d(1)) * x(2)
        assert wedge_power(P, 2).is_zero()

    def test_lie_bracket(self):
        """[x1∂1, ∂1] = −∂1."""
        X = d(0) * x(0)
        assert lie_bracket(X, d(0)) == -d(0)
        assert lie_bracket(d(0), X) == d(0)

    def test_bracket_with_function(self):
        """[X, f] is the derivative X(f)."""
        X = d(1) * x(0)
        f = x(1) * x(1)
        assert X.apply(f) == x(0) * x(1) * 2
        assert schouten(X, f).as_jet() == x(0) * x(1) * 2

    def test_component_signs(self):
        """component() accepts any ordering of the indices."""
        P = PolyVector.basis((0, 2), 3, 0, 3, coefficient=x(1))
        assert P.component((2, 0)) == -x(1)

    def test_bad_index_tuple(self):
        """Index tuples must match the degree."""
        with pytest.raises(StructuralError):
            PolyVector(2, 3, 0, 3, {(0,): x(1)})


class TestPoisson:
    """Test cases for Poisson brackets and the Jacobi test."""

    def test_linear_poisson_satisfies_jacobi(self, linear_poisson):
        """𝓛 is a Poisson bivector."""
        assert jacobi_sums(linear_poisson) == {}
        assert is_poisson(linear_poisson)

    def test_jacobi_failure(self):
        """x2∂1∧∂2 + x1∂2∧∂3 violates the Jacobi identity."""
        P = PolyVector(2, 3, 0, 3, {(0, 1): x(1), (1, 2): x(0)})
        sums = jacobi_sums(P)
        assert (0, 1, 2) in sums
        assert sums[(0, 1, 2)] == -x(0)
        assert not is_poisson(P)

    def test_hamiltonian_of_parameter(self, family, linear_poisson):
        """The hamiltonian field of x3 under 𝓛 is S."""
        X = hamiltonian_field(linear_poisson, Jet.variable(2, 2, 1, 4))
        assert X == family.S_fields(4)[0]

    def test_bracket_of_coordinates(self, linear_poisson):
        """{x1, x3} = 2x1."""
        x1 = Jet.variable(0, 2, 1, 4)
        x3 = Jet.variable(2, 2, 1, 4)
        assert poisson_bracket(linear_poisson, x1, x3) == x1 * 2


class TestDiffeo:
    """Test cases for formal diffeomorphisms and pushforwards."""

    def test_identity(self):
        """The identity diffeo is recognized as such."""
        assert DiffeoJet.identity(2, 1, 3).is_identity()

    def test_must_fix_origin(self):
        """Components with a constant term are rejected."""
        with pytest.raises(DomainError):
            DiffeoJet([x(0, 2, 0) + 1, x(1, 2, 0)])

    def test_inverse(self):
        """y1 = x1 + x2² is inverted by x1 = y1 − y2²."""
        phi = DiffeoJet([x(0, 2, 0, 4) + x(1, 2, 0, 4) ** 2, x(1, 2, 0, 4)])
        inv = invert_diffeo(phi)
        assert inv.components[0] == x(0, 2, 0, 4) - x(1, 2, 0, 4) ** 2
        assert phi.compose(inv).is_identity()
        assert inv.compose(phi).is_identity()

    def test_linear_pushforward(self):
        """y = diag(2, 1) x sends ∂1 to 2∂1."""
        phi = DiffeoJet.linear([[2, 0], [0, 1]], 2, 0, 3)
        image = pushforward(phi, d(0, 2, 0))
        assert image == d(0, 2, 0) * 2

    def test_pushforward_paths_agree(self, linear_poisson):
        """Jacobian and coordinate pushforwards give the same bivector."""
        n, p, order = 2, 1, 4
        x1 = Jet.variable(0, n, p, order)
        x2 = Jet.variable(1, n, p, order)
        x3 = Jet.variable(2, n, p, order)
        phi = DiffeoJet([x1 + x1 * x3 + x2 * x2, x2 + x1 * x1, x3])
        a = pushforward(phi, linear_poisson)
        b = pushforward_by_coordinates(phi, linear_poisson)
        order = min(a.order, b.order)
        assert a.truncate(order) == b.truncate(order)
        assert is_poisson(a)

    def test_inverse_of_quadratic(self):
        """y1 = x1 + x1² is inverted by x1 = y1 − y1² + 2y1³ + …"""
        y = Jet.variable(0, 1, 0, 3)
        inv = invert_diffeo(DiffeoJet([y + y * y]))
        assert inv.components[0] == y - y * y + y * y * y * 2

    def test_round_trip_serialization(self):
        """to_dict/from_dict reproduce the diffeo."""
        phi = DiffeoJet([x(0, 2, 0, 4) + x(1, 2, 0, 4) ** 2, x(1, 2, 0, 4)])
        assert DiffeoJet.from_dict(phi.to_dict()) == phi


class TestDualPaths:
    """Test cases comparing two computations of the same quantity."""

    def test_defect_is_minus_twice_cyclic_sum(self):
        """[P, P]_123 = −2 J_123."""
        P = PolyVector(2, 3, 0, 3, {(0, 1): x(1), (1, 2): x(0)})
        assert jacobi_defect(P).component((0, 1, 2)) == x(0) * 2

    def test_weight_matches_bracket(self, family):
        """[S, x^Q ∂_i] = α_{Q,i} x^Q ∂_i."""
        S = family.S_fields(4)[0]
        for q, i in (((2, 0), 0), ((1, 1), 1), ((0, 3), 0)):
            V = PolyVector.basis((i,), 2, 1, 4, coefficient=Jet.monomial(q + (1,), 1, 2, 1, 4))
            assert lie_bracket(S, V) == V * weight(family, q, i)[0]

    def test_weight_on_bivectors(self):
        """[S, x^Q ∂_i∧∂_j] = ((Q, λ) − λ_i − λ_j) x^Q ∂_i∧∂_j."""
        family = LinearFamily([["1", "-1", "2"]])
        S = family.S_fields(4)[0]
        for q in mi.up_to_degree(3, 3, start=0):
            for i, j in combinations(range(3), 2):
                B = PolyVector.basis((i, j), 3, 1, 4, coefficient=Jet.monomial(q + (0,), 1, 3, 1, 4))
                expected = weight(family, q, i)[0] - family.lam[0][j]
                assert schouten(S, B) == B * expected


SEEDS = 200


def random_jet(rng: random.Random, order: int = 3, degree: int = 3) -> Jet:
    """Two random monomials of degree 1..degree over three phase variables."""
    f = Jet.zero(3, 0, order)
    for _ in range(2):
        q = rng.choice(list(mi.up_to_degree(3, degree, start=1)))
        f = f + Jet.monomial(q, Scalar(rng.randint(-2, 2), rng.randint(-1, 1)), 3, 0, order)
    return f


def random_field(rng: random.Random) -> PolyVector:
    return PolyVector.vector_field([random_jet(rng) for _ in range(3)])


def random_bivector(rng: random.Random) -> PolyVector:
    return PolyVector(2, 3, 0, 3, {pair: random_jet(rng) for pair in ((0, 1), (0, 2), (1, 2))})


@pytest.fixture
def so3():
    """Lie-Poisson structure of so(3): {x1, x2} = x3 and cyclic."""
    return PolyVector(2, 3, 0, 4, {(0, 1): x(2, order=4), (0, 2): -x(1, order=4), (1, 2): x(0, order=4)})


class TestBracketAxioms:
    """Seeded checks of the bracket identities."""

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_vector_fields_antisymmetric(self, seed):
        """[X, Y] = −[Y, X]."""
        rng = random.Random(seed)
        X, Y = random_field(rng), random_field(rng)
        assert lie_bracket(X, Y) == -lie_bracket(Y, X)

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_vector_field_jacobi(self, seed):
        """[X, [Y, Z]] + [Y, [Z, X]] + [Z, [X, Y]] = 0."""
        rng = random.Random(seed)
        X, Y, Z = random_field(rng), random_field(rng), random_field(rng)
        total = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
        assert total.is_zero()

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_lie_derivative_of_wedge(self, seed):
        """[X, Y∧Z] = [X, Y]∧Z + Y∧[X, Z]."""
        rng = random.Random(seed)
        X, Y, Z = random_field(rng), random_field(rng), random_field(rng)
        assert schouten(X, wedge(Y, Z)) == wedge(lie_bracket(X, Y), Z) + wedge(Y, lie_bracket(X, Z))

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_bivectors_symmetric(self, seed):
        """[P, Q] = [Q, P] for bivectors."""
        rng = random.Random(seed)
        P, Q = random_bivector(rng), random_bivector(rng)
        assert schouten(P, Q) == schouten(Q, P)

    def test_so3_is_poisson(self, so3):
        """The so(3) bracket satisfies Jacobi exactly."""
        assert jacobi_defect(so3).is_zero()
        assert jacobi_sums(so3) == {}

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_hamiltonian_fields_preserve_so3(self, seed, so3):
        """L_{X_f} P = 0 and X_f(g) = {g, f}."""
        rng = random.Random(seed)
        f = random_jet(rng, order=4)
        g = random_jet(rng, order=4)
        X = hamiltonian_field(so3, f)
        assert schouten(X, so3).is_zero()
        assert X.apply(g) == poisson_bracket(so3, g, f)


def random_diffeo(rng: random.Random, order: int = 3) -> DiffeoJet:
    """x_k plus two random monomials of degree 2..3 in each component."""
    components = []
    for k in range(3):
        c = x(k, order=order)
        for _ in range(2):
            q = rng.choice(list(mi.up_to_degree(3, 3, start=2)))
            c = c + Jet.monomial(q, Scalar(rng.randint(-2, 2), rng.randint(-1, 1)), 3, 0, order)
        components.append(c)
    return DiffeoJet(components)


def agree(a: PolyVector, b: PolyVector) -> bool:
    order = min(a.order, b.order)
    return a.truncate(order) == b.truncate(order)


class TestGradedIdentities:
    """Seeded checks of the Jacobi and Leibniz rules across degrees and of pushforwards."""

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_graded_jacobi_fields_and_bivector(self, seed):
        """[X, [Y, P]] = [[X, Y], P] + [Y, [X, P]]."""
        rng = random.Random(seed)
        X, Y, P = random_field(rng), random_field(rng), random_bivector(rng)
        left = schouten(X, schouten(Y, P))
        right = schouten(lie_bracket(X, Y), P) + schouten(Y, schouten(X, P))
        assert agree(left, right)

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_leibniz_on_functions(self, seed):
        """[P, fg] = [P, f]g + f[P, g]."""
        rng = random.Random(seed)
        P, f, g = random_bivector(rng), random_jet(rng), random_jet(rng)
        assert agree(schouten(P, f * g), schouten(P, f) * g + schouten(P, g) * f)

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_leibniz_on_wedge(self, seed):
        """[X, P∧Y] = [X, P]∧Y + P∧[X, Y]."""
        rng = random.Random(seed)
        X, P, Y = random_field(rng), random_bivector(rng), random_field(rng)
        left = schouten(X, wedge(P, Y))
        right = wedge(schouten(X, P), Y) + wedge(P, lie_bracket(X, Y))
        assert agree(left, right)

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_pushforward_respects_bracket(self, seed):
        """Φ_*[X, P] = [Φ_*X, Φ_*P]."""
        rng = random.Random(seed)
        phi = random_diffeo(rng)
        X, P = random_field(rng), random_bivector(rng)
        assert agree(pushforward(phi, schouten(X, P)), schouten(pushforward(phi, X), pushforward(phi, P)))

    @pytest.mark.parametrize("seed", range(SEEDS))
    def test_pushforward_of_composite(self, seed):
        """(Φ∘Ψ)_* T = Φ_*(Ψ_* T)."""
        rng = random.Random(seed)
        phi, psi = random_diffeo(rng), random_diffeo(rng)
        T = random_bivector(rng)
        assert agree(pushforward(phi.compose(psi), T), pushforward(phi, pushforward(psi, T)))


def random_poisson_or_not(rng: random.Random, kind: int) -> PolyVector:
    """A generic bivector, f ∂_i∧∂_j, or so(3) moved by a random diffeo."""
    if kind == 0:
        return random_bivector(rng)
    if kind == 1:
        pair = rng.choice([(0, 1), (0, 2), (1, 2)])
        return PolyVector.basis(pair, 3, 0, 3, coefficient=random_jet(rng))
    so3 = PolyVector(2, 3, 0, 3, {(0, 1): x(2), (0, 2): -x(1), (1, 2): x(0)})
    return pushforward(random_diffeo(rng), so3)


class TestJacobiCriteria:
    """Test cases comparing [P, P] with the cyclic sums."""

    @pytest.mark.parametrize("seed", range(100))
    def test_defect_vanishes_with_cyclic_sums(self, seed):
        """[P, P] = 0 exactly when every cyclic sum vanishes."""
        rng = random.Random(seed)
        P = random_poisson_or_not(rng, seed % 3)
        assert jacobi_defect(P).is_zero() == (jacobi_sums(P) == {})
        if seed % 3:
            assert is_poisson(P)
