import os

import pytest

from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import (
    HypothesisError,
    IncompatibleSystemError,
    RankConditionError,
    SaitoDivisionError,
    StraighteningError,
    StructuralError,
    UnexpectedNormalFormError,
)
from models.problem import ProblemFile
from pipeline.frobenius import frobenius_solve
from pipeline.poisson_jet import PoissonJet
from pipeline.saito import divide_by_family, saito_divide
from pipeline.straighten import coordinate_field, straighten_field
from pipeline.theorem1 import family_matrix
from pipeline.theorem2 import Theorem2Report, fibers_invariant, linearization_flags, normalize_rank2p_theorem2
from polyvector.diffeo import pushforward
from polyvector.polyvector import PolyVector, lie_bracket, wedge
from spectrum.family import LinearFamily
from spectrum.invariants import InvariantRing, invariant_generators

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def load(name: str) -> PoissonJet:
    return ProblemFile.load(os.path.join(DATA_DIR, name)).to_poisson_jet()


@pytest.fixture
def family():
    """λ = (1, −1, 2) with invariant u = x1x2."""
    return LinearFamily([["1", "-1", "2"]])


@pytest.fixture
def jets():
    """x1..x4 over 3 phase and 1 parameter variables at order 5."""
    return [Jet.variable(k, 3, 1, 5) for k in range(4)]


class TestSaitoDivision:
    """Test cases for dividing bivectors by the hamiltonians."""

    def test_division_reconstructs(self, family, jets):
        """S∧(x1²x4 ∂3) is divided back into S∧A."""
        x1, x2, x3, x4 = jets
        S = family.S_fields(5)[0]
        T = wedge(S, PolyVector.basis((2,), 3, 1, 5, coefficient=x1 * x1 * x4))
        A = saito_divide(T, [S], family)
        assert len(A) == 1
        rebuilt = wedge(S, A[0])
        assert rebuilt.truncate(T.order) == T.truncate(rebuilt.order)
        assert lie_bracket(S, A[0]).is_zero()

    def test_zero_bivector(self, family):
        """Dividing zero gives zero quotients."""
        S = family.S_fields(5)[0]
        A = saito_divide(PolyVector.zero(2, 3, 1, 5), [S], family)
        assert A[0].is_zero()

    def test_rank_condition(self, family, jets):
        """T∧S ≠ 0 cannot be divided."""
        x1, x2, x3, x4 = jets
        S = family.S_fields(5)[0]
        T = PolyVector.basis((0, 1), 3, 1, 5, coefficient=x1 * x2 * x3)
        with pytest.raises(SaitoDivisionError):
            saito_divide(T, [S], family)

    def test_low_phase_degree_rejected(self, family, jets):
        """Terms of x′-degree one are outside the division."""
        x1, x2, x3, x4 = jets
        S = family.S_fields(5)[0]
        T = PolyVector.basis((0, 3), 3, 1, 5, coefficient=x1 * x4)
        with pytest.raises(SaitoDivisionError):
            saito_divide(T, [S], family)

    def test_divide_by_family(self, family, jets):
        """(x4 + x1x2)·S = θ·S with θ = x4 + x1x2."""
        x1, x2, x3, x4 = jets
        S = family.S_fields(5)[0]
        theta = divide_by_family(S * (x4 + x1 * x2), [S], family)
        assert theta == [x4 + x1 * x2]

    def test_divide_by_family_rejects(self, family, jets):
        """∂4 is not a combination of the S_j."""
        with pytest.raises(SaitoDivisionError):
            divide_by_family(coordinate_field(3, 3, 1, 5), [family.S_fields(5)[0]], family)


class TestFrobenius:
    """Test cases for linear total differential systems."""

    def test_single_equation(self):
        """∂β/∂x2 = x2 gives β = x2²/2."""
        x2 = Jet.variable(1, 1, 1, 4)
        beta = frobenius_solve([None], [[x2]], [1])
        assert beta[0] == Jet.monomial((0, 2), "1/2", 1, 1, 4)

    def test_linear_term(self):
        """β′ = 1 − β gives β = 1 − exp(−x2)."""
        one = Jet.one(1, 1, 4)
        beta = frobenius_solve([[[one]]], [[one]], [1])
        assert beta[0].coefficient((0, 1)) == 1
        assert beta[0].coefficient((0, 2)) == Scalar("-1/2")
        assert beta[0].coefficient((0, 4)) == Scalar("-1/24")

    def test_two_variables(self):
        """∂2β = x3, ∂3β = x2 integrate to β = x2x3."""
        x2 = Jet.variable(1, 1, 2, 3)
        x3 = Jet.variable(2, 1, 2, 3)
        beta = frobenius_solve([None, None], [[x3], [x2]], [1, 2])
        assert beta[0] == x2 * x3

    def test_incompatible(self):
        """∂2β = x3, ∂3β = 0 has no solution."""
        x3 = Jet.variable(2, 1, 2, 3)
        with pytest.raises(IncompatibleSystemError):
            frobenius_solve([None, None], [[x3], [Jet.zero(1, 2, 3)]], [1, 2])


class TestStraighten:
    """Test cases for flow-box coordinates."""

    def test_straightens_field(self):
        """(1 + x2)∂2 becomes ∂2 under y2 = log(1 + x2)."""
        x1 = Jet.variable(0, 1, 1, 4)
        x2 = Jet.variable(1, 1, 1, 4)
        d2 = coordinate_field(1, 1, 1, 4)
        field = d2 * (x2 + 1)
        S = LinearFamily([["1"]]).S_fields(4)[0]
        G = straighten_field(field, 0, preserve=[S])
        assert pushforward(G, field) == coordinate_field(1, 1, 1, 4)
        assert G.components[0] == x1
        assert G.components[1].coefficient((0, 2)) == Scalar("-1/2")

    def test_coordinate_field_is_identity(self):
        """∂2 needs no change of coordinates."""
        G = straighten_field(coordinate_field(1, 1, 1, 4), 0)
        assert G.is_identity()

    def test_must_be_transverse(self):
        """The field has to be ∂2 at the origin."""
        x1 = Jet.variable(0, 1, 1, 4)
        with pytest.raises(StraighteningError):
            straighten_field(coordinate_field(1, 1, 1, 4) * x1, 0)

    def test_preserved_fields_must_commute(self):
        """∂2 does not commute with (1 + x2)∂2."""
        x2 = Jet.variable(1, 1, 1, 4)
        d2 = coordinate_field(1, 1, 1, 4)
        with pytest.raises(StraighteningError):
            straighten_field(d2 * (x2 + 1), 0, preserve=[d2])


class TestTheorem2:
    """Test cases for the rank-2p normal form."""

    def test_parameter_dependence_removed(self):
        """(1 + x4x1x2)S∧∂4 normalizes to S∧∂4 with b = 1."""
        pj = load("rank2p.json")
        result, diffeo, report = normalize_rank2p_theorem2(pj)
        assert result.P == pj.family.linear_poisson(pj.order)
        assert report.b == [[Jet.one(3, 1, pj.order)]]
        for flag in ("phase_bracket_zero", "parameter_free", "invariant_support", "linearized", "fibers_invariant"):
            assert report.flags[flag]
        assert report.invariants.generators == [(1, 1, 0), (0, 2, 1)]
        assert report.b_generators == [[{"0,0": "1"}]]
        image = pushforward(diffeo, pj.P)
        order = min(image.order, result.order)
        assert image.truncate(order) == result.P.truncate(order)

    def test_phase_bracket_straightened(self, family, jets):
        """S∧(∂4 + x4x1²∂3) has its phase bracket removed."""
        x1, x2, x3, x4 = jets
        S = family.S_fields(5)[0]
        field = coordinate_field(3, 3, 1, 5) + PolyVector.basis((2,), 3, 1, 5, coefficient=x4 * x1 * x1)
        pj = PoissonJet(family, wedge(S, field))
        assert not pj.phase_bivector().is_zero()
        result, _, report = normalize_rank2p_theorem2(pj)
        assert result.phase_bivector().is_zero()
        assert result.P == family.linear_poisson(5)
        assert report.connection.to_dict()["A"]
        assert report.flags["linear_family"]

    def test_two_parameters(self):
        """(1 + x1x2x5)S1∧∂5 + S2∧∂6 normalizes to 𝓛."""
        order = 4
        family = LinearFamily([["1", "-1", "1", "2"], ["2", "-2", "1", "-1"]])
        x1, x2, x5 = (Jet.variable(k, 4, 2, order) for k in (0, 1, 4))
        S1, S2 = family.S_fields(order)
        P = wedge(S1 * (x1 * x2 * x5 + 1), coordinate_field(4, 4, 2, order)) + wedge(S2, coordinate_field(5, 4, 2, order))
        pj = PoissonJet(family, P)
        result, _, report = normalize_rank2p_theorem2(pj)
        one, zero = Jet.one(4, 2, order), Jet.zero(4, 2, order)
        assert report.b == [[one, zero], [zero, one]]
        assert result.P == family.linear_poisson(order)

    def test_dimension_hypothesis(self):
        """n = 2, p = 1 is too small unless forced."""
        with pytest.raises(HypothesisError):
            normalize_rank2p_theorem2(load("linearizable.json"))

    def test_rank_condition(self):
        """P∧P ≠ 0 for the resonant example."""
        with pytest.raises(RankConditionError):
            normalize_rank2p_theorem2(load("resonant.json"))


class TestCorollaries:
    """Test cases for linear families and the fibers of the invariants."""

    def test_linear_family_forces_linear_structure(self, family, jets):
        """X_1 = S with (1 + x1x2)S∧∂4 left over is a stage failure."""
        x1, x2, x3, x4 = jets
        S = family.S_fields(5)[0]
        pj = PoissonJet(family, wedge(S * (x1 * x2 + 1), coordinate_field(3, 3, 1, 5)))
        with pytest.raises(UnexpectedNormalFormError, match="theorem2"):
            linearization_flags(pj, [[Jet.one(3, 1, 5)]])

    def test_nonlinear_family_is_reported(self, family, jets):
        """(1 + x1x2)S is not a linear family and P is not 𝓛."""
        x1, x2, x3, x4 = jets
        S = family.S_fields(5)[0]
        pj = PoissonJet(family, wedge(S * (x1 * x2 + 1), coordinate_field(3, 3, 1, 5)))
        assert linearization_flags(pj, family_matrix(pj)) == {"linear_family": False, "linearized": False}

    def test_generators_are_constant_along_s(self, family):
        """S kills x1x2 and x2²x3 but not x1."""
        assert fibers_invariant(family, invariant_generators(family, 6), 5)
        ring = InvariantRing(generators=[(1, 0, 0)], degree_bound=1, complete=False)
        assert not fibers_invariant(family, ring, 5)

    def test_fiber_matrix(self):
        """b = 1 + 2u1 − u2 is 5 on the fiber u = (3, 2)."""
        report = Theorem2Report(
            invariants=InvariantRing(generators=[(1, 1, 0), (0, 2, 1)], degree_bound=6, complete=True),
            b_generators=[[{"0,0": "1", "1,0": "2", "0,1": "-1"}]],
        )
        assert report.fiber_matrix([3, 2]) == [[Scalar(5)]]
        with pytest.raises(StructuralError):
            report.fiber_matrix([3])

    def test_fiber_matrix_of_normal_form(self):
        """The rank-2p example induces S∧∂4 on every fiber."""
        _, _, report = normalize_rank2p_theorem2(load("rank2p.json"))
        assert report.fiber_matrix([5, 7]) == [[Scalar(1)]]
