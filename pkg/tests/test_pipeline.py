import os

import pytest

from algebra.jet import Jet
from algebra.scalar import Scalar
from config import Config
from errors import ConstructorCheckError, HypothesisError, UnexpectedNormalFormError
from models.problem import ProblemFile
from pipeline.cocycle import cocycle_check, rescale_diffeo
from pipeline.poisson_jet import BracketTable, PoissonJet
from pipeline.reduction import choose_combination, reduce_poisson
from pipeline.theorem1 import (
    Theorem1Report,
    bracket_resonance_violations,
    check_output_shape,
    family_matrix,
    normalize_poisson_theorem1,
)
from polyvector.diffeo import DiffeoJet, pushforward
from polyvector.polyvector import PolyVector
from spectrum.family import LinearFamily
from spectrum.hypotheses import hypotheses_report

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def load(name: str) -> PoissonJet:
    return ProblemFile.load(os.path.join(DATA_DIR, name)).to_poisson_jet()


@pytest.fixture
def node():
    """λ = (2, 3)."""
    return LinearFamily([["2", "3"]])


@pytest.fixture
def linear_jet(node):
    """𝓛 = S∧∂3 for λ = (2, 3) at order 4."""
    return PoissonJet(node, node.linear_poisson(4))


@pytest.fixture
def shifted_jet(linear_jet):
    """𝓛 written in coordinates y1 = x1 + x3², not reduced."""
    x1, x2, x3 = (Jet.variable(k, 2, 1, 4) for k in range(3))
    phi = DiffeoJet([x1 + x3 * x3, x2, x3])
    return linear_jet.with_bivector(pushforward(phi, linear_jet.P))


class TestPoissonJet:
    """Test cases for Poisson jet construction checks."""

    def test_linear_jet_is_reduced(self, linear_jet):
        """𝓛 passes every check and vanishes on the parameter axis."""
        assert linear_jet.is_reduced()
        assert linear_jet.linear_part_matches()
        assert linear_jet.bracket_table().g == {}

    def test_hamiltonian_is_s(self, node, linear_jet):
        """X_1 = S for the linear jet."""
        assert linear_jet.hamiltonians()[0] == node.S_fields(4)[0]

    def test_structure_constants(self, linear_jet):
        """c_13^1 = 2 and c_23^2 = 3."""
        assert linear_jet.structure_constants() == {(0, 2, 0): Scalar(2), (1, 2, 1): Scalar(3)}

    def test_wrong_linear_part(self, node):
        """2𝓛 has the wrong eigenvalues."""
        with pytest.raises(ConstructorCheckError):
            PoissonJet(node, node.linear_poisson(4) * 2)

    def test_parameters_must_commute(self):
        """{x3, x4} ≠ 0 breaks H5."""
        family = LinearFamily([["1", "0"], ["0", "1"]])
        x1 = Jet.variable(0, 2, 2, 3)
        P = family.linear_poisson(3) + PolyVector.basis((2, 3), 2, 2, 3, coefficient=x1)
        with pytest.raises(ConstructorCheckError, match="H5"):
            PoissonJet(family, P)

    def test_jacobi_checked(self, node):
        """A non-Poisson bivector is rejected."""
        x1 = Jet.variable(0, 2, 1, 4)
        P = node.linear_poisson(4) + PolyVector.basis((0, 1), 2, 1, 4, coefficient=x1 * x1)
        with pytest.raises(ConstructorCheckError, match="Jacobi"):
            PoissonJet(node, P)

    def test_serialization(self, linear_jet):
        """to_dict/from_dict keep the bivector and λ."""
        again = PoissonJet.from_dict(linear_jet.to_dict())
        assert again.P == linear_jet.P
        assert again.family == linear_jet.family
        assert "1,3" in linear_jet.to_dict()["brackets"]


class TestReduction:
    """Test cases for moving the zero set to the parameter axis."""

    def test_first_row_is_used(self, linear_jet):
        """λ has no zero eigenvalue, so the combination is X_1."""
        assert choose_combination(linear_jet) == [Scalar(1)]

    def test_reduction_undoes_translation(self, linear_jet, shifted_jet):
        """The translation y1 = x1 − x3² recovers 𝓛."""
        assert not shifted_jet.is_reduced()
        reduced, phi = reduce_poisson(shifted_jet)
        assert reduced.is_reduced()
        assert reduced.P == linear_jet.P
        x1, x3 = Jet.variable(0, 2, 1, 4), Jet.variable(2, 2, 1, 4)
        assert phi.components[0] == x1 - x3 * x3

    def test_reduced_input_is_unchanged(self, linear_jet):
        """Reduction of a reduced jet is the identity."""
        reduced, phi = reduce_poisson(linear_jet)
        assert reduced is linear_jet
        assert phi.is_identity()


class TestCocycle:
    """Test cases for the cyclic identity and rescaling."""

    def test_cocycle_holds_on_resonant_problem(self):
        """Λ_1 G_23 + Λ_2 G_31 + Λ_3 G_12 = 0 for the resonant example."""
        pj = load("resonant.json")
        assert cocycle_check(pj.bracket_table(), pj.family)

    def test_cocycle_failure(self):
        """G_23 = x4 alone breaks the identity at (1, 2, 3)."""
        S = LinearFamily([["1", "3", "5"]])
        jet = Jet.monomial((0, 1, 1, 1), 1, 3, 1, 4)
        verdict = cocycle_check(BracketTable(3, {(1, 2): jet}), S, Jet.zero(3, 1, 4))
        assert not verdict
        assert verdict.triple == (0, 1, 2)
        assert verdict.to_dict()["triple"] == [1, 2, 3]

    def test_rescale_diffeo(self):
        """y1 = x1·exp(−x3)."""
        x3 = Jet.variable(2, 2, 1, 3)
        phi = rescale_diffeo({0: x3}, 2, 1, 3)
        assert phi.components[0].coefficient((1, 0, 1)) == -1
        assert phi.components[0].coefficient((1, 0, 2)) == Scalar("1/2")
        assert phi.components[1] == Jet.variable(1, 2, 1, 3)


class TestTheorem1:
    """Test cases for the resonant quadratic normal form."""

    def test_linearizable_example(self):
        """λ = (2, 3) with g_12 = x1x2x3 normalizes to 𝓛."""
        pj = load("linearizable.json")
        result, diffeo, report = normalize_poisson_theorem1(pj)
        assert result.P == pj.family.linear_poisson(pj.order)
        assert report.flags["linearized"]
        assert report.rescale.free_indices == (0,)
        assert pushforward(diffeo, pj.P) == result.P

    def test_resonant_example(self):
        """λ = (1, 3, 5) keeps the constant c_23 = 1 and kills G_12."""
        pj = load("resonant.json")
        result, diffeo, report = normalize_poisson_theorem1(pj)
        assert report.hypotheses.all_pass
        assert report.rescale.constants == {(1, 2): Scalar(1)}
        assert report.flags["constant_quadratic"]
        assert report.flags["free_pairs_vanish"]
        assert report.flags["resonant_support"]
        assert not report.flags["linearized"]
        assert not bracket_resonance_violations(result)
        assert family_matrix(result) == [[Jet.one(3, 1, pj.order)]]

    def test_failing_hypothesis(self):
        """H3 fails for λ = (1, −1) unless forced."""
        pj = load("h3_failure.json")
        with pytest.raises(HypothesisError):
            normalize_poisson_theorem1(pj)
        result, _, report = normalize_poisson_theorem1(pj, force=True)
        assert report.forced
        assert report.notes
        assert result.P == pj.P

    def test_report_serialization(self):
        """The report serializes with 1-based constants."""
        pj = load("resonant.json")
        _, _, report = normalize_poisson_theorem1(pj)
        data = report.to_dict()
        assert data["rescale"]["constants"] == {"2,3": "1"}
        assert data["flags"]["resonant_support"] is True

    def test_non_resonant_linear_part(self):
        """λ = (1, i) is certified non-resonant and 𝓛 keeps that shape."""
        family = LinearFamily([[Scalar(1), Scalar(0, 1)]])
        pj = PoissonJet(family, family.linear_poisson(4))
        result, _, report = normalize_poisson_theorem1(pj)
        assert report.hypotheses.non_resonance.certified
        assert report.flags["non_resonant_form"]
        assert report.flags["linearized"]
        assert result.P == pj.P


class TestOutputShape:
    """Test cases for the shapes the linear part forces on the output."""

    @staticmethod
    def quadratic_jet(lam, coefficient_of, validate=True):
        """𝓛 + g ∂1∧∂2 over 2 phase and 1 parameter variables at order 4."""
        family = LinearFamily([lam])
        x1, x2, x3 = (Jet.variable(k, 2, 1, 4) for k in range(3))
        P = family.linear_poisson(4) + PolyVector.basis((0, 1), 2, 1, 4, coefficient=coefficient_of(x1, x2, x3))
        return PoissonJet(family, P, validate=validate)

    def test_small_dimension_must_be_linear(self):
        """n ≤ p + 1 with a surviving c_12 x1x2 is a stage failure."""
        pj = self.quadratic_jet(["2", "3"], lambda x1, x2, x3: x1 * x2)
        report = Theorem1Report(hypotheses=hypotheses_report(pj.family, Config.NONRES_BOUND))
        with pytest.raises(UnexpectedNormalFormError, match="not 𝓛") as info:
            check_output_shape(pj, report)
        assert info.value.stage == "theorem1"
        assert info.value.exit_code == 5

    def test_forced_run_only_notes(self):
        """With --force the same output is kept and noted."""
        pj = self.quadratic_jet(["2", "3"], lambda x1, x2, x3: x1 * x2)
        report = Theorem1Report(hypotheses=hypotheses_report(pj.family, Config.NONRES_BOUND), forced=True)
        flags = check_output_shape(pj, report)
        assert not flags["linearized"]
        assert flags["non_resonant_form"]
        assert any("not 𝓛" in note for note in report.notes)

    def test_non_resonant_shape_enforced(self):
        """A non-constant c_12(x3) breaks the certified non-resonant shape."""
        pj = self.quadratic_jet([Scalar(1), Scalar(0, 1)], lambda x1, x2, x3: x1 * x2 * x3)
        report = Theorem1Report(hypotheses=hypotheses_report(pj.family, Config.NONRES_BOUND))
        with pytest.raises(UnexpectedNormalFormError, match="non-resonant"):
            check_output_shape(pj, report)

    def test_bounded_verdict_only_notes(self):
        """λ = (2, 3) is non-resonant only up to the bound, so that miss is noted."""
        pj = self.quadratic_jet(["2", "3"], lambda x1, x2, x3: x1 * x1 * x2, validate=False)
        report = Theorem1Report(hypotheses=hypotheses_report(pj.family, Config.NONRES_BOUND))
        assert not report.hypotheses.non_resonance.certified
        with pytest.raises(UnexpectedNormalFormError, match="not 𝓛"):
            check_output_shape(pj, report)
        assert not report.flags["non_resonant_form"]
        assert any("non-resonant" in note for note in report.notes)
