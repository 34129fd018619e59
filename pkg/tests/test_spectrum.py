import pytest

from algebra.scalar import Scalar
from errors import ConstructorCheckError, StructuralError
from spectrum.diophantine import brjuno_partial_sums, omega_sequence
from spectrum.family import LinearFamily
from spectrum.hypotheses import check_non_resonance, hypotheses_report
from spectrum.invariants import decompose_in_generators, invariant_generators, is_invariant
from spectrum.resonance import resonant_monomials


@pytest.fixture
def saddle():
    """λ = (1, −1)."""
    return LinearFamily([["1", "-1"]])


@pytest.fixture
def node():
    """λ = (2, 3)."""
    return LinearFamily([["2", "3"]])


class TestLinearFamily:
    """Test cases for the eigenvalue matrix."""

    def test_dependent_rows_rejected(self):
        """Rows must be independent over C."""
        with pytest.raises(ConstructorCheckError):
            LinearFamily([["1", "2"], ["2", "4"]])

    def test_ragged_rows_rejected(self):
        """Every row has n entries."""
        with pytest.raises(ConstructorCheckError):
            LinearFamily([["1", "2"], ["1"]])

    def test_free_indices(self):
        """Pivot columns of λ."""
        assert LinearFamily([["1", "-1", "2"]]).free_indices() == (0,)
        assert LinearFamily([["0", "1", "1"], ["1", "0", "1"]]).free_indices() == (0, 1)

    def test_round_trip(self, saddle):
        """to_list/from_list keep λ."""
        assert LinearFamily.from_list(saddle.to_list()) == saddle


class TestResonance:
    """Test cases for resonant monomial enumeration."""

    def test_function_resonances(self, saddle):
        """x1x2 and x1²x2² are the invariants up to degree 4."""
        report = resonant_monomials(saddle, "function", 4)
        assert [e.monomial for e in report.entries] == [(1, 1), (2, 2)]

    def test_vector_resonances(self, saddle):
        """x1²x2 ∂1 and x1x2² ∂2 at degree 3."""
        report = resonant_monomials(saddle, "vector", 3)
        assert [(e.monomial, e.target) for e in report.entries] == [((2, 1), (0,)), ((1, 2), (1,))]
        assert report.contains((2, 1), (0,))
        assert report.monomials_for((1,)) == [(1, 2)]

    def test_bivector_resonances(self, saddle):
        """Bivector resonances for ∂1∧∂2 match the function invariants."""
        report = resonant_monomials(saddle, "bivector", 4, pair=(0, 1))
        assert report.monomials_for((0, 1)) == [(1, 1), (2, 2)]
        assert report.to_dict()["entries"][0] == {"monomial": [1, 1], "target": [1, 2]}

    def test_non_resonant_node(self, node):
        """λ = (2, 3) has no vector resonances."""
        assert resonant_monomials(node, "vector", 6).entries == []

    def test_unknown_kind(self, saddle):
        """Only function, vector and bivector kinds exist."""
        with pytest.raises(StructuralError):
            resonant_monomials(saddle, "tensor", 3)


class TestHypotheses:
    """Test cases for H1-H4 and non-resonance."""

    def test_opposite_eigenvalues_fail_h3(self, saddle):
        """λ1 + λ2 = 0 breaks H3 only."""
        report = hypotheses_report(saddle, 4)
        assert report.failures() == ["H3"]
        assert report.get("H3").to_dict()["witness"] == [1, 2]
        assert not report.all_pass

    def test_node_passes(self, node):
        """λ = (2, 3) satisfies H1-H4."""
        report = hypotheses_report(node, 4)
        assert report.all_pass
        assert report.to_dict()["all_pass"] is True

    def test_resonance_witness(self, saddle):
        """(1, 1) is the smallest resonance of λ = (1, −1)."""
        verdict = check_non_resonance(saddle, 4)
        assert not verdict.non_resonant
        assert verdict.witness == (1, 1)

    def test_bounded_non_resonance(self, node):
        """No relation within the bound, but not certified."""
        verdict = check_non_resonance(node, 4)
        assert verdict.non_resonant
        assert not verdict.certified

    def test_certified_non_resonance(self):
        """(1, i) has no real integer relation at all."""
        verdict = check_non_resonance(LinearFamily([[Scalar(1), Scalar(0, 1)]]), 4)
        assert verdict.non_resonant
        assert verdict.certified


class TestInvariants:
    """Test cases for invariant monomials."""

    def test_saddle_generator(self, saddle):
        """x1x2 generates, and degree 4 certifies completeness."""
        ring = invariant_generators(saddle, 4)
        assert ring.generators == [(1, 1)]
        assert ring.rays == [(1, 1)]
        assert ring.required_degree == 2
        assert ring.complete

    def test_two_generators(self):
        """λ = (1, 1, −1) has invariants x1x3 and x2x3."""
        S = LinearFamily([["1", "1", "-1"]])
        ring = invariant_generators(S, 4)
        assert ring.generators == [(1, 0, 1), (0, 1, 1)]
        assert is_invariant(S, (1, 0, 1))
        assert not is_invariant(S, (1, 1, 0))

    def test_decompose(self):
        """x1²x2x3³ = u1² u2."""
        generators = [(1, 0, 1), (0, 1, 1)]
        assert decompose_in_generators({(2, 1, 3): "c"}, generators) == {(2, 1): "c"}
        assert decompose_in_generators({(1, 0, 0): "c"}, generators) is None

    def test_bad_bound(self, saddle):
        """Degree bound must be positive."""
        with pytest.raises(StructuralError):
            invariant_generators(saddle, 0)


class TestDiophantine:
    """Test cases for small divisors."""

    def test_first_term(self, saddle):
        """ω_1 = 1 for λ = (1, −1), first reached by x1² at index 1."""
        sequence = omega_sequence(saddle, 1)
        assert len(sequence) == 1
        term = sequence[0]
        assert term.omega == 1.0
        assert term.monomial == (2, 0)
        assert term.to_dict()["index"] == 1
        assert brjuno_partial_sums(sequence) == [0.0]

    def test_kmax_must_be_positive(self, saddle):
        """k_max ≥ 1."""
        with pytest.raises(StructuralError):
            omega_sequence(saddle, 0)
