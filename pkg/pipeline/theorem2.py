"""
Normal form of rank-2p structures: P = Σ_k (Σ_l b_kl(u) S_l) ∧ ∂_{n+k}.

After the resonant normal form, the phase bivector is divided by the
hamiltonians, P = Σ X_i ∧ Ã_i with Ã_i = ∂_{n+i} + A_i. The Ã_i are then
straightened one at a time: a Frobenius correction makes Ã_q commute with the
already straightened ∂_{n+i}, and a symmetric gauge Ã_i + Σ f_il X_l (which
leaves P unchanged) removes what the correction leaves along the X_l. Last,
the parameter dependence of b is removed by straightening the fields
Δ_i = Σ_k (M⁻¹)_ki Γ_k, Γ_k = Σ_i a_ik ∂_{n+i}, with M = a on x″ = 0.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from algebra import linalg
from algebra.jet import Jet
from algebra.scalar import Scalar
from config import Config
from errors import HypothesisError, RankConditionError, StageError, StructuralError, UnexpectedNormalFormError
from pipeline.frobenius import frobenius_solve
from pipeline.poisson_jet import PoissonJet
from pipeline.saito import divide_by_family, saito_divide
from pipeline.straighten import coordinate_field, is_coordinate_field, straighten_field
from pipeline.theorem1 import Theorem1Report, family_matrix, invariant_support, normalize_poisson_theorem1
from polyvector.diffeo import DiffeoJet, invert_diffeo, pushforward
from polyvector.polyvector import PolyVector, lie_bracket, wedge_power
from spectrum.family import LinearFamily
from spectrum.invariants import InvariantRing, decompose_in_generators, invariant_generators

logger = logging.getLogger(__name__)

STAGE = "theorem2"

JetMatrix = List[List[Jet]]
Coefficients = List[List[List[Jet]]]


def _jets_to_list(jets: Sequence[Jet]) -> list:
    return [j.to_list() for j in jets]


@dataclass
class ConnectionData:
    """
    θ[i][j][l] with [Ã_i, X_j] = Σ_l θ_ij^l X_l and γ[i][j][l] with
    [Ã_i, Ã_j] = Σ_l γ_ij^l X_l, plus the per-stage solutions.
    """

    A: List[PolyVector]
    theta: Coefficients
    gamma: Coefficients
    beta: Dict[int, List[Jet]] = field(default_factory=dict)
    c: Dict[int, List[Jet]] = field(default_factory=dict)
    f: Dict[int, JetMatrix] = field(default_factory=dict)
    g: Dict[int, List[Jet]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        def triples(table: Coefficients) -> dict:
            return {
                f"{i + 1},{j + 1},{l + 1}": jet.to_list()
                for i, row in enumerate(table)
                for j, entry in enumerate(row)
                for l, jet in enumerate(entry)
                if not jet.is_zero()
            }

        return {
            "A": [a.to_dict() for a in self.A],
            "theta": triples(self.theta),
            "gamma": triples(self.gamma),
            "beta": {str(q + 1): _jets_to_list(v) for q, v in sorted(self.beta.items())},
            "c": {str(q + 1): _jets_to_list(v) for q, v in sorted(self.c.items())},
            "f": {str(q + 1): [_jets_to_list(r) for r in m] for q, m in sorted(self.f.items())},
            "g": {str(q + 1): _jets_to_list(v) for q, v in sorted(self.g.items())},
        }


@dataclass
class Theorem2Report:
    theorem1: Optional[Theorem1Report] = None
    connection: Optional[ConnectionData] = None
    b: Optional[JetMatrix] = None
    invariants: Optional[InvariantRing] = None
    b_generators: Optional[List[List[Optional[dict]]]] = None
    stages: List[dict] = field(default_factory=list)
    flags: dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "theorem1": None if self.theorem1 is None else self.theorem1.to_dict(),
            "connection": None if self.connection is None else self.connection.to_dict(),
            "b": None if self.b is None else [_jets_to_list(r) for r in self.b],
            "invariants": None if self.invariants is None else self.invariants.to_dict(),
            "b_generators": self.b_generators,
            "stages": list(self.stages),
            "flags": dict(self.flags),
            "notes": list(self.notes),
        }

    def fiber_matrix(self, values: Sequence) -> List[List[Scalar]]:
        """
        b at the point π = values of the invariant generators.

        On the fiber π⁻¹(values) × C^p the structure is the linear one
        Σ_k (Σ_l b_kl(values) S_l)∧∂_{n+k}.
        """
        if self.invariants is None or self.b_generators is None:
            raise StageError(STAGE, "no invariant expansion of b to evaluate")
        point = [Scalar.coerce(v) for v in values]
        if len(point) != len(self.invariants.generators):
            raise StructuralError(
                f"expected {len(self.invariants.generators)} generator values, got {len(point)}"
            )
        matrix = []
        for row in self.b_generators:
            out_row = []
            for entry in row:
                if entry is None:
                    raise StageError(STAGE, "b_kl is not a polynomial in the invariant generators")
                total = Scalar.zero()
                for key, c in entry.items():
                    term = Scalar.parse(c)
                    for v, e in zip(point, (int(x) for x in key.split(","))):
                        for _ in range(e):
                            term = term * v
                    total = total + term
                out_row.append(total)
            matrix.append(out_row)
        return matrix


# Connection coefficients


def theta_coefficients(tilde: Sequence[PolyVector], X: Sequence[PolyVector], S: LinearFamily, a: JetMatrix) -> Coefficients:
    return [[divide_by_family(lie_bracket(t, x), X, S, a) for x in X] for t in tilde]


def gamma_coefficients(tilde: Sequence[PolyVector], X: Sequence[PolyVector], S: LinearFamily, a: JetMatrix) -> Coefficients:
    p = len(tilde)
    table: Coefficients = [[[] for _ in range(p)] for _ in range(p)]
    for i in range(p):
        for j in range(i + 1, p):
            table[i][j] = divide_by_family(lie_bracket(tilde[i], tilde[j]), X, S, a)
            table[j][i] = [-e for e in table[i][j]]
    order = min(e.order for row in a for e in row)
    for i in range(p):
        table[i][i] = [Jet.zero(S.n, S.p, order) for _ in range(p)]
    return table


def theta_matrix(theta: Coefficients, i: int) -> JetMatrix:
    """Θ_i with entries (Θ_i)_kl = θ_il^k."""
    p = len(theta)
    return [[theta[i][l][k] for l in range(p)] for k in range(p)]


def _same(a: Jet, b: Jet) -> bool:
    d = min(a.order, b.order)
    return a.truncate(d) == b.truncate(d)


def check_connection_symmetry(theta: Coefficients, gamma: Coefficients):
    """θ_ij^l = θ_lj^i and γ_ij^l = γ_lj^i."""
    p = len(theta)
    for i in range(p):
        for j in range(p):
            for l in range(i + 1, p):
                if not _same(theta[i][j][l], theta[l][j][i]):
                    raise StageError(STAGE, f"θ is not symmetric at ({i + 1}, {j + 1}, {l + 1})")
                if not _same(gamma[i][j][l], gamma[l][j][i]):
                    raise StageError(STAGE, f"γ is not symmetric at ({i + 1}, {j + 1}, {l + 1})")


def _require_invariant(jets: Sequence[Jet], s_fields: Sequence[PolyVector], what: str):
    for s in s_fields:
        if any(not s.apply(j).is_zero() for j in jets):
            raise StageError(STAGE, f"{what} is not S-invariant")


def _family_matrix(pj: PoissonJet) -> JetMatrix:
    a = family_matrix(pj)
    if a is None:
        raise StageError(STAGE, "hamiltonians are not combinations of the S_j")
    return a


def _combination(coeffs: Sequence[Jet], fields: Sequence[PolyVector], like: PolyVector) -> PolyVector:
    total = PolyVector.zero(1, like.n_phase, like.n_param, like.order)
    for c, f in zip(coeffs, fields):
        if not c.is_zero():
            total = total + f * c
    return total


# Stages


class _State:
    """Current jet, correctors Ã_i and the accumulated diffeo."""

    def __init__(self, pj: PoissonJet, tilde: List[PolyVector], diffeo: DiffeoJet, s_fields: List[PolyVector]):
        self.pj = pj
        self.tilde = tilde
        self.diffeo = diffeo
        self.s_fields = s_fields

    @property
    def n(self) -> int:
        return self.pj.n

    def coordinate(self, i: int) -> PolyVector:
        return coordinate_field(self.n + i, self.n, self.pj.p, self.pj.order)

    def apply(self, G: DiffeoJet, fields: Dict) -> Dict:
        """Push P and the given fields through G."""
        psi = invert_diffeo(G)
        self.pj = self.pj.with_bivector(pushforward(G, self.pj.P, inverse=psi), validate=False)
        self.diffeo = G.compose(self.diffeo)
        return {k: pushforward(G, v, inverse=psi) for k, v in fields.items()}


def _straighten_sequence(
    state: _State,
    fields: List[PolyVector],
    stage: str,
    report: Theorem2Report,
    extra: Optional[Dict[int, PolyVector]] = None,
) -> Dict[int, PolyVector]:
    """Straighten fields[i] to ∂_{n+i} in turn; ``extra`` fields are carried along."""
    extra = dict(extra or {})
    for i in range(len(fields)):
        if is_coordinate_field(fields[i], state.n + i):
            continue
        preserve = [state.coordinate(m) for m in range(i)] + state.s_fields
        G = straighten_field(fields[i], i, preserve)
        moved = {("field", j): fields[j] for j in range(i + 1, len(fields))}
        moved.update({("extra", k): v for k, v in extra.items()})
        pushed = state.apply(G, moved)
        for j in range(i + 1, len(fields)):
            fields[j] = pushed[("field", j)]
        extra = {k: pushed[("extra", k)] for k in extra}
        fields[i] = state.coordinate(i)
        report.stages.append({"stage": stage, "field": i + 1, "order": G.order})
    return extra


def _correction_stage(state: _State, q: int, conn: ConnectionData, report: Theorem2Report):
    """Make Ã_q − Σ β_j X_j commute with ∂_{n+i}, i < q, and straighten it."""
    pj, n, p = state.pj, state.n, state.pj.p
    S = pj.family
    X = pj.hamiltonians()
    a = _family_matrix(pj)
    done = list(range(q))
    if done:
        theta = theta_coefficients(state.tilde, X, S, a)
        gamma = gamma_coefficients(state.tilde, X, S, a)
        beta = frobenius_solve(
            [theta_matrix(theta, i) for i in done],
            [gamma[i][q] for i in done],
            [n + i for i in done],
        )
        _require_invariant(beta, state.s_fields, f"β_{q + 1}")
    else:
        beta = [Jet.zero(n, p, pj.order) for _ in range(p)]
    conn.beta[q] = beta

    corrected = state.tilde[q] - _combination(beta, X, state.tilde[q])
    if is_coordinate_field(corrected, n + q):
        return
    preserve = [state.coordinate(i) for i in done] + state.s_fields
    G = straighten_field(corrected, q, preserve)
    later = {l: state.tilde[l] for l in range(q, p)}
    pushed = state.apply(G, later)
    for l in range(q, p):
        state.tilde[l] = pushed[l]
    report.stages.append({"stage": "correction", "field": q + 1, "order": G.order})


def _gauge_stage(state: _State, q: int, conn: ConnectionData, report: Theorem2Report):
    """Symmetric gauge f making Ã_1..Ã_q commuting coordinate fields."""
    pj, n, p = state.pj, state.n, state.pj.p
    S = pj.family
    X = pj.hamiltonians()
    a = _family_matrix(pj)
    c = divide_by_family(state.tilde[q] - state.coordinate(q), X, S, a)
    conn.c[q] = c
    if all(e.is_zero() for e in c):
        state.tilde[q] = state.coordinate(q)
        return

    done = list(range(q))
    order = min(e.order for e in c)
    g = [Jet.zero(n, p, order) for _ in range(p)]
    if done:
        g[q] = frobenius_solve([None] * q, [[-c[i]] for i in done], [n + i for i in done])[0]
    conn.g[q] = g

    theta = theta_coefficients(state.tilde, X, S, a)
    F: JetMatrix = []
    for i in range(q + 1):
        row = linalg.jet_mat_vec(theta_matrix(theta, i), g)
        row = [gi.diff(n + i) - r for gi, r in zip(g, row)]
        if i == q:
            row = [r - ci for r, ci in zip(row, c)]
        F.append(row)
    for i in range(q + 1):
        for l in range(i + 1, q + 1):
            if not _same(F[i][l], F[l][i]):
                raise StageError(STAGE, f"gauge f is not symmetric at ({i + 1}, {l + 1})")
    conn.f[q] = F

    fields = [state.tilde[i] + _combination(F[i], X, state.tilde[i]) for i in range(q + 1)]
    # f_li = f_il for l > q keeps Σ X_i ∧ Ã_i unchanged
    rest = {
        l: state.tilde[l] + _combination([F[i][l] for i in range(q + 1)], X[: q + 1], state.tilde[l])
        for l in range(q + 1, p)
    }
    rest = _straighten_sequence(state, fields, "gauge", report, rest)
    for i in range(q + 1):
        state.tilde[i] = state.coordinate(i)
    for l, v in rest.items():
        state.tilde[l] = v


def _parameter_stage(state: _State, report: Theorem2Report) -> JetMatrix:
    """Straighten Δ_i so that b no longer depends on x″; returns b."""
    pj, n, p = state.pj, state.n, state.pj.p
    a = _family_matrix(pj)
    M = [[e.restrict_parameters() for e in row] for row in a]
    M_inv = linalg.jet_matrix_inverse(M)
    order = min(e.order for row in a for e in row)
    deltas = []
    for i in range(p):
        comps = [Jet.zero(n, p, order) for _ in range(n + p)]
        for j in range(p):
            # (a M⁻¹)_ji
            total = Jet.zero(n, p, order)
            for k in range(p):
                total = total + a[j][k] * M_inv[k][i]
            comps[n + j] = total
        deltas.append(PolyVector.vector_field(comps))
    _straighten_sequence(state, deltas, "parameters", report)
    return _family_matrix(state.pj)


def fibers_invariant(S: LinearFamily, ring: InvariantRing, order: int) -> bool:
    """Every S_k kills every generator x^R, so the S_k are tangent to the fibers of π."""
    n, p = S.n, S.p
    fields = S.S_fields(order)
    monomials = [Jet.monomial(tuple(R) + (0,) * p, 1, n, p, order) for R in ring.generators if sum(R) <= order]
    return all(X.apply(u).is_zero() for X in fields for u in monomials)


def linearization_flags(result: PoissonJet, a: JetMatrix) -> dict:
    """
    ``linear_family``: the hamiltonians after the family normal form are S_k.
    A formally linear family forces P to be 𝓛, so a miss raises.
    """
    n, p, order = result.n, result.p, result.order
    one, zero = Jet.one(n, p, order), Jet.zero(n, p, order)
    linear_family = all(_same(a[k][l], one if k == l else zero) for k in range(p) for l in range(p))
    linearized = result.P == result.family.linear_poisson(order)
    if linear_family and not linearized:
        raise UnexpectedNormalFormError(STAGE, "the hamiltonian family is linear but P is not 𝓛")
    return {"linear_family": linear_family, "linearized": linearized}


def _decompose(S: LinearFamily, b: JetMatrix, ring: InvariantRing) -> List[List[Optional[dict]]]:
    out = []
    for row in b:
        out_row = []
        for entry in row:
            coefficients = {q[: S.n]: c for q, c in entry.terms.items()}
            parts = decompose_in_generators(coefficients, ring.generators)
            out_row.append(
                None if parts is None else {",".join(str(e) for e in w): str(c) for w, c in sorted(parts.items())}
            )
        out.append(out_row)
    return out


def normalize_rank2p_theorem2(pj: PoissonJet, force: bool = False) -> Tuple[PoissonJet, DiffeoJet, Theorem2Report]:
    n, p = pj.n, pj.p
    report = Theorem2Report()
    if n <= p + 1:
        message = f"n = {n} must exceed p + 1 = {p + 1}"
        if not force:
            raise HypothesisError(message)
        report.notes.append(message)
    if not wedge_power(pj.P, p + 1).is_zero():
        raise RankConditionError(f"P^(p+1) does not vanish up to order {pj.order}")

    current, diffeo, report.theorem1 = normalize_poisson_theorem1(pj, force=force, check_hypotheses=False)
    S = current.family
    X = current.hamiltonians()
    a = _family_matrix(current)
    A = saito_divide(current.phase_bivector(), X, S)
    tilde = [coordinate_field(n + i, n, p, current.order) + A[i] for i in range(p)]
    theta = theta_coefficients(tilde, X, S, a)
    gamma = gamma_coefficients(tilde, X, S, a)
    check_connection_symmetry(theta, gamma)
    conn = ConnectionData(A=A, theta=theta, gamma=gamma)
    report.connection = conn
    logger.info(f"divided the phase bivector by {p} hamiltonian(s)")

    state = _State(current, tilde, diffeo, S.S_fields(current.order))
    for q in range(p):
        _correction_stage(state, q, conn, report)
        _gauge_stage(state, q, conn, report)
        logger.debug(f"stage {q + 1}/{p} straightened")

    if not state.pj.phase_bivector().is_zero():
        raise StageError(STAGE, "phase bracket survives the straightening stages")

    b = _parameter_stage(state, report)
    result = state.pj.with_bivector(state.pj.P)
    report.b = b
    parameter_free = not any(e.depends_on(n + j) for row in b for e in row for j in range(p))
    invariant = invariant_support(S, b)
    report.flags = {
        "phase_bracket_zero": result.phase_bivector().is_zero(),
        "parameter_free": parameter_free,
        "invariant_support": invariant,
    }
    if not (parameter_free and invariant):
        raise StageError(STAGE, f"b fails the output shape: {report.flags}")

    report.flags.update(linearization_flags(result, a))
    report.invariants = invariant_generators(S, Config.DEGREE_BOUND)
    report.b_generators = _decompose(S, b, report.invariants)
    report.flags["fibers_invariant"] = fibers_invariant(S, report.invariants, result.order)
    logger.info(f"rank-2p normal form reached at order {result.order}")
    return result, state.diffeo, report
