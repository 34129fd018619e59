"""
Exact linear algebra over Q(i) on top of sympy's DomainMatrix.

Matrices are passed around as lists of rows of Scalars; conversion to and
from ``DomainMatrix`` over ``QQ_I`` (or ``QQ`` for real problems) happens at
the boundary.
"""

from typing import List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from algebra.jet import Jet
from algebra.scalar import Scalar
from errors import StructuralError

Matrix = List[List[Scalar]]


def _shape(rows: Sequence[Sequence]) -> Tuple[int, int]:
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    if any(len(r) != ncols for r in rows):
        raise StructuralError("Ragged matrix")
    return nrows, ncols


def to_domain_matrix(rows: Sequence[Sequence[Scalar]]) -> DomainMatrix:
    nrows, ncols = _shape(rows)
    data = [[(Scalar.coerce(c).re, Scalar.coerce(c).im) for c in r] for r in rows]
    if not nrows or not ncols:
        return DomainMatrix.zeros((nrows, ncols), QQ_I)
    return DomainMatrix.from_list(data, QQ_I)


def from_domain_matrix(dm: DomainMatrix) -> Matrix:
    if dm.domain == QQ_I:
        return [[Scalar.from_domain(e) for e in r] for r in dm.to_list()]
    return [[Scalar(e) for e in r] for r in dm.convert_to(QQ).to_list()]


def rank(rows: Sequence[Sequence[Scalar]]) -> int:
    nrows, ncols = _shape(rows)
    if not nrows or not ncols:
        return 0
    return to_domain_matrix(rows).rank()


def real_rank(rows: Sequence[Sequence[Scalar]]) -> int:
    """Rank over Q of the stacked real matrix [Re; Im]."""
    nrows, ncols = _shape(rows)
    if not nrows or not ncols:
        return 0
    stacked = [[c.re for c in r] for r in rows] + [[c.im for c in r] for r in rows]
    return DomainMatrix.from_list(stacked, QQ).rank()


def real_nullspace(rows: Sequence[Sequence[Scalar]]) -> List[List]:
    """Basis over Q of {v real : Re(A)v = Im(A)v = 0}, as rows of rationals."""
    nrows, ncols = _shape(rows)
    if not ncols:
        return []
    if not nrows:
        return [[QQ(1) if k == j else QQ(0) for k in range(ncols)] for j in range(ncols)]
    stacked = [[c.re for c in r] for r in rows] + [[c.im for c in r] for r in rows]
    return DomainMatrix.from_list(stacked, QQ).nullspace().to_list()


def rref(rows: Sequence[Sequence[Scalar]]) -> Tuple[Matrix, Tuple[int, ...]]:
    nrows, ncols = _shape(rows)
    if not nrows or not ncols:
        return [list(r) for r in rows], ()
    reduced, pivots = to_domain_matrix(rows).rref()
    return from_domain_matrix(reduced), tuple(pivots)


def nullspace(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    """Basis of the right kernel, one vector per row."""
    nrows, ncols = _shape(rows)
    if not ncols:
        return []
    if not nrows:
        return [[Scalar.one() if k == j else Scalar.zero() for k in range(ncols)] for j in range(ncols)]
    return from_domain_matrix(to_domain_matrix(rows).nullspace())


def inverse(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    nrows, ncols = _shape(rows)
    if nrows != ncols:
        raise StructuralError(f"Cannot invert a {nrows}x{ncols} matrix")
    if not nrows:
        return []
    try:
        return from_domain_matrix(to_domain_matrix(rows).inv())
    except (DMNonInvertibleMatrixError, ZeroDivisionError) as e:
        raise StructuralError("Matrix is singular") from e


def solve(rows: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> Optional[List[Scalar]]:
    """
    A particular solution of A x = b with every free variable set to zero.

    Returns None when the system is inconsistent.
    """
    solutions = solve_many(rows, [rhs])
    return None if solutions is None else solutions[0]


def solve_many(rows: Sequence[Sequence[Scalar]], rhs_list: Sequence[Sequence[Scalar]]) -> Optional[List[List[Scalar]]]:
    """Solve A x = b for several right-hand sides with one elimination."""
    nrows, ncols = _shape(rows)
    k = len(rhs_list)
    if any(len(b) != nrows for b in rhs_list):
        raise StructuralError("Right-hand side length does not match the matrix")
    if not nrows:
        return [[Scalar.zero()] * ncols for _ in range(k)]
    augmented = [list(rows[r]) + [Scalar.coerce(b[r]) for b in rhs_list] for r in range(nrows)]
    reduced, pivots = rref(augmented)
    if any(p >= ncols for p in pivots):
        return None
    solutions = [[Scalar.zero()] * ncols for _ in range(k)]
    for r, col in enumerate(pivots):
        for j in range(k):
            solutions[j][col] = reduced[r][ncols + j]
    return solutions


def mat_vec(rows: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> List[Scalar]:
    out = []
    for r in rows:
        total = Scalar.zero()
        for a, b in zip(r, v):
            if a and b:
                total = total + a * b
        out.append(total)
    return out


def mat_mul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> Matrix:
    cols = list(zip(*b)) if b else []
    return [[sum((x * y for x, y in zip(r, c)), Scalar.zero()) for c in cols] for r in a]


def identity(n: int) -> Matrix:
    return [[Scalar.one() if i == j else Scalar.zero() for j in range(n)] for i in range(n)]


# Matrices of jets

JetMatrix = List[List[Jet]]


def jet_mat_mul(a: Sequence[Sequence[Jet]], b: Sequence[Sequence[Jet]]) -> JetMatrix:
    inner = len(b)
    ncols = len(b[0]) if inner else 0
    out = []
    for r in a:
        row = []
        for c in range(ncols):
            total = r[0] * b[0][c]
            for k in range(1, inner):
                total = total + r[k] * b[k][c]
            row.append(total)
        out.append(row)
    return out


def jet_mat_vec(a: Sequence[Sequence[Jet]], v: Sequence[Jet]) -> List[Jet]:
    out = []
    for r in a:
        total = r[0] * v[0]
        for k in range(1, len(v)):
            total = total + r[k] * v[k]
        out.append(total)
    return out


def jet_matrix_inverse(m: Sequence[Sequence[Jet]]) -> JetMatrix:
    """
    Inverse of a square jet matrix with invertible constant part.

    With M = M0 (1 + N) and N of valuation ≥ 1, M⁻¹ = Σ_k (−N)^k M0⁻¹; the
    series stops once the powers vanish at the working order.
    """
    size = len(m)
    if not size:
        return []
    if any(len(r) != size for r in m):
        raise StructuralError("Jet matrix must be square")
    sample = m[0][0]
    n_phase, n_param = sample.n_phase, sample.n_param
    order = min(e.order for r in m for e in r)
    m0 = [[e.constant_term() for e in r] for r in m]
    m0_inv = inverse(m0)
    m0_inv_jets = [[Jet.constant(c, n_phase, n_param, order) for c in r] for r in m0_inv]
    # N = M0⁻¹ (M − M0)
    rest = [[e - e.constant_term() for e in r] for r in m]
    n_mat = jet_mat_mul(m0_inv_jets, rest)
    neg_n = [[-e for e in r] for r in n_mat]
    total = [[Jet.constant(1 if i == j else 0, n_phase, n_param, order) for j in range(size)] for i in range(size)]
    power = [row[:] for row in total]
    for _ in range(order):
        power = jet_mat_mul(power, neg_n)
        if all(e.is_zero() for r in power for e in r):
            break
        total = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(total, power)]
    # (1 + N)⁻¹ M0⁻¹
    return jet_mat_mul(total, m0_inv_jets)
