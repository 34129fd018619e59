"""Multi-indices as plain tuples of non-negative ints."""

from itertools import combinations_with_replacement
from typing import Iterator, Sequence, Tuple

from errors import StructuralError

MultiIndex = Tuple[int, ...]


def degree(q: MultiIndex) -> int:
    return sum(q)


def add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    if len(a) != len(b):
        raise StructuralError(f"Multi-index length mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise difference; negative entries are rejected."""
    if len(a) != len(b):
        raise StructuralError(f"Multi-index length mismatch: {len(a)} vs {len(b)}")
    out = tuple(x - y for x, y in zip(a, b))
    if any(x < 0 for x in out):
        raise StructuralError(f"{b} does not divide {a}")
    return out


def divides(a: MultiIndex, b: MultiIndex) -> bool:
    """True when a ≤ b componentwise."""
    return all(x <= y for x, y in zip(a, b))


def unit(i: int, size: int) -> MultiIndex:
    if not 0 <= i < size:
        raise StructuralError(f"Index {i} out of range for {size} variables")
    return tuple(1 if k == i else 0 for k in range(size))


def zero(size: int) -> MultiIndex:
    return (0,) * size


def pairing(q: Sequence[int], lam: Sequence):
    """(Q, λ) = Σ q_k λ_k, exact for Scalar or rational entries."""
    total = 0
    for qk, lk in zip(q, lam):
        if qk:
            total = lk * qk + total
    return total


def graded_lex_key(q: MultiIndex):
    """Total degree first, then lexicographic with x_1 largest."""
    return (sum(q), tuple(-x for x in q))


def of_degree(size: int, d: int) -> Iterator[MultiIndex]:
    """All multi-indices of exactly degree d, in graded-lex order."""
    if size == 0:
        if d == 0:
            yield ()
        return
    found = []
    for combo in combinations_with_replacement(range(size), d):
        q = [0] * size
        for k in combo:
            q[k] += 1
        found.append(tuple(q))
    found.sort(key=graded_lex_key)
    yield from found


def up_to_degree(size: int, d: int, start: int = 0) -> Iterator[MultiIndex]:
    for m in range(start, d + 1):
        yield from of_degree(size, m)


def split(q: MultiIndex, n_phase: int) -> Tuple[MultiIndex, MultiIndex]:
    return q[:n_phase], q[n_phase:]


def join(phase: MultiIndex, param: MultiIndex) -> MultiIndex:
    return tuple(phase) + tuple(param)
