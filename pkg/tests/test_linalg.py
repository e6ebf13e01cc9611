import random

from qaffine.linalg import (
    SparseMatrix, SparseVector, nullspace, proportional, rank, solve,
)
from qaffine.qfield import ONE, Q, ZERO, Scalar


def test_nullspace_examples():
    assert nullspace(SparseMatrix(1, 1)) == [SparseVector({0: ONE})]
    assert nullspace(SparseMatrix.identity(2)) == []
    m = SparseMatrix.from_rows([[ONE, Q], [Q.inv(), ONE]])
    (w,) = nullspace(m)
    assert proportional(w, {0: -Q, 1: ONE}) not in (None, ZERO)


def test_solve_examples():
    assert solve(SparseMatrix.identity(2), {0: ONE}) == {0: ONE}
    m = SparseMatrix.from_rows([[1, 1]])
    assert solve(m, {}) == {}
    assert solve(m, {0: ONE}) == {0: ONE}
    sing = SparseMatrix.from_rows([[1, 1], [2, 2]])
    assert solve(sing, {0: ONE}) is None


def test_proportional_examples():
    assert proportional({0: Q}, {0: ONE}) == Q
    assert proportional({0: ONE, 1: ONE}, {0: ONE}) is None
    assert proportional({}, {0: ONE}) == ZERO
    assert proportional({}, {}) == ONE
    assert proportional({0: ONE}, {}) is None


def _random_matrix(rng, r, c, zero_rows=0):
    rows = []
    for _ in range(r):
        rows.append([Scalar.laurent({rng.randint(-2, 2): rng.randint(-2, 2)}) /
                     (Q + rng.randint(1, 3)) if rng.random() < 0.6 else ZERO
                     for _ in range(c)])
    # force dependencies
    for _ in range(zero_rows):
        i, j = rng.randrange(r), rng.randrange(r)
        rows[i] = [a + Q * b for a, b in zip(rows[i], rows[j])] if i != j else rows[i]
    return SparseMatrix.from_rows(rows)


def test_rank_nullity_and_kernel_seeded():
    rng = random.Random(7)
    for _ in range(30):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        m = _random_matrix(rng, r, c, zero_rows=1)
        ns = nullspace(m)
        assert rank(m) + len(ns) == c
        for w in ns:
            assert m.mul_vector(w) == {}


def test_solve_consistent_seeded():
    rng = random.Random(11)
    for _ in range(30):
        m = _random_matrix(rng, 4, 4, zero_rows=1)
        x = {i: Scalar.from_int(rng.randint(-3, 3)) for i in range(4)}
        x = {k: v for k, v in x.items() if v}
        b = m.mul_vector(x)
        sol = solve(m, b)
        assert sol is not None
        assert m.mul_vector(sol) == b
