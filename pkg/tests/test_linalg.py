import random
from fractions import Fraction

import pytest

from ratmodels.linalg import SparseMatrix, dense, format_scalar, parse_scalar


def test_rank_identity():
    m = SparseMatrix.from_rows([[1, 0], [0, 1]])
    assert m.rank() == 2


def test_rank_zero_matrix():
    m = SparseMatrix(3, 4)
    assert m.rank() == 0
    assert len(m.kernel_basis()) == 4


def test_rank_one_matrix():
    m = SparseMatrix.from_rows([[1, 2], [2, 4]])
    assert m.rank() == 1
    kernel = m.kernel_basis()
    assert len(kernel) == 1
    # canonical: free column carries 1, pivot column carries the negated ratio
    assert dense(kernel[0], 2) == [Fraction(-2), Fraction(1)]


def test_kernel_identity_is_empty():
    m = SparseMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert m.kernel_basis() == []


def test_kernel_zero_matrix_is_standard_basis():
    m = SparseMatrix(2, 3)
    basis = m.kernel_basis()
    assert [dense(v, 3) for v in basis] == [
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
    ]


def test_solve_identity():
    m = SparseMatrix.from_rows([[1, 0], [0, 1]])
    x = m.solve([Fraction(5), Fraction(-7, 3)])
    assert x == {0: Fraction(5), 1: Fraction(-7, 3)}


def test_solve_scalar_division():
    m = SparseMatrix.from_rows([[2]])
    assert m.solve([3]) == {0: Fraction(3, 2)}


def test_solve_inconsistent():
    m = SparseMatrix(2, 2)
    assert m.solve([1, 0]) is None


def test_solve_underdetermined_sets_free_vars_to_zero():
    m = SparseMatrix.from_rows([[1, 2, 3]])
    x = m.solve([6])
    # pivot column 0 carries everything, free columns absent
    assert x == {0: Fraction(6)}


def test_solve_dimension_mismatch():
    m = SparseMatrix.from_rows([[1, 2]])
    with pytest.raises(ValueError):
        m.solve([1, 2])


def test_entries_never_store_zero():
    m = SparseMatrix.from_rows([[0, 1], [0, 0]])
    assert set(m.entries) == {(0, 1)}


def _random_matrix(rng, rows, cols):
    entries = {}
    for i in range(rows):
        for j in range(cols):
            if rng.random() < 0.5:
                entries[(i, j)] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return SparseMatrix(rows, cols, entries)


def test_rank_nullity_property():
    rng = random.Random(20260815)
    for _ in range(60):
        rows = rng.randint(1, 6)
        cols = rng.randint(1, 6)
        m = _random_matrix(rng, rows, cols)
        kernel = m.kernel_basis()
        assert m.rank() + len(kernel) == cols
        for vec in kernel:
            assert m.mul_vec(vec) == {}


def test_solve_roundtrip_property():
    rng = random.Random(4136)
    for _ in range(60):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        m = _random_matrix(rng, rows, cols)
        # build b in the image so a solution must exist
        x = {j: Fraction(rng.randint(-3, 3)) for j in range(cols)}
        b = m.mul_vec(x)
        sol = m.solve(b)
        assert sol is not None
        assert m.mul_vec(sol) == b


def test_solve_is_canonical_under_row_order():
    rng = random.Random(99)
    for _ in range(30):
        rows_data = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(3)]
        m1 = SparseMatrix.from_rows(rows_data)
        shuffled = list(rows_data)
        rng.shuffle(shuffled)
        m2 = SparseMatrix.from_rows(shuffled)
        assert m1.kernel_basis() == m2.kernel_basis()


def test_scalar_text_roundtrip():
    rng = random.Random(7)
    for _ in range(50):
        value = Fraction(rng.randint(-10**9, 10**9), rng.randint(1, 10**6))
        assert parse_scalar(format_scalar(value)) == value
