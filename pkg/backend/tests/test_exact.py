import random
from fractions import Fraction

import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_smith_normal_form

from src.errors import DimensionMismatch, InvalidInput
from src.exact import (
    IntMatrix,
    canonical_line,
    determinant,
    exgcd_matrix,
    hermite_normal_form,
    integer_kernel,
    invariant_factors,
    inverse_rational,
    is_unimodular,
    primitive,
    quotient_map,
    rank,
    right_inverse,
    smith_normal_form,
    solve_rational,
)


def random_matrix(rng, rows, cols, bound=6):
    return IntMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols)


def sympy_factors(M):
    D = sympy_smith_normal_form(Matrix(M.tolist()), domain=ZZ)
    return tuple(abs(int(D[i, i])) for i in range(min(D.shape)))


def test_smith_normal_form_example():
    M = IntMatrix.from_rows([[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]])
    D, U, V = smith_normal_form(M)
    assert invariant_factors(M) == (1, 10, 30, 0)
    assert U @ M @ V == D
    assert is_unimodular(U) and is_unimodular(V)


@pytest.mark.parametrize("seed", range(40))
def test_smith_normal_form_agrees_with_sympy(seed):
    rng = random.Random(seed)
    M = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
    D, U, V = smith_normal_form(M)
    assert U @ M @ V == D
    factors = invariant_factors(M)
    assert factors == sympy_factors(M)
    nonzero = [d for d in factors if d]
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert all(d >= 0 for d in factors)


@pytest.mark.parametrize("seed", range(30))
def test_hermite_normal_form_shape(seed):
    rng = random.Random(100 + seed)
    M = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
    H, U = hermite_normal_form(M)
    assert U @ M == H
    assert abs(U.det()) == 1
    last_pivot = -1
    for i, row in enumerate(H.rows):
        if not any(row):
            assert all(not any(r) for r in H.rows[i:])
            break
        j = next(k for k, x in enumerate(row) if x)
        assert j > last_pivot
        assert row[j] > 0
        for above in H.rows[:i]:
            assert 0 <= above[j] < row[j]
        last_pivot = j


def test_hermite_normal_form_is_canonical():
    M = IntMatrix.from_rows([[2, 4, 6], [1, 1, 1]])
    swapped = IntMatrix.from_rows([[1, 1, 1], [2, 4, 6]])
    assert hermite_normal_form(M)[0] == hermite_normal_form(swapped)[0]


def test_exgcd_matrix_clears_second_entry():
    E = exgcd_matrix(12, 18)
    assert E[0, 0] * 12 + E[0, 1] * 18 == 6
    assert E[1, 0] * 12 + E[1, 1] * 18 == 0
    assert E[0, 0] * E[1, 1] - E[0, 1] * E[1, 0] == 1


def test_determinant_and_rank():
    assert determinant([[1, 2, 3], [0, 1, 4], [5, 6, 0]]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0
    assert rank([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 2
    assert rank([]) == 0


def test_integer_kernel_is_saturated():
    M = IntMatrix.from_rows([[1, 1, -1, -1]])
    K = integer_kernel(M)
    assert len(K) == 3
    for v in K:
        assert M.apply(v) == (0,)
    assert invariant_factors(IntMatrix.from_rows(K)) == (1, 1, 1)


def test_integer_kernel_trivial():
    assert integer_kernel(IntMatrix.identity(3)) == ()


def test_primitive():
    assert primitive((4, -6, 0)) == (2, -3, 0)
    with pytest.raises(InvalidInput):
        primitive((0, 0))


def test_solve_rational():
    assert solve_rational([(1, 0), (1, 2)], (3, 4)) == [Fraction(1), Fraction(2)]
    assert solve_rational([(1, 1, 0)], (0, 0, 1)) is None
    with pytest.raises(DimensionMismatch):
        solve_rational([(1, 0)], (1, 0, 0))


def test_inverse_rational():
    inv = inverse_rational([[2, 1], [1, 1]])
    assert inv == [[1, -1], [-1, 2]]


def test_right_inverse():
    A = IntMatrix.from_rows([[1, 1, -1, -1], [0, 1, 0, 2]])
    S = right_inverse(A)
    assert A @ S == IntMatrix.identity(2)
    with pytest.raises(InvalidInput):
        right_inverse(IntMatrix.from_rows([[2, 0], [0, 1]]))


def test_quotient_map_kills_the_span():
    Q = quotient_map([(1, 1, 0)], 3)
    assert Q.shape == (2, 3)
    assert Q.apply((1, 1, 0)) == (0, 0)
    assert Q @ right_inverse(Q) == IntMatrix.identity(2)
    assert quotient_map([], 2) == IntMatrix.identity(2)


def test_matrix_shapes():
    A = IntMatrix.from_rows([[1, 2, 3]])
    assert A.T.shape == (3, 1)
    assert (IntMatrix.zeros(0, 3) @ IntMatrix.zeros(3, 2)).shape == (0, 2)
    with pytest.raises(DimensionMismatch):
        A @ A
    with pytest.raises(DimensionMismatch):
        IntMatrix(((1, 2), (3,)), 2)


def test_small_normal_forms():
    H, U = hermite_normal_form(IntMatrix.from_rows([[2, 4], [1, 1]]))
    assert H.rows[0][0] == 1
    zero = IntMatrix.zeros(2, 2)
    assert hermite_normal_form(zero) == (zero, IntMatrix.identity(2))
    assert invariant_factors(IntMatrix.from_rows([[2, 0], [0, 3]])) == (1, 6)
    D, U, V = smith_normal_form(IntMatrix.from_rows([[0]]))
    assert D == IntMatrix.from_rows([[0]])
    assert U == V == IntMatrix.identity(1)


def test_kernel_of_zero_row():
    K = integer_kernel(IntMatrix.from_rows([[0, 0]]))
    assert sorted(K) == [(0, 1), (1, 0)]


def test_canonical_line():
    assert canonical_line((-2, 4)) == (1, -2)
    assert canonical_line((0, -3, 6)) == (0, 1, -2)
