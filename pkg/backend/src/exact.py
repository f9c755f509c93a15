"""Exact integer-lattice linear algebra.

Matrices are numpy arrays of dtype=object holding Python ints, so every
entry is arbitrary precision. Rational solves go through `Fraction`.
Nothing in this module touches floating point.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, InvalidInput

logger = logging.getLogger(__name__)

LatticeVector = Tuple[int, ...]


def _eye(n: int) -> np.ndarray:
    return np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object).reshape(n, n)


@dataclass(frozen=True)
class IntMatrix:
    rows: Tuple[LatticeVector, ...]
    ncols: int

    def __post_init__(self):
        if any(len(r) != self.ncols for r in self.rows):
            raise DimensionMismatch(f"ragged matrix: expected {self.ncols} columns in every row")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], ncols: Optional[int] = None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise InvalidInput("cannot infer the column count of an empty matrix")
            ncols = len(rows[0])
        return cls(rows, ncols)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "IntMatrix":
        arr = np.asarray(arr, dtype=object)
        if arr.ndim != 2:
            raise DimensionMismatch("expected a 2D array")
        return cls(tuple(tuple(int(x) for x in row) for row in arr), arr.shape[1])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_array(_eye(n))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(tuple((0,) * ncols for _ in range(nrows)), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def entries(self) -> Tuple[int, ...]:
        return tuple(x for row in self.rows for x in row)

    def array(self) -> np.ndarray:
        arr = np.empty((self.nrows, self.ncols), dtype=object)
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                arr[i, j] = x
        return arr

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(tuple(self.columns()), self.nrows)

    def columns(self) -> Tuple[LatticeVector, ...]:
        return tuple(tuple(row[j] for row in self.rows) for j in range(self.ncols))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        if self.nrows == 0 or other.ncols == 0:
            return IntMatrix.zeros(self.nrows, other.ncols)
        if self.ncols == 0:
            return IntMatrix.zeros(self.nrows, other.ncols)
        return IntMatrix.from_array(self.array().dot(other.array()))

    def apply(self, v: Sequence[int]) -> LatticeVector:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} against {self.ncols} columns")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.rows)

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise DimensionMismatch("determinant of a non-square matrix")
        return determinant(self.rows)

    def tolist(self) -> List[List[int]]:
        return [list(r) for r in self.rows]


# -- vectors ---------------------------------------------------------------

def vector_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def is_primitive(v: Sequence[int]) -> bool:
    return vector_gcd(v) == 1


def primitive(v: Sequence[int]) -> LatticeVector:
    """Divide by the coordinate gcd, keeping the direction."""
    g = vector_gcd(v)
    if g == 0:
        raise InvalidInput("the zero vector has no primitive representative")
    return tuple(int(x) // g for x in v)


def canonical_line(v: Sequence[int]) -> LatticeVector:
    """Primitive representative of the line through v, first nonzero coordinate positive."""
    p = primitive(v)
    for x in p:
        if x != 0:
            return p if x > 0 else tuple(-y for y in p)
    return p


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


# -- scalar invariants ---------------------------------------------------------

def rank(rows: Sequence[Sequence[int]]) -> int:
    A = [list(r) for r in rows if any(r)]
    if not A:
        return 0
    ncols = len(A[0])
    rk = 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[rk], A[piv] = A[piv], A[rk]
        p = A[rk][c]
        for i in range(rk + 1, len(A)):
            f = A[i][c]
            if f:
                row = [p * x - f * y for x, y in zip(A[i], A[rk])]
                g = vector_gcd(row)
                A[i] = [x // g for x in row] if g > 1 else row
        rk += 1
        if rk == len(A):
            break
    return rk


def determinant(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free elimination."""
    n = len(rows)
    if n == 0:
        return 1
    A = [list(r) for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def is_unimodular(M: IntMatrix) -> bool:
    return M.nrows == M.ncols and abs(M.det()) == 1


# -- normal forms ----------------------------------------------------------------

def exgcd_matrix(a: int, b: int) -> np.ndarray:
    """2x2 integer matrix E of determinant 1 with E @ [a, b] = [gcd(a, b), 0]."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    g, x, y = old_r, old_s, old_t
    if g < 0:
        g, x, y = -g, -x, -y
    if g == 0:
        return _eye(2)
    return np.array([[x, y], [-b // g, a // g]], dtype=object)


def hermite_normal_form(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix]:
    """Row-style HNF: returns (H, U) with U unimodular and U @ M == H.

    Pivots are positive and the entries above each pivot lie in [0, pivot).
    Columns are scanned left to right, so the result is reproducible.
    """
    if M.nrows == 0:
        raise InvalidInput("hermite_normal_form of an empty matrix")
    A = M.array()
    m, n = A.shape
    U = _eye(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        for j in range(r + 1, m):
            if A[j, c] != 0:
                E = exgcd_matrix(A[r, c], A[j, c])
                A[[r, j]] = E.dot(A[[r, j]])
                U[[r, j]] = E.dot(U[[r, j]])
        if A[r, c] == 0:
            continue
        if A[r, c] < 0:
            A[r] = -A[r]
            U[r] = -U[r]
        p = A[r, c]
        for i in range(r):
            q = A[i, c] // p
            if q:
                A[i] = A[i] - q * A[r]
                U[i] = U[i] - q * U[r]
        r += 1
    return IntMatrix.from_array(A), IntMatrix.from_array(U)


def smith_normal_form(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Returns (D, U, V) with U @ M @ V == D, D diagonal, d1 | d2 | ..., d_i >= 0."""
    if M.nrows == 0 or M.ncols == 0:
        raise InvalidInput("smith_normal_form of an empty matrix")
    D = M.array()
    m, n = D.shape
    U, V = _eye(m), _eye(n)
    for t in range(min(m, n)):
        while True:
            nonzero = [(abs(D[i, j]), i, j) for i in range(t, m) for j in range(t, n) if D[i, j] != 0]
            if not nonzero:
                return IntMatrix.from_array(D), IntMatrix.from_array(U), IntMatrix.from_array(V)
            _, pi, pj = min(nonzero)
            if pi != t:
                D[[t, pi]] = D[[pi, t]]
                U[[t, pi]] = U[[pi, t]]
            if pj != t:
                D[:, [t, pj]] = D[:, [pj, t]]
                V[:, [t, pj]] = V[:, [pj, t]]
            p = D[t, t]
            clear = True
            for i in range(t + 1, m):
                q = D[i, t] // p
                if q:
                    D[i] = D[i] - q * D[t]
                    U[i] = U[i] - q * U[t]
                clear = clear and D[i, t] == 0
            for j in range(t + 1, n):
                q = D[t, j] // p
                if q:
                    D[:, j] = D[:, j] - q * D[:, t]
                    V[:, j] = V[:, j] - q * V[:, t]
                clear = clear and D[t, j] == 0
            if not clear:
                continue
            offender = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i, j] % p != 0),
                None,
            )
            if offender is None:
                break
            D[t] = D[t] + D[offender[0]]
            U[t] = U[t] + U[offender[0]]
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
    return IntMatrix.from_array(D), IntMatrix.from_array(U), IntMatrix.from_array(V)


def invariant_factors(M: IntMatrix) -> Tuple[int, ...]:
    D, _, _ = smith_normal_form(M)
    return tuple(D.rows[i][i] for i in range(min(D.shape)))


def integer_kernel(M: IntMatrix) -> Tuple[LatticeVector, ...]:
    """Saturated basis of {v in Z^n : M v = 0}, HNF-reduced so it is canonical."""
    if M.nrows == 0:
        raise InvalidInput("integer_kernel of an empty matrix")
    D, _, V = smith_normal_form(M)
    r = sum(1 for i in range(min(D.shape)) if D.rows[i][i] != 0)
    cols = V.columns()[r:]
    if not cols:
        return ()
    H, _ = hermite_normal_form(IntMatrix.from_rows(cols, M.ncols))
    return tuple(row for row in H.rows if any(row))


# -- rational solving and lattice maps ----------------------------------------------

def solve_rational(basis: Sequence[Sequence[int]], target: Sequence[int]) -> Optional[List[Fraction]]:
    """Coefficients c with sum(c_i * basis_i) == target, or None if target is outside the span.

    When the basis is dependent the free coefficients are set to zero.
    """
    k = len(basis)
    d = len(target)
    if any(len(b) != d for b in basis):
        raise DimensionMismatch("basis vectors and target differ in length")
    A = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(d)]
    pivots = []
    row = 0
    for c in range(k):
        piv = next((i for i in range(row, d) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        p = A[row][c]
        A[row] = [x / p for x in A[row]]
        for i in range(d):
            if i != row and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[row])]
        pivots.append(c)
        row += 1
        if row == d:
            break
    if any(A[i][k] != 0 for i in range(row, d)):
        return None
    coeffs = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        coeffs[c] = A[i][k]
    return coeffs


def inverse_rational(rows: Sequence[Sequence[int]]) -> List[List[Fraction]]:
    """Gauss-Jordan inverse over the rationals."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("inverse of a non-square matrix")
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            raise InvalidInput("matrix is singular")
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [x / p for x in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]


def integral(rows: Sequence[Sequence[Fraction]]) -> IntMatrix:
    if any(x.denominator != 1 for r in rows for x in r):
        raise InvalidInput("matrix has non-integral entries")
    return IntMatrix.from_rows([[int(x) for x in r] for r in rows], len(rows[0]) if rows else 0)


def right_inverse(A: IntMatrix) -> IntMatrix:
    """Integer S with A @ S == I for a surjective lattice map A."""
    r = A.nrows
    if r == 0:
        return IntMatrix.zeros(A.ncols, 0)
    if A.ncols < r:
        raise InvalidInput("lattice map is not surjective")
    D, U, V = smith_normal_form(A)
    if any(D.rows[i][i] != 1 for i in range(r)):
        raise InvalidInput("lattice map is not surjective")
    Vr = IntMatrix.from_rows([row[:r] for row in V.rows], r)
    return Vr @ U


def quotient_map(vectors: Sequence[Sequence[int]], dim: int) -> IntMatrix:
    """Surjection Z^dim -> Z^k whose kernel is span(vectors) ∩ Z^dim.

    Rows are the HNF basis of the annihilator of `vectors`; pairing with
    that saturated basis realises the quotient lattice.
    """
    vectors = [tuple(v) for v in vectors if any(v)]
    if not vectors:
        return IntMatrix.identity(dim)
    rows = integer_kernel(IntMatrix.from_rows(vectors, dim))
    return IntMatrix.from_rows(rows, dim)
