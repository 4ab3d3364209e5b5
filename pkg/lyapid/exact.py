"""
Exact rational matrices built on fractions.Fraction.

Every decision made by the package (determinants vanishing, ranks, positive
definiteness) goes through this module, so nothing here uses floating point.
`RatMatrix.to_numpy` exists for diagnostics only.
"""

from fractions import Fraction
import logging
from math import lcm

import numpy as np

log = logging.getLogger(__name__)


class MatrixError(ValueError):
    """A matrix has the wrong shape or structure for the requested operation."""


class MatrixParseError(MatrixError):
    """A CSV matrix document could not be parsed."""


class SingularMatrixError(ArithmeticError):
    """A linear system has no unique solution."""


def to_rational(value):
    """Convert an int, Fraction or string ('3', '-15/8', '1.875') exactly."""
    if isinstance(value, float):
        raise TypeError('Floats are not exact; pass {!r} as a string or Fraction'.format(value))
    return Fraction(value)


def format_rational(value):
    """'p/q', or just 'p' for integers."""
    return str(Fraction(value))


class RatMatrix:
    """An immutable dense matrix of Fractions stored row-major."""

    __slots__ = ('rows', 'cols', 'entries')

    def __init__(self, rows, cols, entries):
        entries = tuple(to_rational(x) for x in entries)
        if len(entries) != rows * cols:
            raise MatrixError('A {}x{} matrix needs {} entries, got {}'.format(
                rows, cols, rows * cols, len(entries)))
        object.__setattr__(self, 'rows', rows)
        object.__setattr__(self, 'cols', cols)
        object.__setattr__(self, 'entries', entries)

    def __setattr__(self, name, value):
        raise AttributeError('RatMatrix is immutable')

    @classmethod
    def from_rows(cls, rows):
        rows = [list(row) for row in rows]
        cols = len(rows[0]) if rows else 0
        for number, row in enumerate(rows):
            if len(row) != cols:
                raise MatrixError('Row {} has {} entries, expected {}'.format(number + 1, len(row), cols))
        return cls(len(rows), cols, [x for row in rows for x in row])

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n):
        return cls.diagonal([1] * n)

    @classmethod
    def diagonal(cls, values):
        values = list(values)
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @property
    def shape(self):
        return self.rows, self.cols

    @property
    def is_square(self):
        return self.rows == self.cols

    def __getitem__(self, index):
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError('Index {} outside a {}x{} matrix'.format(index, self.rows, self.cols))
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j):
        return self.entries[j::self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return 'RatMatrix({})'.format(self.to_strings())

    def transpose(self):
        return RatMatrix(self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def submatrix(self, rows, cols):
        rows, cols = list(rows), list(cols)
        return RatMatrix(len(rows), len(cols), [self[i, j] for i in rows for j in cols])

    def with_column(self, j, values):
        """Copy of the matrix with column j replaced by `values`."""
        values = list(values)
        if len(values) != self.rows:
            raise MatrixError('Replacement column has {} entries, expected {}'.format(len(values), self.rows))
        return RatMatrix(self.rows, self.cols, [values[i] if c == j else self[i, c]
                                                for i in range(self.rows) for c in range(self.cols)])

    def is_symmetric(self):
        return self.is_square and all(self[i, j] == self[j, i]
                                      for i in range(self.rows) for j in range(i + 1, self.cols))

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise MatrixError('Shapes {} and {} differ'.format(self.shape, other.shape))

    def __add__(self, other):
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, factor):
        factor = to_rational(factor)
        return RatMatrix(self.rows, self.cols, [factor * a for a in self.entries])

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise MatrixError('Cannot multiply {} by {}'.format(self.shape, other.shape))
        columns = [other.column(j) for j in range(other.cols)]
        return RatMatrix(self.rows, other.cols,
                         [sum((a * b for a, b in zip(self.row(i), col)), Fraction(0))
                          for i in range(self.rows) for col in columns])

    def apply(self, vector):
        """Matrix-vector product as a tuple of Fractions."""
        vector = [to_rational(x) for x in vector]
        if len(vector) != self.cols:
            raise MatrixError('Vector of length {} does not fit a {}x{} matrix'.format(
                len(vector), self.rows, self.cols))
        return tuple(sum((a * b for a, b in zip(self.row(i), vector)), Fraction(0)) for i in range(self.rows))

    def vec(self):
        """Stack the columns."""
        return tuple(x for j in range(self.cols) for x in self.column(j))

    def to_numpy(self):
        return np.array([[float(x) for x in self.row(i)] for i in range(self.rows)], dtype=float).reshape(
            self.rows, self.cols)

    def to_strings(self):
        return [[format_rational(x) for x in self.row(i)] for i in range(self.rows)]


def _integer_rows(m):
    """Rows scaled to integers, plus the product of the scale factors."""
    rows = []
    scale = 1
    for i in range(m.rows):
        row = m.row(i)
        denominator = lcm(*(q.denominator for q in row)) if row else 1
        rows.append([q.numerator * (denominator // q.denominator) for q in row])
        scale *= denominator
    return rows, scale


def det(m):
    """Determinant by Bareiss fraction-free elimination."""
    if not m.is_square:
        raise MatrixError('Determinant of a non-square {}x{} matrix'.format(m.rows, m.cols))
    n = m.rows
    if n == 0:
        return Fraction(1)
    a, scale = _integer_rows(m)
    sign = 1
    previous = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            factor = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // previous
        previous = pivot
    return Fraction(sign * a[n - 1][n - 1], scale)


def rank(m):
    """Rank by fraction-free row echelon reduction."""
    a, _ = _integer_rows(m)
    r = 0
    previous = 1
    for c in range(m.cols):
        if r == m.rows:
            break
        pivot_row = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        pivot = a[r][c]
        row_r = a[r]
        for i in range(r + 1, m.rows):
            row_i = a[i]
            factor = row_i[c]
            for j in range(c + 1, m.cols):
                row_i[j] = (row_i[j] * pivot - factor * row_r[j]) // previous
            row_i[c] = 0
        previous = pivot
        r += 1
    return r


def solve(a, b):
    """The unique x with a x = b, by Gauss-Jordan elimination over the rationals.

    :raises SingularMatrixError: when det(a) = 0
    """
    if not a.is_square:
        raise MatrixError('Cannot solve with a non-square {}x{} matrix'.format(a.rows, a.cols))
    b = [to_rational(x) for x in b]
    if len(b) != a.rows:
        raise MatrixError('Right-hand side has {} entries, expected {}'.format(len(b), a.rows))
    n = a.rows
    augmented = [list(a.row(i)) + [b[i]] for i in range(n)]
    for c in range(n):
        pivot_row = next((r for r in range(c, n) if augmented[r][c] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError('Matrix is singular (no pivot in column {})'.format(c + 1))
        augmented[c], augmented[pivot_row] = augmented[pivot_row], augmented[c]
        pivot = augmented[c][c]
        row_c = [x / pivot for x in augmented[c]]
        augmented[c] = row_c
        for r in range(n):
            factor = augmented[r][c]
            if r != c and factor != 0:
                augmented[r] = [x - factor * y for x, y in zip(augmented[r], row_c)]
    return tuple(row[n] for row in augmented)


def is_positive_definite(m):
    """Sylvester's criterion: every leading principal minor is positive."""
    if not m.is_symmetric():
        raise MatrixError('Positive definiteness needs a symmetric matrix')
    return all(det(m.submatrix(range(k), range(k))) > 0 for k in range(1, m.rows + 1))


def kron(a, b):
    """Kronecker product, of size (a.rows*b.rows) x (a.cols*b.cols)."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    entries = []
    for i in range(rows):
        ai, bi = divmod(i, b.rows)
        for j in range(cols):
            aj, bj = divmod(j, b.cols)
            entries.append(a[ai, aj] * b[bi, bj])
    return RatMatrix(rows, cols, entries)


def select_independent_rows(m):
    """Indices of a maximal linearly independent set of rows, chosen greedily top to bottom."""
    basis = []
    chosen = []
    for index in range(m.rows):
        v = list(m.row(index))
        for col, b in basis:
            factor = v[col]
            if factor:
                v = [x - factor * y for x, y in zip(v, b)]
        lead = next((c for c, x in enumerate(v) if x), None)
        if lead is None:
            continue
        v = [x / v[lead] for x in v]
        # keep the basis reduced so every pivot column is zero in the other vectors
        reduced = []
        for col, b in basis:
            factor = b[lead]
            reduced.append((col, [x - factor * y for x, y in zip(b, v)] if factor else b))
        basis = reduced + [(lead, v)]
        chosen.append(index)
    return chosen


def parse_matrix(text):
    """Read a CSV matrix: one row per line, entries as integers, p/q or decimals."""
    rows = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        row = []
        for field in line.split(','):
            try:
                row.append(Fraction(field.strip()))
            except (ValueError, ZeroDivisionError):
                raise MatrixParseError('line {}: cannot read "{}" as a rational'.format(
                    number, field.strip())) from None
        if rows and len(row) != len(rows[0]):
            raise MatrixParseError('line {}: has {} entries, expected {}'.format(number, len(row), len(rows[0])))
        rows.append(row)
    if not rows:
        raise MatrixParseError('document has no matrix rows')
    return RatMatrix.from_rows(rows)


def read_matrix(file_path):
    with open(file_path, 'r') as file_stream:
        text = file_stream.read()
    try:
        return parse_matrix(text)
    except MatrixParseError as err:
        raise MatrixParseError('{}: {}'.format(file_path, err)) from None


def format_matrix(m):
    return ''.join(','.join(format_rational(x) for x in m.row(i)) + '\n' for i in range(m.rows))
