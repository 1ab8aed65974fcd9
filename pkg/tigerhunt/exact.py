"""
Exact arithmetic used by every other module: rationals (``fractions.Fraction``), the
first-order ε-extension used when scaling hunt boundaries, and small dense linear algebra
over the rationals.
"""

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from tigerhunt.exceptions import NotSymmetric, SingularMatrix

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[int, Fraction, str]


def as_rational(value: RationalLike) -> Fraction:
    """
    Converts ints, fractions and ``"p/q"`` strings to a ``Fraction``. Floats are refused,
    nothing in this package is allowed to round.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise ValueError("{!r} is not an exact rational".format(value)) from None
    raise TypeError("cannot convert {!r} to a rational".format(value))


def format_rational(value) -> str:
    """``"p/q"`` in lowest terms, ``"p"`` for integers."""
    if isinstance(value, EpsRational):
        return str(value)
    return str(as_rational(value))


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class EpsRational:
    """
    ``std + eps·ε`` with ε a formal infinitesimal, ε² = 0. Ordering is lexicographic,
    so ``a < a + q·ε`` for every ``q > 0``.
    """

    std: Fraction = Fraction(0)
    eps: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "std", as_rational(self.std))
        object.__setattr__(self, "eps", as_rational(self.eps))

    @classmethod
    def lift(cls, value) -> "EpsRational":
        if isinstance(value, EpsRational):
            return value
        return cls(as_rational(value))

    @staticmethod
    def _coerce(value):
        if isinstance(value, EpsRational):
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return EpsRational(Fraction(value))
        return None

    @property
    def is_standard(self) -> bool:
        return self.eps == 0

    def inverse(self) -> "EpsRational":
        if self.std == 0:
            raise ZeroDivisionError("EpsRational with zero standard part has no inverse")
        return EpsRational(1 / self.std, -self.eps / (self.std * self.std))

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return EpsRational(self.std + other.std, self.eps + other.eps)

    __radd__ = __add__

    def __neg__(self):
        return EpsRational(-self.std, -self.eps)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return EpsRational(self.std - other.std, self.eps - other.eps)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return EpsRational(self.std * other.std, self.std * other.eps + self.eps * other.std)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.std == other.std and self.eps == other.eps

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self.std, self.eps) < (other.std, other.eps)

    def __hash__(self):
        if self.eps == 0:
            return hash(self.std)
        return hash((self.std, self.eps))

    def __bool__(self):
        return bool(self.std) or bool(self.eps)

    def __str__(self):
        if self.eps == 0:
            return str(self.std)
        sign = "-" if self.eps < 0 else "+"
        return "{}{}{}ε".format(self.std, sign, abs(self.eps))


ZERO = EpsRational()
EPSILON = EpsRational(0, 1)


@dataclass(frozen=True)
class RatMatrix:
    """Square matrix of rationals. Rows are tuples so the matrix is hashable."""

    rows: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_rational(x) for x in row) for row in self.rows)
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RationalLike]]) -> "RatMatrix":
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def is_symmetric(self) -> bool:
        return all(self.rows[i][j] == self.rows[j][i] for i in range(self.n) for j in range(i))

    def mul_vector(self, vector: Sequence) -> Tuple:
        if len(vector) != self.n:
            raise ValueError("dimension mismatch")
        return tuple(sum((a * x for a, x in zip(row, vector)), Fraction(0)) for row in self.rows)

    def submatrix(self, indices: Sequence[int]) -> "RatMatrix":
        return RatMatrix(tuple(tuple(self.rows[i][j] for j in indices) for i in indices))

    def _working_copy(self) -> List[List[Fraction]]:
        return [list(row) for row in self.rows]


def det(matrix: RatMatrix) -> Fraction:
    a = matrix._working_copy()
    n = matrix.n
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            result = -result
        result *= a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            if factor:
                for c in range(col, n):
                    a[r][c] -= factor * a[col][c]
    return result


def solve(matrix: RatMatrix, rhs: Sequence) -> Tuple:
    """
    Solves ``matrix · x = rhs`` exactly by Gauss-Jordan elimination. The right hand side may
    hold ``Fraction`` or ``EpsRational`` entries; the matrix itself is always standard.

    :raises: :class:`tigerhunt.exceptions.SingularMatrix` when the matrix is not invertible
    """
    n = matrix.n
    if len(rhs) != n:
        raise ValueError("dimension mismatch")
    a = matrix._working_copy()
    b = [x if isinstance(x, EpsRational) else as_rational(x) for x in rhs]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular (column {})".format(col))
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            b[col], b[pivot] = b[pivot], b[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] = b[col] * inv
        # entries outside the pivot row's support are unchanged
        support = [j for j, y in enumerate(a[col]) if y]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                row = a[r]
                for j in support:
                    row[j] = row[j] - factor * a[col][j]
                b[r] = b[r] - factor * b[col]
    return tuple(b)


def is_negative_definite(matrix: RatMatrix) -> bool:
    """
    True iff the leading principal minors alternate in sign starting negative. Computed with
    elimination pivots, which are the ratios of consecutive minors.

    :raises: :class:`tigerhunt.exceptions.NotSymmetric`
    """
    if not matrix.is_symmetric():
        raise NotSymmetric("intersection form must be symmetric")
    a = matrix._working_copy()
    n = matrix.n
    for k in range(n):
        pivot = a[k][k]
        if pivot >= 0:
            return False
        for r in range(k + 1, n):
            factor = a[r][k] / pivot
            if factor:
                for c in range(k, n):
                    a[r][c] -= factor * a[k][c]
    return True
