from collections.abc import Iterable
from collections.abc import Sequence
import dataclasses
from fractions import Fraction
import math


Vector = tuple[Fraction, ...]
r"""Exact rational vector of fixed length."""

Matrix = tuple[Vector, ...]
r"""Exact rational matrix stored as a tuple of equally long rows."""


def to_fraction(value: int | str | float | Fraction) -> Fraction:
    r"""Convert value to an exact rational.

    Strings may take the form ``"p/q"`` or ``"p"``.
    Floats are converted from their shortest decimal representation,
    so ``0.2`` becomes ``1/5``.

    Args:
        value: number or string

    Returns:
        rational number in lowest terms

    Raises:
        ValueError: if ``value`` cannot be interpreted as a rational number

    Examples:
        >>> to_fraction("3/6")
        Fraction(1, 2)
        >>> to_fraction(0.2)
        Fraction(1, 5)

    """
    if isinstance(value, bool):
        raise ValueError(f"Cannot convert '{value}' to a rational number.")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"Cannot convert '{value}' to a rational number.")
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"Cannot convert '{value}' to a rational number.")


def format_fraction(value: Fraction | int) -> str:
    r"""Serialize rational as ``"p/q"`` or ``"p"``.

    Examples:
        >>> format_fraction(Fraction(4, 6))
        '2/3'
        >>> format_fraction(Fraction(4, 2))
        '2'

    """
    return str(Fraction(value))


def vector(values: Iterable) -> Vector:
    r"""Create rational vector."""
    return tuple(to_fraction(v) for v in values)


def matrix(
    rows: Iterable[Iterable],
    *,
    num_cols: int | None = None,
) -> Matrix:
    r"""Create rectangular rational matrix.

    Args:
        rows: matrix rows
        num_cols: expected number of columns.
            Required to describe a matrix without rows

    Returns:
        matrix

    Raises:
        ValueError: if rows differ in length
            or do not match ``num_cols``

    """
    result = tuple(vector(row) for row in rows)
    lengths = {len(row) for row in result}
    if num_cols is not None:
        lengths.add(num_cols)
    if len(lengths) > 1:
        raise ValueError(
            f"All rows of a matrix need the same length, found {sorted(lengths)}."
        )
    return result


def num_columns(
    mat: Matrix,
    default: int = 0,
) -> int:
    r"""Number of columns, ``default`` for a matrix without rows."""
    return len(mat[0]) if mat else default


def zeros(length: int) -> Vector:
    r"""Zero vector."""
    return (Fraction(0),) * length


def unit(length: int, index: int) -> Vector:
    r"""Standard basis vector."""
    return tuple(Fraction(int(i == index)) for i in range(length))


def dot(u: Sequence, v: Sequence) -> Fraction:
    r"""Exact dot product.

    Raises:
        ValueError: if vectors differ in length

    """
    if len(u) != len(v):
        raise ValueError(f"Cannot multiply vectors of length {len(u)} and {len(v)}.")
    return sum((Fraction(a) * b for a, b in zip(u, v) if a and b), Fraction(0))


def add(u: Sequence, v: Sequence) -> Vector:
    r"""Entrywise sum."""
    return tuple(Fraction(a) + b for a, b in zip(u, v, strict=True))


def subtract(u: Sequence, v: Sequence) -> Vector:
    r"""Entrywise difference."""
    return tuple(Fraction(a) - b for a, b in zip(u, v, strict=True))


def scale(factor: Fraction | int, u: Sequence) -> Vector:
    r"""Multiply vector by scalar."""
    return tuple(Fraction(factor) * a for a in u)


def negate(u: Sequence) -> Vector:
    r"""Entrywise negation."""
    return tuple(-Fraction(a) for a in u)


def _integer_rows(mat: Sequence[Sequence]) -> list[list[int]]:
    r"""Scale every row by the lcm of its denominators."""
    rows = []
    for row in mat:
        row = [Fraction(a) for a in row]
        denominator = math.lcm(*(a.denominator for a in row)) if row else 1
        rows.append([int(a * denominator) for a in row])
    return rows


def rank(mat: Sequence[Sequence]) -> int:
    r"""Exact rank over the rationals.

    Rows are scaled to integers
    and reduced by fraction-free (Bareiss) elimination,
    so every intermediate value stays an integer.

    Args:
        mat: rectangular matrix

    Returns:
        rank

    Examples:
        >>> rank([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        3
        >>> rank([[1, 2], [2, 4]])
        1

    """
    rows = _integer_rows(mat)
    if not rows or not rows[0]:
        return 0
    num_rows, num_cols = len(rows), len(rows[0])
    r = 0
    previous_pivot = 1
    for col in range(num_cols):
        pivot_row = next((i for i in range(r, num_rows) if rows[i][col]), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pivot = rows[r][col]
        for i in range(r + 1, num_rows):
            factor = rows[i][col]
            rows[i] = [
                (pivot * rows[i][j] - factor * rows[r][j]) // previous_pivot
                for j in range(num_cols)
            ]
        previous_pivot = pivot
        r += 1
        if r == num_rows:
            break
    return r


def _reduced_row_echelon(
    mat: Sequence[Sequence],
    num_cols: int,
) -> tuple[list[list[Fraction]], list[int]]:
    r"""Gauss-Jordan elimination, returns rows and pivot columns."""
    rows = [[Fraction(a) for a in row] for row in mat]
    pivots = []
    r = 0
    for col in range(num_cols):
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pivot = rows[r][col]
        rows[r] = [a / pivot for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def _nullspace_from_echelon(
    rows: list[list[Fraction]],
    pivots: list[int],
    num_cols: int,
) -> list[Vector]:
    basis = []
    for free in (j for j in range(num_cols) if j not in pivots):
        x = [Fraction(0)] * num_cols
        x[free] = Fraction(1)
        for row, col in zip(rows, pivots):
            x[col] = -row[free]
        basis.append(tuple(x))
    return basis


@dataclasses.dataclass(frozen=True)
class Solution:
    r"""Unique solution of a linear system."""

    x: Vector


@dataclasses.dataclass(frozen=True)
class Inconsistent:
    r"""Linear system without solution."""


@dataclasses.dataclass(frozen=True)
class Underdetermined:
    r"""Linear system with infinitely many solutions.

    Every solution is ``particular`` plus a combination of ``nullspace``.

    """

    particular: Vector
    nullspace: tuple[Vector, ...]


def solve_linear(
    mat: Sequence[Sequence],
    rhs: Sequence,
    *,
    num_cols: int | None = None,
) -> Solution | Inconsistent | Underdetermined:
    r"""Solve linear system exactly.

    Args:
        mat: coefficient matrix
        rhs: right-hand side, one entry per row of ``mat``
        num_cols: number of unknowns,
            required if ``mat`` has no rows

    Returns:
        :class:`Solution`, :class:`Inconsistent`, or :class:`Underdetermined`

    Raises:
        ValueError: if ``rhs`` does not match the number of rows

    Examples:
        >>> solve_linear([[1, 0], [0, 1]], [1, 2])
        Solution(x=(Fraction(1, 1), Fraction(2, 1)))
        >>> solve_linear([[1, 0], [1, 0]], [0, 1])
        Inconsistent()

    """
    if len(mat) != len(rhs):
        raise ValueError(
            f"Matrix has {len(mat)} rows, but right-hand side has {len(rhs)} entries."
        )
    num_cols = num_columns(matrix(mat, num_cols=num_cols), num_cols or 0)
    augmented = [list(row) + [rhs_i] for row, rhs_i in zip(mat, rhs)]
    rows, pivots = _reduced_row_echelon(augmented, num_cols)
    for row in rows[len(pivots) :]:
        if row[num_cols]:
            return Inconsistent()
    particular = [Fraction(0)] * num_cols
    for row, col in zip(rows, pivots):
        particular[col] = row[num_cols]
    nullspace = _nullspace_from_echelon(
        [row[:num_cols] for row in rows], pivots, num_cols
    )
    if nullspace:
        return Underdetermined(tuple(particular), tuple(nullspace))
    return Solution(tuple(particular))


def orthogonal_complement(
    vectors: Sequence[Sequence],
    ambient_dim: int,
) -> list[Vector]:
    r"""Basis of the orthogonal complement of a span.

    Args:
        vectors: spanning vectors of length ``ambient_dim``
        ambient_dim: dimension of the ambient space

    Returns:
        ``ambient_dim - rank(vectors)`` independent vectors
        orthogonal to every input vector

    Raises:
        ValueError: if a vector has the wrong length

    Examples:
        >>> orthogonal_complement([[1, 0]], 2)
        [(Fraction(0, 1), Fraction(1, 1))]

    """
    for v in vectors:
        if len(v) != ambient_dim:
            raise ValueError(
                f"Expected vectors of length {ambient_dim}, got length {len(v)}."
            )
    if not vectors:
        return [unit(ambient_dim, i) for i in range(ambient_dim)]
    rows, pivots = _reduced_row_echelon(vectors, ambient_dim)
    return _nullspace_from_echelon(rows, pivots, ambient_dim)
