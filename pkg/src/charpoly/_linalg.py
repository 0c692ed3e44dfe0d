"""Small exact linear algebra over a coefficient field (dense, list-based).

Matrices are lists of rows; rows are lists of field elements.  Everything is
done by fraction-free-enough Gaussian elimination with exact arithmetic, so
results are never approximate.
"""

from __future__ import annotations


def rref(field, matrix):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = [list(r) for r in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(rank, len(rows)):
            if not field.is_zero(rows[i][col]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        inv = field.inv(rows[rank][col])
        rows[rank] = [field.mul(inv, x) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and not field.is_zero(rows[i][col]):
                factor = rows[i][col]
                rows[i] = [field.sub(x, field.mul(factor, y))
                           for x, y in zip(rows[i], rows[rank])]
        pivots.append(col)
        rank += 1
    return rows[:rank], pivots


def rank(field, matrix) -> int:
    return len(rref(field, matrix)[0])


def solve(field, matrix, rhs):
    """One solution of matrix @ x = rhs (free variables set to 0), or None."""
    if not matrix:
        return None if any(not field.is_zero(b) for b in rhs) else []
    ncols = len(matrix[0])
    augmented = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = rref(field, augmented)
    x = [field.zero] * ncols
    for row, col in zip(rows, pivots):
        if col == ncols:
            return None  # pivot in the constants column: inconsistent
        x[col] = row[-1]
    return x


def nullspace_basis(field, matrix):
    """Basis of {x : matrix @ x = 0} via the standard free-variable recipe."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows, pivots = rref(field, matrix)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [field.zero] * ncols
        vec[free] = field.one
        for row, col in zip(rows, pivots):
            vec[col] = field.neg(row[free])
        basis.append(vec)
    return basis


def in_row_span(field, matrix, vector) -> bool:
    """Whether vector lies in the row span of matrix."""
    rows = [list(r) for r in matrix if any(not field.is_zero(x) for x in r)]
    base_rank = rank(field, rows)
    return rank(field, rows + [list(vector)]) == base_rank


def row_span_coefficients(field, matrix, vector):
    """Coefficients c with sum c_i * matrix[i] = vector, or None."""
    if not matrix:
        return None if any(not field.is_zero(v) for v in vector) else []
    # transpose and solve
    ncols = len(matrix[0])
    transposed = [[matrix[i][j] for i in range(len(matrix))] for j in range(ncols)]
    return solve(field, transposed, list(vector))
