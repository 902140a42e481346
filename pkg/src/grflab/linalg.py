"""Exact linear algebra over the rationals (dense, list-of-lists)."""

from fractions import Fraction


def rref(mat):
    """Reduced row echelon form. Returns (rows, pivot_columns).

    The input is not modified. Rows are lists of Fractions.
    """
    rows = [[Fraction(x) for x in r] for r in mat]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        # pick any nonzero pivot in column c at or below row r
        pivot = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(mat):
    if not mat:
        return 0
    _, pivots = rref(mat)
    return len(pivots)


def kernel_basis(mat):
    """Basis of the right kernel of a matrix (rows = equations)."""
    if not mat:
        return []
    ncols = len(mat[0])
    rows, pivots = rref(mat)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return basis


def solve(mat, rhs):
    """One exact solution of mat @ x = rhs, or None if inconsistent."""
    if not mat:
        return [] if all(b == 0 for b in rhs) else None
    ncols = len(mat[0])
    aug = [list(r) + [b] for r, b in zip(mat, rhs)]
    rows, pivots = rref(aug)
    for r in rows:
        if all(x == 0 for x in r[:ncols]) and r[ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        if pc == ncols:
            return None
        x[pc] = rows[r][ncols]
    return x


def mat_inv(mat):
    """Inverse of a square Fraction matrix."""
    n = len(mat)
    aug = [list(r) + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i, r in enumerate(mat)]
    rows, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [r[n:] for r in rows]


def mat_mul(a, b):
    n, k = len(a), len(b)
    m = len(b[0]) if k else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = Fraction(0)
            for t in range(k):
                if a[i][t] != 0 and b[t][j] != 0:
                    s += a[i][t] * b[t][j]
            row.append(s)
        out.append(row)
    return out


def mat_vec(a, v):
    out = []
    for row in a:
        s = Fraction(0)
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                s += x * y
        out.append(s)
    return out
