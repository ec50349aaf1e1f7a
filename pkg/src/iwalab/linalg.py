"""Exact linear algebra over the residue rings Z/p^N.

Matrices are plain lists of rows of ints, always reduced into [0, p^N).
The central tool is a Smith normal form adapted to the local ring
Z/p^N: pivots are chosen by minimal p-adic valuation and normalised to
exact powers of p, so the diagonal comes out as p^{d_0} | p^{d_1} | ...
with every d_i in [0, N].  An exponent d_i = N marks a direction that
is zero at working precision.

Row transforms U (with tracked inverse) and column transforms V are
accumulated, which is enough to answer the questions the module layer
asks: membership of a vector in a column span, preimages, kernels and
cokernel coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotAUnit

Matrix = list[list[int]]
Vector = list[int]


def mat_identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_zero(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def mat_copy(a: Matrix) -> Matrix:
    return [row[:] for row in a]


def mat_mul(a: Matrix, b: Matrix, q: int) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    bt = [[b[i][j] for i in range(inner)] for j in range(cols)]
    out = []
    for i in range(rows):
        ai = a[i]
        out.append([sum(x * y for x, y in zip(ai, bj)) % q for bj in bt])
    return out


def mat_add(a: Matrix, b: Matrix, q: int) -> Matrix:
    return [[(x + y) % q for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix, q: int) -> Matrix:
    return [[(x - y) % q for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c: int, a: Matrix, q: int) -> Matrix:
    return [[(c * x) % q for x in row] for row in a]


def mat_vec(a: Matrix, v: Vector, q: int) -> Vector:
    return [sum(x * y for x, y in zip(row, v)) % q for row in a]


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return a == b


def mat_transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def mat_from_columns(cols: list[Vector], n_rows: int) -> Matrix:
    """Assemble a matrix from column vectors; empty list gives m x 0."""
    return [[col[i] for col in cols] for i in range(n_rows)]


def mat_columns(a: Matrix) -> list[Vector]:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def mat_hstack(a: Matrix, b: Matrix) -> Matrix:
    return [ra + rb for ra, rb in zip(a, b)]


def poly_of_matrix(coeffs: list[int], a: Matrix, q: int) -> Matrix:
    """Evaluate sum_i coeffs[i] * a^i by Horner's rule mod q."""
    n = len(a)
    out = mat_zero(n, n)
    for c in reversed(coeffs):
        out = mat_mul(out, a, q)
        for i in range(n):
            out[i][i] = (out[i][i] + c) % q
    return out


def _val(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


@dataclass
class SmithResult:
    """Diagonalisation U*A*V = diag(p^{d_i}) over Z/p^N.

    U and its tracked inverse are square of size n_rows, V square of
    size n_cols, diag_exps has length min(n_rows, n_cols) and is
    non-decreasing.  padded_exps extends it with N to length n_rows,
    which is the shape the cokernel (Z/p^N)^rows / col-span needs.
    """

    p: int
    precision_exp: int
    n_rows: int
    n_cols: int
    U: Matrix
    Uinv: Matrix
    V: Matrix
    diag_exps: list[int]

    @property
    def modulus(self) -> int:
        return self.p ** self.precision_exp

    def padded_exps(self) -> list[int]:
        pad = self.n_rows - len(self.diag_exps)
        return self.diag_exps + [self.precision_exp] * max(0, pad)

    def in_column_span(self, y: Vector) -> bool:
        uy = mat_vec(self.U, y, self.modulus)
        for val, coord in zip(self.padded_exps(), uy):
            if coord % (self.p ** val) != 0:
                return False
        return True

    def solve_column_span(self, y: Vector) -> Vector | None:
        """Some x with A x = y, or None when y is outside the span."""
        q = self.modulus
        uy = mat_vec(self.U, y, q)
        exps = self.padded_exps()
        z = [0] * self.n_cols
        for i, coord in enumerate(uy):
            d = exps[i]
            if coord % (self.p ** d) != 0:
                return None
            if i < self.n_cols:
                z[i] = coord // (self.p ** d) if d < self.precision_exp else 0
        return mat_vec(self.V, z, q)

    def kernel_columns(self) -> list[Vector]:
        """Generators of {x : A x = 0} as columns, spanning the kernel."""
        q = self.modulus
        vcols = mat_columns(self.V)
        out = []
        for i, d in enumerate(self.diag_exps):
            if d == 0:
                continue
            scale = self.p ** (self.precision_exp - d)
            out.append([(scale * c) % q for c in vcols[i]])
        for i in range(len(self.diag_exps), self.n_cols):
            out.append(vcols[i])
        return out


def smith_normal_form(a: Matrix, p: int, precision_exp: int) -> SmithResult:
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    q = p ** precision_exp
    m = [[x % q for x in row] for row in a]
    u = mat_identity(n_rows)
    uinv = mat_identity(n_rows)
    v = mat_identity(n_cols)
    r = min(n_rows, n_cols)
    exps: list[int] = []

    for k in range(r):
        # locate an entry of minimal valuation in the trailing block
        best_v, bi, bj = precision_exp, -1, -1
        for i in range(k, n_rows):
            row = m[i]
            for j in range(k, n_cols):
                x = row[j]
                if x == 0:
                    continue
                val = _val(x, p, precision_exp)
                if val < best_v:
                    best_v, bi, bj = val, i, j
                    if val == 0:
                        break
            if best_v == 0:
                break
        if bi < 0 or best_v >= precision_exp:
            exps.extend([precision_exp] * (r - k))
            break

        if bi != k:
            m[k], m[bi] = m[bi], m[k]
            u[k], u[bi] = u[bi], u[k]
            for row in uinv:
                row[k], row[bi] = row[bi], row[k]
        if bj != k:
            for row in m:
                row[k], row[bj] = row[bj], row[k]
            for row in v:
                row[k], row[bj] = row[bj], row[k]

        pivot = m[k][k]
        pk = p ** best_v
        unit = pivot // pk
        w = pow(unit, -1, q)
        m[k] = [(w * x) % q for x in m[k]]
        u[k] = [(w * x) % q for x in u[k]]
        for row in uinv:
            row[k] = (row[k] * unit) % q

        for i in range(k + 1, n_rows):
            x = m[i][k]
            if x == 0:
                continue
            c = x // pk
            mk, mi = m[k], m[i]
            m[i] = [(y - c * z) % q for y, z in zip(mi, mk)]
            uk, ui = u[k], u[i]
            u[i] = [(y - c * z) % q for y, z in zip(ui, uk)]
            for row in uinv:
                row[k] = (row[k] + c * row[i]) % q

        for j in range(k + 1, n_cols):
            x = m[k][j]
            if x == 0:
                continue
            c = x // pk
            for row in m:
                row[j] = (row[j] - c * row[k]) % q
            for row in v:
                row[j] = (row[j] - c * row[k]) % q

        exps.append(best_v)

    return SmithResult(p, precision_exp, n_rows, n_cols, u, uinv, v, exps)


def smith_of_diagonal(values: list[int], p: int, precision_exp: int) -> SmithResult:
    """Fast path for a square diagonal matrix: only sort by valuation."""
    n = len(values)
    vals = [_val(x % (p ** precision_exp), p, precision_exp) for x in values]
    order = sorted(range(n), key=lambda i: vals[i])
    u = mat_zero(n, n)
    uinv = mat_zero(n, n)
    v = mat_zero(n, n)
    q = p ** precision_exp
    for new, old in enumerate(order):
        x = values[old] % q
        d = vals[old]
        if 0 < x and d < precision_exp:
            unit = x // (p ** d)
            u[new][old] = pow(unit, -1, q)
            uinv[old][new] = unit
        else:
            u[new][old] = 1
            uinv[old][new] = 1
        v[old][new] = 1
    return SmithResult(p, precision_exp, n, n, u, uinv, v, [vals[i] for i in order])


def assemble_block_smith(
    results: list[SmithResult], p: int, precision_exp: int
) -> SmithResult:
    """Merge Smith results of square diagonal blocks into one global result.

    The block-diagonal transforms are permuted so the global diagonal
    exponents come out ascending again.
    """
    for r in results:
        if r.n_rows != r.n_cols:
            raise ValueError("block smith assembly requires square blocks")
    size = sum(r.n_rows for r in results)
    exps: list[int] = []
    offsets = []
    pos = 0
    for r in results:
        offsets.append(pos)
        exps.extend(r.diag_exps)
        pos += r.n_rows
    order = sorted(range(size), key=lambda i: exps[i])

    def locate(i: int) -> tuple[int, int]:
        for b in range(len(results) - 1, -1, -1):
            if i >= offsets[b]:
                return b, i - offsets[b]
        raise IndexError(i)

    u = mat_zero(size, size)
    uinv = mat_zero(size, size)
    v = mat_zero(size, size)
    for new, old in enumerate(order):
        b, loc = locate(old)
        off = offsets[b]
        block = results[b]
        for j in range(block.n_rows):
            u[new][off + j] = block.U[loc][j]
            uinv[off + j][new] = block.Uinv[j][loc]
            v[off + j][new] = block.V[j][loc]
    return SmithResult(
        p, precision_exp, size, size, u, uinv, v, [exps[i] for i in order]
    )


def mat_inverse_unit(a: Matrix, p: int, precision_exp: int) -> Matrix:
    """Inverse of a square matrix invertible mod p^N; NotAUnit otherwise."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise NotAUnit("matrix is not square")
    smith = smith_normal_form(a, p, precision_exp)
    if any(d != 0 for d in smith.diag_exps):
        raise NotAUnit("matrix is not invertible at working precision")
    return mat_mul(smith.V, smith.U, p ** precision_exp)


def preimage_columns(a: Matrix, rel: Matrix, p: int, precision_exp: int) -> list[Vector]:
    """Columns spanning {x : A x lies in the column span of rel}.

    Solved as the x-part of the kernel of the block matrix [A | rel];
    rel may have zero columns, in which case this is the plain kernel.
    """
    n_cols = len(a[0]) if a else 0
    stacked = mat_hstack(a, rel) if rel and rel[0] else a
    smith = smith_normal_form(stacked, p, precision_exp)
    cols = []
    for col in smith.kernel_columns():
        x = col[:n_cols]
        if any(x):
            cols.append(x)
    return cols
