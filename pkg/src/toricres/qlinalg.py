"""Exact linear algebra: sparse matrices over Q and lattice algebra over Z.

QMatrix follows the row convention used everywhere in this package: vectors
are rows and act on the left, (v @ M)[j] = sum_i v[i] * M[i][j], so matrix
composition reads left to right along arrows.

Integer routines work on plain list-of-list matrices.  smith_normal_form
returns (D, L, R) with L @ A @ R = D, L and R unimodular and the diagonal
entries in divisibility order; solve_int and int_kernel_basis are built on
top of it.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .qpoly import Coeff, cnorm

Row = dict[int, Coeff]


class QMatrix:
    """Sparse exact matrix; rows are dicts column -> nonzero coefficient."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int,
                 rows: Sequence[Mapping[int, Coeff]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self.rows: list[Row] = [{} for _ in range(nrows)]
        else:
            if len(rows) != nrows:
                raise ValueError("row count mismatch")
            self.rows = [{j: cnorm(c) for j, c in r.items() if c} for r in rows]

    # -- construction --------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, [{i: 1} for i in range(n)])

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "QMatrix":
        return cls(nrows, ncols)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[Coeff]], ncols: int | None = None) -> "QMatrix":
        n = len(dense)
        m = ncols if ncols is not None else (len(dense[0]) if n else 0)
        return cls(n, m, [{j: c for j, c in enumerate(row) if c} for row in dense])

    def to_dense(self) -> list[list[Coeff]]:
        return [[r.get(j, 0) for j in range(self.ncols)] for r in self.rows]

    def copy(self) -> "QMatrix":
        return QMatrix(self.nrows, self.ncols, [dict(r) for r in self.rows])

    # -- queries --------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) \
            and self.rows == other.rows

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def get(self, i: int, j: int) -> Coeff:
        return self.rows[i].get(j, 0)

    def set(self, i: int, j: int, c: Coeff) -> None:
        c = cnorm(c)
        if c:
            self.rows[i][j] = c
        else:
            self.rows[i].pop(j, None)

    def __repr__(self) -> str:
        return f"QMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        out = self.copy()
        for i, r in enumerate(other.rows):
            tr = out.rows[i]
            for j, c in r.items():
                s = tr.get(j, 0) + c
                if s:
                    tr[j] = cnorm(s)
                else:
                    del tr[j]
        return out

    def __neg__(self) -> "QMatrix":
        return QMatrix(self.nrows, self.ncols,
                       [{j: -c for j, c in r.items()} for r in self.rows])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return self + (-other)

    def scale(self, c: Coeff) -> "QMatrix":
        if not c:
            return QMatrix.zero(self.nrows, self.ncols)
        return QMatrix(self.nrows, self.ncols,
                       [{j: cc * c for j, cc in r.items()} for r in self.rows])

    def matmul(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ "
                             f"{other.nrows}x{other.ncols}")
        out = QMatrix(self.nrows, other.ncols)
        for i, r in enumerate(self.rows):
            acc: Row = out.rows[i]
            for k, c in r.items():
                for j, d in other.rows[k].items():
                    s = acc.get(j, 0) + c * d
                    if s:
                        acc[j] = s
                    else:
                        del acc[j]
            for j in list(acc):
                acc[j] = cnorm(acc[j])
        return out

    def apply_row(self, v: Mapping[int, Coeff]) -> Row:
        """Row vector times matrix: returns w with w[j] = sum v[i]*M[i][j]."""
        out: Row = {}
        for i, c in v.items():
            if not c:
                continue
            for j, d in self.rows[i].items():
                s = out.get(j, 0) + c * d
                if s:
                    out[j] = s
                else:
                    del out[j]
        return {j: cnorm(c) for j, c in out.items()}

    def transpose(self) -> "QMatrix":
        out = QMatrix(self.ncols, self.nrows)
        for i, r in enumerate(self.rows):
            for j, c in r.items():
                out.rows[j][i] = c
        return out

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "QMatrix":
        cmap = {j: jj for jj, j in enumerate(col_idx)}
        rows: list[Row] = []
        for i in row_idx:
            rows.append({cmap[j]: c for j, c in self.rows[i].items() if j in cmap})
        return QMatrix(len(row_idx), len(col_idx), rows)

    # -- elimination ---------------------------------------------------------

    def rank(self) -> int:
        work = [dict(r) for r in self.rows if r]
        rank = 0
        while work:
            # sparsest row first keeps fill-in low
            work.sort(key=len)
            row = work.pop(0)
            if not row:
                continue
            rank += 1
            j = min(row)
            pj = Fraction(row[j])
            rest = []
            for r in work:
                if j in r:
                    f = Fraction(r[j]) / pj
                    for jj, c in row.items():
                        s = r.get(jj, 0) - f * c
                        if s:
                            r[jj] = s
                        else:
                            r.pop(jj, None)
                if r:
                    rest.append(r)
            work = rest
        return rank

    def inverse(self) -> "QMatrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        a = [[Fraction(self.get(i, j)) for j in range(n)] for i in range(n)]
        inv = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                raise ValueError("singular matrix")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                inv[col], inv[piv] = inv[piv], inv[col]
            p = a[col][col]
            a[col] = [x / p for x in a[col]]
            inv[col] = [x / p for x in inv[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
        return QMatrix.from_dense(inv, n)

    # -- serialization ---------------------------------------------------------

    def to_obj(self) -> dict:
        rows = {}
        for i, r in enumerate(self.rows):
            if r:
                rows[str(i)] = {str(j): _frac_str(c) for j, c in sorted(r.items())}
        return {"nrows": self.nrows, "ncols": self.ncols, "rows": rows}

    @classmethod
    def from_obj(cls, obj: dict) -> "QMatrix":
        m = cls(obj["nrows"], obj["ncols"])
        for i, r in obj["rows"].items():
            for j, s in r.items():
                m.rows[int(i)][int(j)] = cnorm(Fraction(s))
        return m


def _frac_str(c: Coeff) -> str:
    f = Fraction(c)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


# -- integer matrices ----------------------------------------------------------

IntMat = list[list[int]]


def int_matmul(a: IntMat, b: IntMat) -> IntMat:
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for kk in range(k):
            c = ai[kk]
            if c:
                bk = b[kk]
                for j in range(m):
                    oi[j] += c * bk[j]
    return out


def int_rank(a: IntMat) -> int:
    if not a or not a[0]:
        return 0
    rows = [[Fraction(x) for x in row] for row in a]
    m = len(rows[0])
    rank = 0
    col = 0
    while rank < len(rows) and col < m:
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                f = rows[r][col] / p
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def int_det(a: IntMat) -> int:
    """Fraction-free determinant of a square integer matrix."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        piv = next((r for r in range(k, n) if m[r][k]), None)
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(a: IntMat) -> tuple[IntMat, IntMat, IntMat]:
    """Smith form with transforms: returns (d, l, r) with l @ a @ r = d.

    l and r are unimodular; the diagonal of d is nonnegative with each entry
    dividing the next.
    """
    n = len(a)
    m = len(a[0]) if n else 0
    d = [row[:] for row in a]
    l = [[int(i == j) for j in range(n)] for i in range(n)]
    r = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        l[i], l[j] = l[j], l[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in r:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row dst += q * row src
        d[dst] = [x + q * y for x, y in zip(d[dst], d[src])]
        l[dst] = [x + q * y for x, y in zip(l[dst], l[src])]

    def add_col(src, dst, q):
        for row in d:
            row[dst] += q * row[src]
        for row in r:
            row[dst] += q * row[src]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        l[i] = [-x for x in l[i]]

    k = 0
    while k < n and k < m:
        # locate a pivot: smallest nonzero absolute value in the remaining block
        piv = None
        for i in range(k, n):
            for j in range(k, m):
                if d[i][j] and (piv is None or abs(d[i][j]) < abs(d[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(k, piv[0])
        swap_cols(k, piv[1])
        while True:
            if d[k][k] < 0:
                negate_row(k)
            p = d[k][k]
            dirty = False
            for i in range(k + 1, n):
                if d[i][k]:
                    q = -(d[i][k] // p)
                    add_row(k, i, q)
                    if d[i][k]:
                        swap_rows(k, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(k + 1, m):
                if d[k][j]:
                    q = -(d[k][j] // p)
                    add_col(k, j, q)
                    if d[k][j]:
                        swap_cols(k, j)
                        dirty = True
                        break
            if not dirty:
                break
        k += 1

    # enforce divisibility d_i | d_{i+1}
    rank = sum(1 for i in range(min(n, m)) if d[i][i])
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            if d[i + 1][i + 1] % d[i][i]:
                # fold entry i+1 into row i and re-clean the 2x2 block
                add_col(i + 1, i, 1)
                g, x, y = _xgcd(d[i][i], d[i + 1][i])
                # row ops bringing gcd to position (i, i)
                a_, b_ = d[i][i] // g, d[i + 1][i] // g
                ri, rj = l[i][:], l[i + 1][:]
                di, dj = d[i][:], d[i + 1][:]
                l[i] = [x * u + y * v for u, v in zip(ri, rj)]
                d[i] = [x * u + y * v for u, v in zip(di, dj)]
                l[i + 1] = [-b_ * u + a_ * v for u, v in zip(ri, rj)]
                d[i + 1] = [-b_ * u + a_ * v for u, v in zip(di, dj)]
                # clear the remaining off-diagonal entries of the block
                q = -(d[i][i + 1] // d[i][i])
                add_col(i, i + 1, q)
                if d[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    return d, l, r


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, rr = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while rr:
        q = old_r // rr
        old_r, rr = rr, old_r - q * rr
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def solve_int(a: IntMat, b: Sequence[int]) -> list[int] | None:
    """One integer solution x of a @ x = b, or None."""
    n = len(a)
    m = len(a[0]) if n else 0
    if n == 0:
        return [0] * m
    d, l, r = smith_normal_form(a)
    lb = [sum(l[i][j] * b[j] for j in range(n)) for i in range(n)]
    y = [0] * m
    for i in range(n):
        di = d[i][i] if i < min(n, m) else 0
        if di:
            if lb[i] % di:
                return None
            y[i] = lb[i] // di
        elif lb[i]:
            return None
    return [sum(r[i][j] * y[j] for j in range(m)) for i in range(m)]


def int_kernel_basis(a: IntMat) -> list[list[int]]:
    """Basis of the saturated kernel {x in Z^m : a @ x = 0}, as columns."""
    n = len(a)
    m = len(a[0]) if n else 0
    if n == 0 or m == 0:
        return [[int(i == j) for i in range(m)] for j in range(m)]
    d, _, r = smith_normal_form(a)
    rank = sum(1 for i in range(min(n, m)) if d[i][i])
    return [[r[i][j] for i in range(m)] for j in range(rank, m)]


def is_unimodular(a: IntMat) -> bool:
    return len(a) > 0 and len(a) == len(a[0]) and int_det(a) in (1, -1)
