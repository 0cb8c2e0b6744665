"""Exact linear algebra over a ground field.

Thin wrapper around sympy's DomainMatrix restricted to field coefficients;
kernels, inverses and the symmetric congruence diagonalization used by the
quadric-cone normalization.
"""

from __future__ import annotations

from sympy.polys.matrices import DomainMatrix

from .errors import InputError
from .fields import GroundField


class ExactMatrix:
    """Rectangular matrix with entries in a GroundField."""

    __slots__ = ('field', 'dm')

    def __init__(self, field: GroundField, dm: DomainMatrix):
        self.field = field
        self.dm = dm

    @classmethod
    def from_rows(cls, field: GroundField, rows) -> 'ExactMatrix':
        conv = [[field.convert(e) for e in row] for row in rows]
        shape = (len(conv), len(conv[0]) if conv else 0)
        for row in conv:
            if len(row) != shape[1]:
                raise InputError('ragged matrix rows')
        return cls(field, DomainMatrix(conv, shape, field.domain))

    @classmethod
    def identity(cls, field: GroundField, n: int) -> 'ExactMatrix':
        return cls(field, DomainMatrix.eye(n, field.domain))

    @classmethod
    def zeros(cls, field: GroundField, rows: int, cols: int) -> 'ExactMatrix':
        return cls(field, DomainMatrix.zeros((rows, cols), field.domain))

    # -- structure ----------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.dm.shape[0]

    @property
    def cols(self) -> int:
        return self.dm.shape[1]

    def entry(self, i: int, j: int):
        return self.dm[i, j].element

    def to_lists(self):
        return self.dm.to_list()

    def row(self, i: int):
        return self.to_lists()[i]

    def column(self, j: int):
        return [self.dm[i, j].element for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, ExactMatrix) and self.field == other.field
                and self.dm == other.dm)

    def __repr__(self):
        body = '; '.join(
            ', '.join(self.field.element_text(e) for e in row)
            for row in self.to_lists())
        return 'ExactMatrix[%s]' % body

    # -- algebra --------------------------------------------------------------

    def transpose(self) -> 'ExactMatrix':
        return ExactMatrix(self.field, self.dm.transpose())

    def __matmul__(self, other: 'ExactMatrix') -> 'ExactMatrix':
        if self.field != other.field:
            raise InputError('matrix field mismatch')
        return ExactMatrix(self.field, self.dm * other.dm)

    def __add__(self, other: 'ExactMatrix') -> 'ExactMatrix':
        return ExactMatrix(self.field, self.dm + other.dm)

    def __sub__(self, other: 'ExactMatrix') -> 'ExactMatrix':
        return ExactMatrix(self.field, self.dm - other.dm)

    def hstack(self, other: 'ExactMatrix') -> 'ExactMatrix':
        return ExactMatrix(self.field, self.dm.hstack(other.dm))

    def vstack(self, other: 'ExactMatrix') -> 'ExactMatrix':
        return ExactMatrix(self.field, self.dm.vstack(other.dm))

    def is_zero_matrix(self) -> bool:
        return self.dm.is_zero_matrix

    def rank(self) -> int:
        return self.dm.rank()

    def rref(self):
        """Reduced row echelon form and pivot columns."""
        r, pivots = self.dm.rref()
        return ExactMatrix(self.field, r), tuple(pivots)

    def inv(self) -> 'ExactMatrix':
        if self.rows != self.cols:
            raise InputError('inverse of a non-square matrix')
        return ExactMatrix(self.field, self.dm.inv())

    def det(self):
        return self.dm.det()

    def kernel_basis(self) -> 'ExactMatrix':
        """Columns form a basis of {v : M v = 0}, built from the reduced row
        echelon form with pivots at the first nonzero entries; the matrix is
        cols x 0 when the kernel is trivial."""
        red, pivots = self.rref()
        n = self.cols
        free = [j for j in range(n) if j not in pivots]
        dom = self.field.domain
        cols = []
        for f in free:
            v = [dom.zero] * n
            v[f] = dom.one
            for i, p in enumerate(pivots):
                v[p] = -red.entry(i, f)
            cols.append(v)
        if not cols:
            return ExactMatrix(self.field,
                               DomainMatrix.zeros((n, 0), dom))
        dm = DomainMatrix([[cols[k][i] for k in range(len(cols))]
                           for i in range(n)], (n, len(cols)), dom)
        return ExactMatrix(self.field, dm)


def kernel_basis(m: ExactMatrix) -> ExactMatrix:
    return m.kernel_basis()


def row_space_echelon(field: GroundField, rows) -> list:
    """Reduced echelon basis of the row space (zero rows dropped)."""
    if not rows:
        return []
    m = ExactMatrix.from_rows(field, rows)
    red, pivots = m.rref()
    return [red.row(i) for i in range(len(pivots))]


def congruent_diagonalize(a: ExactMatrix):
    """For symmetric A return (S, D) with S invertible, S^T A S = D diagonal,
    rank preserved.  Entries stay in the ground field (no square roots are
    taken here)."""
    field = a.field
    n = a.rows
    if a.cols != n:
        raise InputError('congruent diagonalization needs a square matrix')
    rows = [row[:] for row in a.to_lists()]
    dom = field.domain
    for i in range(n):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise InputError('congruent diagonalization needs a '
                                 'symmetric matrix')
    s = [[dom.one if i == j else dom.zero for j in range(n)]
         for i in range(n)]

    def col_op(dst, src, factor):
        # col_dst += factor * col_src, applied to both the working matrix
        # (with the mirrored row op) and the accumulated S
        for i in range(n):
            rows[i][dst] = rows[i][dst] + factor * rows[i][src]
        for j in range(n):
            rows[dst][j] = rows[dst][j] + factor * rows[src][j]
        for i in range(n):
            s[i][dst] = s[i][dst] + factor * s[i][src]

    def col_swap(i, j):
        for r in rows:
            r[i], r[j] = r[j], r[i]
        rows[i], rows[j] = rows[j], rows[i]
        for r in s:
            r[i], r[j] = r[j], r[i]

    for k in range(n):
        if rows[k][k] == dom.zero:
            swap = next((j for j in range(k + 1, n)
                         if rows[j][j] != dom.zero), None)
            if swap is not None:
                col_swap(k, swap)
            else:
                off = next((j for j in range(k + 1, n)
                            if rows[k][j] != dom.zero), None)
                if off is None:
                    continue
                col_op(k, off, dom.one)
        pivot = rows[k][k]
        for j in range(k + 1, n):
            if rows[k][j] != dom.zero:
                col_op(j, k, -field.div(rows[k][j], pivot))
    smat = ExactMatrix.from_rows(field, s)
    dmat = ExactMatrix.from_rows(field, rows)
    return smat, dmat
