"""Exact sparse linear algebra over the rationals.

Everything downstream (homology ranks, spectral subquotients, snake-lemma
maps) reduces to the three primitives here: rank, kernel and subspace
arithmetic.  All arithmetic is done with ``fractions.Fraction``; there is
no floating point anywhere and identical inputs give identical outputs.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

Q = Fraction

def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Matrix:
    """Immutable sparse matrix over Q.

    Only nonzero entries are stored, keyed by ``(row, col)``.  Instances
    are never mutated after construction and are safe to share.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        clean = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ValueError(
                        f"entry ({i},{j}) out of bounds for {rows}x{cols} matrix")
                v = _q(v)
                if v:
                    clean[(i, j)] = v
        object.__setattr__(self, "entries", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def from_rows(cls, data) -> "Matrix":
        """Build from a dense list of rows; entries may be int, str or Fraction."""
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                v = _q(v)
                if v:
                    entries[(i, j)] = v
        return cls(rows, cols, entries)

    @classmethod
    def from_column(cls, data) -> "Matrix":
        return cls.from_rows([[v] for v in data])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {(i, i): Q(1) for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    @classmethod
    def hstack(cls, *mats: "Matrix") -> "Matrix":
        if not mats:
            raise ValueError("hstack of nothing")
        rows = mats[0].rows
        entries = {}
        off = 0
        for m in mats:
            if m.rows != rows:
                raise ValueError("hstack row mismatch")
            for (i, j), v in m.entries.items():
                entries[(i, j + off)] = v
            off += m.cols
        return cls(rows, off, entries)

    @classmethod
    def vstack(cls, *mats: "Matrix") -> "Matrix":
        if not mats:
            raise ValueError("vstack of nothing")
        cols = mats[0].cols
        entries = {}
        off = 0
        for m in mats:
            if m.cols != cols:
                raise ValueError("vstack column mismatch")
            for (i, j), v in m.entries.items():
                entries[(i + off, j)] = v
            off += m.rows
        return cls(off, cols, entries)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, key) -> Fraction:
        return self.entries.get(key, Q(0))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.shape == other.shape
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"

    def is_zero(self) -> bool:
        return not self.entries

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      {(j, i): v for (i, j), v in self.entries.items()})

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols,
                      {k: -v for k, v in self.entries.items()})

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in matrix sum")
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc.get(k, Q(0)) + v
        return Matrix(self.rows, self.cols, acc)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError(
                    f"shape mismatch in product: {self.shape} * {other.shape}")
            by_row: dict[int, list] = {}
            for (k, j), v in other.entries.items():
                by_row.setdefault(k, []).append((j, v))
            acc: dict[tuple, Fraction] = {}
            for (i, k), a in self.entries.items():
                for j, b in by_row.get(k, ()):
                    acc[(i, j)] = acc.get((i, j), Q(0)) + a * b
            return Matrix(self.rows, other.cols, acc)
        return NotImplemented

    def __rmul__(self, scalar) -> "Matrix":
        s = _q(scalar)
        return Matrix(self.rows, self.cols,
                      {k: s * v for k, v in self.entries.items()})

    def column(self, j: int) -> list:
        out = [Q(0)] * self.rows
        for (i, jj), v in self.entries.items():
            if jj == j:
                out[i] = v
        return out

    def to_rows(self) -> list:
        out = [[Q(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out


def _integer_rows(m: Matrix) -> list:
    """Dense integer rows of m after clearing denominators row by row.

    Row scaling changes neither the rank nor the kernel.
    """
    sparse_rows: list[dict] = [{} for _ in range(m.rows)]
    for (i, j), v in m.entries.items():
        sparse_rows[i][j] = v
    out = []
    for r in sparse_rows:
        mult = 1
        for v in r.values():
            mult = lcm(mult, v.denominator)
        dense = [0] * m.cols
        for j, v in r.items():
            dense[j] = int(v * mult)
        out.append(dense)
    return out


def _echelon(m: Matrix):
    """Fraction-free (Bareiss) forward elimination.

    Returns ``(rows, pivot_cols)``: integer echelon rows and the pivot
    column of each.  Pivoting is deterministic: columns left to right,
    smallest remaining row index first.
    """
    rows = _integer_rows(m)
    nrows, ncols = m.rows, m.cols
    pivot_cols = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        sel = next((i for i in range(r, nrows) if rows[i][c]), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            # every row below the pivot is updated, even when x == 0: the
            # one-step Bareiss division is only exact if the rescaling by
            # piv/prev is applied uniformly
            x = rows[i][c]
            src = rows[r]
            dst = rows[i]
            for j in range(c, ncols):
                num = piv * dst[j] - x * src[j]
                q, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("inexact division in Bareiss step")
                dst[j] = q
        pivot_cols.append(c)
        prev = piv
        r += 1
    return rows[:len(pivot_cols)], pivot_cols


def rank(m: Matrix) -> int:
    """Exact rank of m over Q."""
    return len(_echelon(m)[1])


def kernel_basis(m: Matrix) -> "Subspace":
    """Right kernel of m as a subspace of Q^cols.

    The basis has one column per free column of the echelon form, with a
    unit entry in that coordinate, so the columns are independent by
    construction and the order is deterministic.
    """
    rows, pivot_cols = _echelon(m)
    pivot_set = set(pivot_cols)
    free = [c for c in range(m.cols) if c not in pivot_set]
    entries = {}
    for idx, f in enumerate(free):
        x = [Q(0)] * m.cols
        x[f] = Q(1)
        for i in reversed(range(len(pivot_cols))):
            c = pivot_cols[i]
            s = Q(0)
            row = rows[i]
            for j in range(c + 1, m.cols):
                if row[j] and x[j]:
                    s += Q(row[j]) * x[j]
            x[c] = -s / row[c]
        for coord, v in enumerate(x):
            if v:
                entries[(coord, idx)] = v
    return Subspace(m.cols, Matrix(m.cols, len(free), entries))


def solve(m: Matrix, b) -> list | None:
    """One solution x of m*x = b (free variables set to 0), or None.

    ``b`` may be a list of length m.rows or a single-column Matrix.
    """
    if isinstance(b, Matrix):
        if b.cols != 1 or b.rows != m.rows:
            raise ValueError("right-hand side shape mismatch")
        b = b.column(0)
    elif len(b) != m.rows:
        raise ValueError("right-hand side length mismatch")
    aug = [[Q(0)] * (m.cols + 1) for _ in range(m.rows)]
    for (i, j), v in m.entries.items():
        aug[i][j] = v
    for i, v in enumerate(b):
        aug[i][m.cols] = _q(v)
    pivot_cols = []
    r = 0
    for c in range(m.cols):
        if r == len(aug):
            break
        sel = next((i for i in range(r, len(aug)) if aug[i][c]), None)
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        piv = aug[r][c]
        for i in range(r + 1, len(aug)):
            x = aug[i][c]
            if x:
                for j in range(c, m.cols + 1):
                    aug[i][j] -= x / piv * aug[r][j]
        pivot_cols.append(c)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][m.cols]:
            return None
    x = [Q(0)] * m.cols
    for i in reversed(range(len(pivot_cols))):
        c = pivot_cols[i]
        s = aug[i][m.cols]
        for j in range(c + 1, m.cols):
            if aug[i][j] and x[j]:
                s -= aug[i][j] * x[j]
        x[c] = s / aug[i][c]
    return x


class Subspace:
    """A linear subspace of Q^n carried by a basis matrix (columns)."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: Matrix, _checked: bool = False):
        if basis.rows != ambient_dim:
            raise ValueError("basis rows must equal the ambient dimension")
        if not _checked and rank(basis) != basis.cols:
            raise ValueError("basis columns are linearly dependent")
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix(ambient_dim, 0), _checked=True)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.identity(ambient_dim), _checked=True)

    @classmethod
    def spanned_by(cls, m: Matrix) -> "Subspace":
        """The column space of m, with the pivot columns as basis."""
        _, cols = _echelon(m)
        entries = {}
        for new_j, j in enumerate(cols):
            for i, v in enumerate(m.column(j)):
                if v:
                    entries[(i, new_j)] = v
        return cls(m.rows, Matrix(m.rows, len(cols), entries), _checked=True)

    @property
    def dim(self) -> int:
        return self.basis.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace) or self.ambient_dim != other.ambient_dim:
            return False
        if self.dim != other.dim:
            return False
        return rank(Matrix.hstack(self.basis, other.basis)) == self.dim

    def __repr__(self):
        return f"Subspace(dim {self.dim} of Q^{self.ambient_dim})"

    def contains_vector(self, v) -> bool:
        stacked = Matrix.hstack(self.basis, Matrix.from_column(v))
        return rank(stacked) == self.dim

    def contains(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        stacked = Matrix.hstack(self.basis, other.basis)
        return rank(stacked) == self.dim


def subspace_arithmetic(u: Subspace, v: Subspace):
    """(dim(U+V), dim(U∩V), dim((U+V)/V)) for subspaces of the same Q^n."""
    if u.ambient_dim != v.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    sum_dim = rank(Matrix.hstack(u.basis, v.basis))
    intersection_dim = u.dim + v.dim - sum_dim
    quotient_dim = sum_dim - v.dim
    return sum_dim, intersection_dim, quotient_dim


def coordinate_subspace(ambient_dim: int, coords) -> Subspace:
    """Span of the unit vectors e_c for c in coords."""
    coords = sorted(set(coords))
    entries = {(c, j): Q(1) for j, c in enumerate(coords)}
    return Subspace(ambient_dim, Matrix(ambient_dim, len(coords), entries),
                    _checked=True)


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    if u.ambient_dim != v.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return Subspace.spanned_by(Matrix.hstack(u.basis, v.basis))


def subspace_intersection(u: Subspace, v: Subspace) -> Subspace:
    """U ∩ V from the kernel of [U | -V]."""
    if u.ambient_dim != v.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    paired = kernel_basis(Matrix.hstack(u.basis, -v.basis))
    top = Matrix(u.dim, paired.dim,
                 {(i, j): val for (i, j), val in paired.basis.entries.items()
                  if i < u.dim})
    return Subspace(u.ambient_dim, u.basis * top, _checked=True)


def complement_in(sub: Subspace, within: Subspace) -> Matrix:
    """Columns of within.basis completing a basis of sub to one of within.

    Requires sub ⊆ within; the returned columns represent a basis of the
    quotient within/sub, chosen deterministically.
    """
    combined = Matrix.hstack(sub.basis, within.basis)
    _, pivots = _echelon(combined)
    chosen = [p - sub.dim for p in pivots if p >= sub.dim]
    entries = {}
    for new_j, j in enumerate(chosen):
        for i, v in enumerate(within.basis.column(j)):
            if v:
                entries[(i, new_j)] = v
    return Matrix(within.ambient_dim, len(chosen), entries)


def image_subspace(m: Matrix, s: Subspace) -> Subspace:
    """m(S) as a subspace of Q^rows."""
    if s.ambient_dim != m.cols:
        raise ValueError("subspace does not live in the domain of m")
    return Subspace.spanned_by(m * s.basis)


def preimage_subspace(m: Matrix, s: Subspace) -> Subspace:
    """m^{-1}(S) as a subspace of Q^cols.

    Uses the annihilator of S: if the rows of C cut out S, then the
    preimage is the kernel of C*m.
    """
    if s.ambient_dim != m.rows:
        raise ValueError("subspace does not live in the codomain of m")
    annihilator = kernel_basis(s.basis.transpose())
    cutter = annihilator.basis.transpose()
    return kernel_basis(cutter * m)
