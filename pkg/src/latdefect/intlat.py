"""Exact integer linear algebra.

Hermite and Smith normal forms, sublattices of ``Z^n`` stored in a canonical
basis, saturation, primitivity and lattice projections.  Everything works on
Python integers; there is no floating point anywhere in this module.

Matrices are :class:`IntMatrix` values.  A sublattice is stored by the columns
of its column-style Hermite normal form, so two :class:`Lattice` objects are
equal exactly when they describe the same group.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .exceptions import InputError, PreconditionError

Vector = tuple[int, ...]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) >= 0`` and ``s*a + t*b = g``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def vector_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v: Sequence[int]) -> Vector:
    """Divide ``v`` by the gcd of its entries (zero stays zero)."""
    g = vector_gcd(v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


@dataclass(frozen=True)
class IntMatrix:
    """Row-major matrix of Python integers; ``rows * cols`` may be zero."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InputError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not data:
                raise InputError("column count needed for a matrix without rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable[int]], rows: int) -> IntMatrix:
        cols = [tuple(int(x) for x in c) for c in columns]
        for c in cols:
            if len(c) != rows:
                raise InputError(f"column of length {len(c)} in a matrix with {rows} rows")
        return cls(rows, len(cols), tuple(tuple(c[i] for c in cols) for i in range(rows)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
            ocols = other.columns()
            return IntMatrix(self.rows, other.cols,
                             tuple(tuple(_dot(r, c) for c in ocols) for r in self.entries))
        v = tuple(other)
        if len(v) != self.cols:
            raise InputError(f"vector of length {len(v)} for matrix with {self.cols} columns")
        return tuple(_dot(r, v) for r in self.entries)

    def select_rows(self, idx: Iterable[int]) -> IntMatrix:
        return IntMatrix.from_rows([self.entries[i] for i in idx], cols=self.cols)

    def select_columns(self, idx: Iterable[int]) -> IntMatrix:
        idx = list(idx)
        return IntMatrix(self.rows, len(idx), tuple(tuple(r[j] for j in idx) for r in self.entries))

    def det(self) -> int:
        if self.rows != self.cols:
            raise InputError("determinant of a non-square matrix")
        return bareiss_det(self.entries)

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination determinant."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rational_inverse(rows: Sequence[Sequence[int]]) -> list[list[Fraction]] | None:
    """Inverse over the rationals, ``None`` if singular."""
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return None
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [r[n:] for r in a]


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermiteForm:
    """Column-style HNF ``h = m @ u`` with ``u`` unimodular.

    ``h`` is in lower column echelon form: the pivot of column ``j`` is its
    first nonzero entry, pivot rows strictly increase, pivots are positive and
    entries of a pivot row to the left of the pivot lie in ``[0, pivot)``.
    Zero columns come last.
    """

    h: IntMatrix
    u: IntMatrix
    pivots: tuple[tuple[int, int], ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def hermite_normal_form(m: IntMatrix) -> HermiteForm:
    n, k = m.shape
    cols = [list(c) for c in m.columns()]
    ucols = [[int(i == j) for i in range(k)] for j in range(k)]

    def combine(j1, j2, a, b, c, d):
        # (col_j1, col_j2) <- (a*col_j1 + b*col_j2, c*col_j1 + d*col_j2); ad - bc = +-1
        for store in (cols, ucols):
            x, y = store[j1], store[j2]
            store[j1] = [a * p + b * q for p, q in zip(x, y)]
            store[j2] = [c * p + d * q for p, q in zip(x, y)]

    pivots = []
    pc = 0
    for i in range(n):
        if pc == k:
            break
        for j in range(pc + 1, k):
            b = cols[j][i]
            if b == 0:
                continue
            a = cols[pc][i]
            g, s, t = xgcd(a, b)
            combine(pc, j, s, t, -b // g, a // g)
        if cols[pc][i] == 0:
            # the pivot column may be zero in this row while a later one is not
            nz = next((j for j in range(pc + 1, k) if cols[j][i]), None)
            if nz is None:
                continue
            cols[pc], cols[nz] = cols[nz], cols[pc]
            ucols[pc], ucols[nz] = ucols[nz], ucols[pc]
        if cols[pc][i] < 0:
            cols[pc] = [-x for x in cols[pc]]
            ucols[pc] = [-x for x in ucols[pc]]
        p = cols[pc][i]
        for j in range(pc):
            q = cols[j][i] // p
            if q:
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[pc])]
                ucols[j] = [x - q * y for x, y in zip(ucols[j], ucols[pc])]
        pivots.append((i, pc))
        pc += 1
    return HermiteForm(IntMatrix.from_columns(cols, n), IntMatrix.from_columns(ucols, k),
                       tuple(pivots))


@dataclass(frozen=True)
class SmithForm:
    """``s = u @ m @ v`` with ``s`` diagonal, ``d1 | d2 | ... | dr`` and ``u, v`` unimodular."""

    s: IntMatrix
    u: IntMatrix
    v: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        out = []
        for i in range(min(self.s.rows, self.s.cols)):
            d = self.s[i, i]
            if d == 0:
                break
            out.append(d)
        return tuple(out)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def smith_normal_form(m: IntMatrix) -> SmithForm:
    n, k = m.shape
    a = [list(r) for r in m.entries]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(k)] for i in range(k)]

    def row_combine(i1, i2, p, q, r, s):
        for store in (a, u):
            x, y = store[i1], store[i2]
            store[i1] = [p * e + q * f for e, f in zip(x, y)]
            store[i2] = [r * e + s * f for e, f in zip(x, y)]

    def col_combine(j1, j2, p, q, r, s):
        for store in (a, v):
            for row in store:
                x, y = row[j1], row[j2]
                row[j1] = p * x + q * y
                row[j2] = r * x + s * y

    def swap_rows(i1, i2):
        for store in (a, u):
            store[i1], store[i2] = store[i2], store[i1]

    def swap_cols(j1, j2):
        for store in (a, v):
            for row in store:
                row[j1], row[j2] = row[j2], row[j1]

    for t in range(min(n, k)):
        best = None
        for i in range(t, n):
            for j in range(t, k):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            for i in range(t + 1, n):
                b = a[i][t]
                if b:
                    p = a[t][t]
                    if b % p == 0:
                        row_combine(t, i, 1, 0, -(b // p), 1)
                        continue
                    g, s, x = xgcd(p, b)
                    row_combine(t, i, s, x, -b // g, p // g)
            for j in range(t + 1, k):
                b = a[t][j]
                if b:
                    p = a[t][t]
                    if b % p == 0:
                        col_combine(t, j, 1, 0, -(b // p), 1)
                        continue
                    g, s, x = xgcd(p, b)
                    col_combine(t, j, s, x, -b // g, p // g)
            if any(a[i][t] for i in range(t + 1, n)):
                continue
            d = a[t][t]
            bad = next((i for i in range(t + 1, n)
                        if any(a[i][j] % d for j in range(t + 1, k))), None)
            if bad is None:
                break
            # pull the offending row into row t; the next pass lowers the pivot
            row_combine(t, bad, 1, 1, 0, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return SmithForm(IntMatrix.from_rows(a, cols=k), IntMatrix.from_rows(u, cols=n),
                     IntMatrix.from_rows(v, cols=k))


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """Sublattice of ``Z^n`` given by the HNF columns of a basis."""

    ambient_dim: int
    basis: IntMatrix

    @property
    def rank(self) -> int:
        return self.basis.cols

    @property
    def generators(self) -> list[Vector]:
        return self.basis.columns()

    def is_full(self) -> bool:
        return self.rank == self.ambient_dim and self.index() == 1

    def index(self) -> int:
        """Index in its saturation (product of the Smith invariant factors)."""
        out = 1
        for d in smith_normal_form(self.basis).invariant_factors:
            out *= d
        return out

    def coordinates(self, v: Sequence[int]) -> Vector | None:
        """Integer coefficients of ``v`` in the stored basis, or ``None``."""
        if len(v) != self.ambient_dim:
            raise InputError("vector length does not match the ambient dimension")
        r = list(v)
        coeffs = []
        for col in self.generators:
            p = next(i for i, x in enumerate(col) if x)
            if r[p] % col[p]:
                return None
            c = r[p] // col[p]
            coeffs.append(c)
            if c:
                r = [x - c * y for x, y in zip(r, col)]
        if any(r):
            return None
        return tuple(coeffs)

    def __contains__(self, v) -> bool:
        return self.coordinates(v) is not None

    def __add__(self, other: Lattice) -> Lattice:
        if self.ambient_dim != other.ambient_dim:
            raise InputError("lattices live in different ambient spaces")
        return lattice_span(self.generators + other.generators, self.ambient_dim)

    def contains_lattice(self, other: Lattice) -> bool:
        return all(g in self for g in other.generators)


def lattice_span(generators: Iterable[Sequence[int]], ambient_dim: int) -> Lattice:
    gens = [tuple(int(x) for x in g) for g in generators]
    for g in gens:
        if len(g) != ambient_dim:
            raise InputError(f"generator of length {len(g)} in Z^{ambient_dim}")
    if not gens:
        return Lattice(ambient_dim, IntMatrix.zeros(ambient_dim, 0))
    hf = hermite_normal_form(IntMatrix.from_columns(gens, ambient_dim))
    return Lattice(ambient_dim, hf.h.select_columns(range(hf.rank)))


def integer_kernel(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of ``{x in Z^cols : m x = 0}`` (always saturated)."""
    hf = hermite_normal_form(m)
    return hf.u.select_columns(range(hf.rank, m.cols))


def saturation(l: Lattice) -> Lattice:
    if l.rank == 0:
        return l
    # (L tensor Q) cap Z^n is the annihilator of the annihilator
    ann = integer_kernel(l.basis.T)
    if ann.cols == 0:
        return lattice_span([tuple(int(i == j) for i in range(l.ambient_dim))
                             for j in range(l.ambient_dim)], l.ambient_dim)
    return lattice_span(integer_kernel(ann.T).columns(), l.ambient_dim)


def is_saturated(l: Lattice) -> bool:
    return saturation(l) == l


def is_primitive_system(m: IntMatrix) -> bool:
    """True iff the ``k`` columns of the ``n x k`` matrix extend to a basis of ``Z^n``."""
    if m.cols > m.rows:
        raise InputError(f"{m.cols} columns in Z^{m.rows}: a primitive system needs k <= n")
    sf = smith_normal_form(m)
    return sf.rank == m.cols and all(d == 1 for d in sf.invariant_factors)


def left_inverse(m: IntMatrix) -> IntMatrix | None:
    """Integer ``k x n`` matrix ``w`` with ``w @ m = I_k``, or ``None`` if none exists."""
    if m.cols > m.rows or not is_primitive_system(m):
        return None
    sf = smith_normal_form(m)
    k = m.cols
    # s = u m v with s = [I; 0]  =>  v [I 0] u is a left inverse
    return sf.v @ sf.u.select_rows(range(k))


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    hf = hermite_normal_form(m)
    if hf.h != IntMatrix.identity(m.rows) or m.rows != m.cols:
        raise PreconditionError("matrix is not unimodular")
    return hf.u


# ---------------------------------------------------------------------------
# Lattice projections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeProjection:
    """Affine surjection ``x -> matrix @ (x - basepoint)`` from ``Z^n`` onto ``Z^k``."""

    matrix: IntMatrix
    basepoint: Vector = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.basepoint is None:
            object.__setattr__(self, "basepoint", (0,) * self.matrix.cols)
        object.__setattr__(self, "basepoint", tuple(int(x) for x in self.basepoint))
        if len(self.basepoint) != self.matrix.cols:
            raise InputError("basepoint length does not match the source dimension")
        if not is_surjective(self.matrix):
            raise PreconditionError("projection matrix is not surjective onto the target lattice")

    @property
    def source_dim(self) -> int:
        return self.matrix.cols

    @property
    def target_dim(self) -> int:
        return self.matrix.rows

    def __call__(self, x: Sequence[int]) -> Vector:
        return self.matrix @ tuple(a - b for a, b in zip(x, self.basepoint))

    def then(self, m: IntMatrix) -> LatticeProjection:
        """Post-compose with a surjective linear map ``m``."""
        return LatticeProjection(m @ self.matrix, self.basepoint)

    def kernel(self) -> Lattice:
        return lattice_span(integer_kernel(self.matrix).columns(), self.source_dim)


def is_surjective(m: IntMatrix) -> bool:
    if m.rows == 0:
        return True
    if m.rows > m.cols:
        return False
    sf = smith_normal_form(m)
    return sf.rank == m.rows and all(d == 1 for d in sf.invariant_factors)


def quotient_projection(l: Lattice) -> LatticeProjection:
    """Linear lattice projection ``Z^n -> Z^(n - rank)`` whose kernel is ``l``."""
    if not is_saturated(l):
        raise PreconditionError("lattice is not saturated; the quotient has torsion")
    n, r = l.ambient_dim, l.rank
    if r == 0:
        return LatticeProjection(IntMatrix.identity(n))
    sf = smith_normal_form(l.basis)
    return LatticeProjection(sf.u.select_rows(range(r, n)))


def complete_to_unimodular(m: IntMatrix) -> IntMatrix:
    """Rows ``q`` such that stacking ``q`` above the surjective ``m`` is unimodular."""
    if not is_surjective(m):
        raise PreconditionError("only surjective matrices extend to a unimodular matrix")
    k, n = m.shape
    if k == 0:
        return IntMatrix.identity(n)
    sf = smith_normal_form(m)
    w = unimodular_inverse(sf.v)
    return w.select_rows(range(k, n))
