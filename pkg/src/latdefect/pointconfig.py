"""Point configurations, families, Minkowski and Cayley sums, faces, isomorphism."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Iterator, Sequence

from . import _hull
from .exceptions import InputError, PreconditionError
from .intlat import (
    IntMatrix,
    Lattice,
    Vector,
    bareiss_det,
    hermite_normal_form,
    lattice_span,
    left_inverse,
    primitive,
    rational_inverse,
    saturation,
)


@dataclass(frozen=True)
class PointConfiguration:
    """Finite set of points in ``Z^n``, stored deduplicated and sorted."""

    ambient_dim: int
    points: tuple[Vector, ...] = ()

    def __post_init__(self):
        pts = tuple(sorted({tuple(int(x) for x in p) for p in self.points}))
        for p in pts:
            if len(p) != self.ambient_dim:
                raise InputError(f"point {p} does not lie in Z^{self.ambient_dim}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, points: Iterable[Sequence[int]], ambient_dim: int | None = None) -> PointConfiguration:
        pts = [tuple(p) for p in points]
        if ambient_dim is None:
            if not pts:
                raise InputError("ambient dimension needed for an empty configuration")
            ambient_dim = len(pts[0])
        return cls(ambient_dim, tuple(pts))

    @classmethod
    def empty(cls, ambient_dim: int) -> PointConfiguration:
        return cls(ambient_dim, ())

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Vector]:
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self._point_set

    @cached_property
    def _point_set(self) -> frozenset:
        return frozenset(self.points)

    def is_empty(self) -> bool:
        return not self.points

    def translate(self, v: Sequence[int]) -> PointConfiguration:
        return PointConfiguration(self.ambient_dim,
                                  tuple(tuple(a + b for a, b in zip(p, v)) for p in self.points))

    def scale(self, c: int) -> PointConfiguration:
        return PointConfiguration(self.ambient_dim, tuple(tuple(c * a for a in p) for p in self.points))

    def transform(self, m: IntMatrix) -> PointConfiguration:
        return PointConfiguration(m.rows, tuple(m @ p for p in self.points))

    def tolist(self) -> list[list[int]]:
        return [list(p) for p in self.points]


@dataclass(frozen=True)
class Family:
    """Ordered tuple ``(A_0, ..., A_k)`` of configurations in a shared ``Z^n``."""

    configs: tuple[PointConfiguration, ...]

    def __post_init__(self):
        configs = tuple(self.configs)
        if not configs:
            raise InputError("a family needs at least one configuration")
        n = configs[0].ambient_dim
        if any(c.ambient_dim != n for c in configs):
            raise InputError("family members live in different ambient dimensions")
        object.__setattr__(self, "configs", configs)

    @classmethod
    def of(cls, *point_lists: Iterable[Sequence[int]]) -> Family:
        return cls(tuple(PointConfiguration.of(p) for p in point_lists))

    @property
    def ambient_dim(self) -> int:
        return self.configs[0].ambient_dim

    @property
    def k(self) -> int:
        return len(self.configs) - 1

    def __len__(self) -> int:
        return len(self.configs)

    def __iter__(self) -> Iterator[PointConfiguration]:
        return iter(self.configs)

    def __getitem__(self, i: int) -> PointConfiguration:
        return self.configs[i]

    def require_nonempty(self) -> None:
        for i, c in enumerate(self.configs):
            if c.is_empty():
                raise PreconditionError(f"configuration A_{i} is empty")


# ---------------------------------------------------------------------------
# Affine lattice frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineFrame:
    """Lattice coordinates on ``aff(A) cap Z^n``.

    ``basis`` (``n x d``) is a basis of the saturation of the difference
    lattice and ``coords`` (``d x n``) an integer left inverse of it, so
    ``x -> coords @ (x - base)`` identifies ``aff(A) cap Z^n`` with ``Z^d``.
    """

    base: Vector
    basis: IntMatrix
    coords: IntMatrix

    @property
    def dim(self) -> int:
        return self.basis.cols

    def to_local(self, x: Sequence[int]) -> Vector:
        return self.coords @ tuple(a - b for a, b in zip(x, self.base))

    def to_ambient(self, z: Sequence[int]) -> Vector:
        return tuple(b + s for b, s in zip(self.base, self.basis @ tuple(z)))

    def contains(self, x: Sequence[int]) -> bool:
        return self.to_ambient(self.to_local(x)) == tuple(x)


def affine_frame(a: PointConfiguration) -> AffineFrame:
    if a.is_empty():
        raise PreconditionError("the empty configuration has no affine hull")
    sat = saturation(difference_lattice(a))
    n = a.ambient_dim
    if sat.rank == 0:
        return AffineFrame(a.points[0], IntMatrix.zeros(n, 0), IntMatrix.zeros(0, n))
    return AffineFrame(a.points[0], sat.basis, left_inverse(sat.basis))


def local_points(a: PointConfiguration) -> tuple[AffineFrame, tuple[Vector, ...]]:
    frame = affine_frame(a)
    return frame, tuple(frame.to_local(p) for p in a.points)


# ---------------------------------------------------------------------------
# Basic operations
# ---------------------------------------------------------------------------

def difference_lattice(a: PointConfiguration, basepoint: Sequence[int] | None = None) -> Lattice:
    """``<A - A>``, generated by ``p - basepoint`` for ``p`` in ``A``."""
    if a.is_empty():
        raise PreconditionError("difference lattice of the empty configuration")
    p0 = tuple(basepoint) if basepoint is not None else a.points[0]
    if p0 not in a:
        raise InputError("basepoint is not a point of the configuration")
    return lattice_span([tuple(x - y for x, y in zip(p, p0)) for p in a.points if p != p0],
                        a.ambient_dim)


def dimension(a: PointConfiguration) -> int:
    """Dimension of the affine hull; ``-1`` for the empty configuration."""
    if a.is_empty():
        return -1
    return difference_lattice(a).rank


def is_full_dimensional(a: PointConfiguration) -> bool:
    return dimension(a) == a.ambient_dim


def minkowski_sum(a: PointConfiguration, b: PointConfiguration) -> PointConfiguration:
    if a.ambient_dim != b.ambient_dim:
        raise InputError("Minkowski sum of configurations in different ambient spaces")
    return PointConfiguration(a.ambient_dim, tuple(tuple(x + y for x, y in zip(p, q))
                                                   for p in a.points for q in b.points))


def minkowski_sum_all(configs: Iterable[PointConfiguration], ambient_dim: int) -> PointConfiguration:
    out = PointConfiguration(ambient_dim, ((0,) * ambient_dim,))
    for c in configs:
        out = minkowski_sum(out, c)
    return out


def family_lattice(f: Family) -> Lattice:
    """``Lambda = <A_0 - A_0> + ... + <A_k - A_k>``."""
    f.require_nonempty()
    gens = []
    for c in f:
        gens.extend(difference_lattice(c).generators)
    return lattice_span(gens, f.ambient_dim)


def is_spanning(f: Family) -> bool:
    return family_lattice(f).is_full()


def standard_simplex(k: int) -> PointConfiguration:
    """Vertices ``{0, e_1, ..., e_k}`` of the standard unimodular simplex in ``Z^k``."""
    if k < 0:
        raise InputError("simplex dimension must be non-negative")
    pts = [(0,) * k] + [tuple(int(i == j) for i in range(k)) for j in range(k)]
    return PointConfiguration(k, tuple(pts))


@dataclass(frozen=True)
class CayleySumResult:
    """``A_0 * ... * A_k`` with each point tagged by the summand it came from."""

    config: PointConfiguration
    tags: dict = field(hash=False, compare=False)
    k: int

    def part(self, i: int) -> PointConfiguration:
        return PointConfiguration(self.config.ambient_dim,
                                  tuple(p for p in self.config.points if self.tags[p] == i))

    def partition(self) -> list[PointConfiguration]:
        return [self.part(i) for i in range(self.k + 1)]


def cayley_sum(f: Family) -> CayleySumResult:
    for i, c in enumerate(f):
        if c.is_empty():
            raise PreconditionError(f"Cayley sum is proper only for non-empty summands; A_{i} is empty")
    k = f.k
    tags = {}
    for i, c in enumerate(f):
        e = tuple(int(j == i - 1) for j in range(k))
        for p in c.points:
            tags[p + e] = i
    return CayleySumResult(PointConfiguration(f.ambient_dim + k, tuple(tags)), tags, k)


# ---------------------------------------------------------------------------
# Faces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    """Points of ``parent`` maximizing ``<normal, .>``; ``normal = 0`` for the improper face."""

    parent: PointConfiguration
    normal: Vector
    points: PointConfiguration

    @property
    def complement(self) -> PointConfiguration:
        return PointConfiguration(self.parent.ambient_dim,
                                  tuple(p for p in self.parent.points if p not in self.points))

    def is_proper(self) -> bool:
        return len(self.points) != len(self.parent)


def facet_data(a: PointConfiguration) -> list[tuple[Vector, int]]:
    """Facets of ``conv(a)`` relative to its affine hull, as ambient ``(w, b)`` with ``<w, x> <= b``."""
    frame, local = local_points(a)
    if frame.dim == 0:
        return []
    out = []
    for normal, b in _hull.facets(local):
        # a row of the local inequality pulled back through x -> coords (x - base)
        w = tuple(sum(normal[i] * frame.coords[i, j] for i in range(frame.dim))
                  for j in range(a.ambient_dim))
        off = b + sum(x * y for x, y in zip(w, frame.base))
        g = 0
        for x in w:
            g = gcd(g, x)
        out.append((tuple(x // g for x in w), off // g))
    return out


def faces(a: PointConfiguration) -> list[Face]:
    """All non-empty faces of ``a``, including ``a`` itself.

    Facets of ``conv(a)`` closed under intersection; each face carries a
    normal (sum of the facet normals through it) whose maximizers are exactly
    its points.
    """
    return list(_faces(a))


@lru_cache(maxsize=1024)
def _faces(a: PointConfiguration) -> tuple[Face, ...]:
    if a.is_empty():
        raise PreconditionError("faces of the empty configuration")
    n = a.ambient_dim
    whole = Face(a, (0,) * n, a)
    found: dict[frozenset, Vector] = {}
    frontier = []
    facet_sets = []
    for w, b in facet_data(a):
        pts = frozenset(p for p in a.points if sum(x * y for x, y in zip(w, p)) == b)
        facet_sets.append((pts, w))
        if pts not in found:
            found[pts] = w
            frontier.append(pts)
    while frontier:
        nxt = []
        for f in frontier:
            for g, wg in facet_sets:
                h = f & g
                if h and h not in found:
                    found[h] = tuple(x + y for x, y in zip(found[f], wg))
                    nxt.append(h)
        frontier = nxt
    out = [Face(a, primitive(w), PointConfiguration(n, tuple(pts)))
           for pts, w in found.items() if len(pts) != len(a)]
    out.sort(key=lambda F: (len(F.points), F.points.points))
    out.append(whole)
    return tuple(out)


def face_from_normal(a: PointConfiguration, normal: Sequence[int]) -> Face:
    vals = [sum(x * y for x, y in zip(normal, p)) for p in a.points]
    top = max(vals)
    return Face(a, tuple(normal),
                PointConfiguration(a.ambient_dim, tuple(p for p, v in zip(a.points, vals) if v == top)))


def is_face(a: PointConfiguration, subset: PointConfiguration) -> bool:
    return any(F.points == subset for F in faces(a))


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineIsomorphism:
    """Affine map carrying ``source_lattice``-coordinates through ``local_matrix``.

    ``x -> target_base + T @ coords(x - source_base)`` where ``coords`` are the
    coefficients in the canonical basis of ``source_lattice`` and the result is
    expanded in the basis of ``target_lattice``.  ``local_matrix`` (``T``) is
    unimodular.
    """

    local_matrix: IntMatrix
    source_base: Vector
    target_base: Vector
    source_lattice: Lattice
    target_lattice: Lattice

    def __call__(self, x: Sequence[int]) -> Vector:
        z = self.source_lattice.coordinates(tuple(a - b for a, b in zip(x, self.source_base)))
        if z is None:
            raise InputError(f"{tuple(x)} is outside the source lattice of the isomorphism")
        y = self.target_lattice.basis @ (self.local_matrix @ z)
        return tuple(a + b for a, b in zip(y, self.target_base))

    @property
    def matrix(self) -> IntMatrix | None:
        """Integer ambient matrix of the linear part, when the source lattice is saturated."""
        n = self.source_lattice.ambient_dim
        if self.source_lattice.rank == 0:
            return IntMatrix.zeros(self.target_lattice.ambient_dim, n)
        inv = left_inverse(self.source_lattice.basis)
        if inv is None:
            return None
        return self.target_lattice.basis @ self.local_matrix @ inv

    def image(self, a: PointConfiguration) -> PointConfiguration:
        return PointConfiguration(self.target_lattice.ambient_dim, tuple(self(p) for p in a.points))


def _segment_signature(local, i):
    p = local[i]
    out = []
    for q in local:
        g = 0
        for x, y in zip(p, q):
            g = gcd(g, x - y)
        out.append(g)
    return tuple(sorted(out))


def _lattice_coordinates(a: PointConfiguration, lattice: str):
    diff = difference_lattice(a)
    if lattice == "saturated":
        lat = saturation(diff)
    elif lattice == "difference":
        lat = diff
    else:
        raise InputError(f"unknown lattice mode {lattice!r}")
    p0 = a.points[0]
    return lat, tuple(lat.coordinates(tuple(x - y for x, y in zip(p, p0))) for p in a.points)


def find_isomorphism(a: PointConfiguration, b: PointConfiguration,
                     lattice: str = "saturated") -> AffineIsomorphism | None:
    """Search for an affine lattice isomorphism carrying ``a`` onto ``b``.

    With ``lattice="saturated"`` the map must be an isomorphism of
    ``aff(a) cap Z^n`` onto ``aff(b) cap Z^m``.  With ``lattice="difference"``
    each configuration is measured in its own difference lattice ``<A - A>``
    instead, so e.g. ``{0, 3e1, 3e2}`` becomes a unimodular simplex.

    Exhaustive over images of an affine basis of ``a``, pruned by lattice
    lengths of segments, which every lattice isomorphism preserves.
    """
    if a.is_empty() or b.is_empty():
        raise PreconditionError("isomorphism test needs non-empty configurations")
    if len(a) != len(b):
        return None
    la, za = _lattice_coordinates(a, lattice)
    lb, zb = _lattice_coordinates(b, lattice)
    d = la.rank
    if d != lb.rank:
        return None
    ia = difference_lattice(PointConfiguration(d, za)) if d else None
    ib = difference_lattice(PointConfiguration(d, zb)) if d else None
    if d and ia.index() != ib.index():
        return None
    sig_a = [_segment_signature(za, i) for i in range(len(za))]
    sig_b = [_segment_signature(zb, i) for i in range(len(zb))]
    if sorted(sig_a) != sorted(sig_b):
        return None

    # affine basis of a, greedily
    chosen = [0]
    for i in range(1, len(za)):
        rows = [[x - y for x, y in zip(za[j], za[0])] for j in chosen[1:] + [i]]
        if len(rows) <= d and _rank(rows) == len(rows):
            chosen.append(i)
        if len(chosen) == d + 1:
            break
    zmat = [[x - y for x, y in zip(za[j], za[chosen[0]])] for j in chosen[1:]]
    zinv = rational_inverse(zmat) if d else []
    vol = abs(bareiss_det(zmat)) if d else 1
    target = set(zb)

    def gcd_len(u, v):
        g = 0
        for x, y in zip(u, v):
            g = gcd(g, x - y)
        return g

    witness = {}

    def _try_map(images):
        if d == 0:
            witness["t"] = IntMatrix.zeros(0, 0)
            return True
        ymat = [[x - y for x, y in zip(zb[j], zb[images[0]])] for j in images[1:]]
        if abs(bareiss_det(ymat)) != vol:
            return False
        # rows are edge vectors: T applied to z-row i gives y-row i, so T^T = Z^-1 Y
        t_rows = []
        for r in range(d):
            row = []
            for c in range(d):
                val = sum(zinv[r][i] * ymat[i][c] for i in range(d))
                if val.denominator != 1:
                    return False
                row.append(int(val))
            t_rows.append(row)
        tmat = IntMatrix.from_rows(t_rows, cols=d).T
        z0, y0 = za[chosen[0]], zb[images[0]]
        for z in za:
            img = tmat @ tuple(x - y for x, y in zip(z, z0))
            if tuple(x + y for x, y in zip(img, y0)) not in target:
                return False
        witness["t"] = tmat
        return True

    def search():
        stack = [[]]
        while stack:
            images = stack.pop()
            pos = len(images)
            if pos == d + 1:
                if _try_map(images):
                    return images
                continue
            src = za[chosen[pos]]
            for j in reversed(range(len(zb))):
                if j in images or sig_b[j] != sig_a[chosen[pos]]:
                    continue
                if any(gcd_len(zb[j], zb[images[t]]) != gcd_len(src, za[chosen[t]])
                       for t in range(pos)):
                    continue
                stack.append(images + [j])
        return None

    images = search()
    if images is None:
        return None
    src_base = a.points[chosen[0]]
    tgt_base = b.points[images[0]]
    return AffineIsomorphism(witness["t"], src_base, tgt_base, la, lb)


def is_isomorphic(a: PointConfiguration, b: PointConfiguration, lattice: str = "saturated") -> bool:
    return find_isomorphism(a, b, lattice) is not None


def _rank(rows) -> int:
    if not rows:
        return 0
    return hermite_normal_form(IntMatrix.from_rows(rows)).rank

