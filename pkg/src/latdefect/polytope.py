"""Exact convex hulls and the lattice measurements taken on them.

All computations happen in lattice coordinates of the affine hull (see
:class:`~latdefect.pointconfig.AffineFrame`), where the polytope is
full-dimensional.  Facets come from the double description routine in
:mod:`latdefect._hull`; nothing here uses floating point except the
vectorized integer scan in :func:`lattice_points`, which runs on ``int64``
only after an overflow bound check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial, gcd, prod

import numpy as np

from . import _hull
from .exceptions import InputError, PreconditionError
from .intlat import (
    IntMatrix,
    LatticeProjection,
    Vector,
    hermite_normal_form,
    integer_kernel,
    rational_inverse,
)
from .pointconfig import AffineFrame, PointConfiguration, facet_data, local_points

_SCAN_CHUNK = 1 << 20


@dataclass(frozen=True)
class VPolytope:
    """Lattice polytope given by its vertices (exactly the extreme points, sorted)."""

    ambient_dim: int
    vertices: tuple[Vector, ...]

    def as_config(self) -> PointConfiguration:
        return PointConfiguration(self.ambient_dim, self.vertices)

    @property
    def dim(self) -> int:
        return _local_hull(self).frame.dim

    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim


@dataclass(frozen=True)
class HPolytope:
    """``{x : <a, x> <= b for (a, b) in facets, <c, x> = d for (c, d) in affine_hull}``.

    For lower-dimensional polytopes the facets are relative to the affine hull.
    """

    facets: tuple[tuple[Vector, int], ...]
    affine_hull: tuple[tuple[Vector, int], ...]

    def contains(self, x, strict: bool = False) -> bool:
        if any(_dot(c, x) != d for c, d in self.affine_hull):
            return False
        if strict:
            return all(_dot(a, x) < b for a, b in self.facets)
        return all(_dot(a, x) <= b for a, b in self.facets)


@dataclass(frozen=True)
class _LocalHull:
    frame: AffineFrame
    vertices: tuple[Vector, ...]
    facets: tuple[tuple[Vector, int], ...]


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


@lru_cache(maxsize=4096)
def _local_hull(p: VPolytope) -> _LocalHull:
    frame, local = local_points(p.as_config())
    if frame.dim == 0:
        return _LocalHull(frame, local[:1], ())
    fac = _hull.facets(local)
    return _LocalHull(frame, _hull.vertices(local, fac), fac)


def vertices_of(a: PointConfiguration) -> VPolytope:
    if a.is_empty():
        raise PreconditionError("convex hull of the empty configuration")
    frame, local = local_points(a)
    if frame.dim == 0:
        return VPolytope(a.ambient_dim, (a.points[0],))
    verts = _hull.vertices(local, _hull.facets(local))
    return VPolytope(a.ambient_dim, tuple(sorted(frame.to_ambient(z) for z in verts)))


def convex_hull(a: PointConfiguration) -> tuple[VPolytope, HPolytope]:
    vp = vertices_of(a)
    frame = _local_hull(vp).frame
    eqs = []
    if frame.dim < a.ambient_dim:
        ker = integer_kernel(frame.basis.T) if frame.dim else IntMatrix.identity(a.ambient_dim)
        for c in ker.columns():
            eqs.append((c, _dot(c, frame.base)))
    return vp, HPolytope(tuple(sorted(facet_data(vp.as_config()))), tuple(eqs))


def dilate(p: VPolytope, c: int) -> VPolytope:
    if c < 0:
        raise InputError("dilation factor must be non-negative")
    return VPolytope(p.ambient_dim, tuple(sorted({tuple(c * x for x in v) for v in p.vertices})))


def translate(p: VPolytope, v) -> VPolytope:
    return VPolytope(p.ambient_dim, tuple(sorted(tuple(x + y for x, y in zip(u, v)) for u in p.vertices)))


# ---------------------------------------------------------------------------
# Lattice points
# ---------------------------------------------------------------------------

def _scan(h: _LocalHull, strict: bool) -> list[Vector]:
    d = h.frame.dim
    if d == 0:
        return [h.vertices[0]]
    lo = [min(v[i] for v in h.vertices) for i in range(d)]
    hi = [max(v[i] for v in h.vertices) for i in range(d)]
    amax = max(abs(x) for a, _ in h.facets for x in a)
    cmax = max(max(abs(x) for x in lo), max(abs(x) for x in hi))
    bmax = max(abs(b) for _, b in h.facets)
    if d * amax * cmax + bmax >= 2 ** 62:
        return _scan_python(h, lo, hi, strict)
    a_mat = np.array([a for a, _ in h.facets], dtype=np.int64)
    b_vec = np.array([b for _, b in h.facets], dtype=np.int64)
    out = []
    inner = [np.arange(lo[i], hi[i] + 1, dtype=np.int64) for i in range(1, d)]
    inner_size = prod(hi[i] - lo[i] + 1 for i in range(1, d))
    if inner_size <= _SCAN_CHUNK:
        tail = (np.stack(np.meshgrid(*inner, indexing="ij"), axis=-1).reshape(-1, d - 1)
                if d > 1 else np.zeros((1, 0), dtype=np.int64))
        # inequality values split as a[0]*x0 + a[1:] . tail
        tail_vals = tail @ a_mat[:, 1:].T
        for x0 in range(lo[0], hi[0] + 1):
            vals = tail_vals + x0 * a_mat[:, 0]
            ok = (vals < b_vec) if strict else (vals <= b_vec)
            for row in tail[ok.all(axis=1)]:
                out.append((x0,) + tuple(int(x) for x in row))
        return out
    return _scan_python(h, lo, hi, strict)


def _scan_python(h, lo, hi, strict):
    out = []
    for z in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if all((_dot(a, z) < b) if strict else (_dot(a, z) <= b) for a, b in h.facets):
            out.append(tuple(z))
    return out


def lattice_points(p: VPolytope) -> list[Vector]:
    """All points of ``conv(p) cap Z^n``, sorted."""
    h = _local_hull(p)
    return sorted(h.frame.to_ambient(z) for z in _scan(h, strict=False))


def interior_lattice_points(p: VPolytope) -> list[Vector]:
    """Points of ``int(conv(p)) cap Z^n``; empty when ``p`` is not full-dimensional."""
    h = _local_hull(p)
    if h.frame.dim < p.ambient_dim:
        return []
    return sorted(h.frame.to_ambient(z) for z in _scan(h, strict=True))


def relative_interior_lattice_points(p: VPolytope) -> list[Vector]:
    h = _local_hull(p)
    return sorted(h.frame.to_ambient(z) for z in _scan(h, strict=True))


def is_interior_point(p: VPolytope, x) -> bool:
    _, hp = convex_hull(p.as_config())
    return p.is_full_dimensional() and hp.contains(tuple(x), strict=True)


# ---------------------------------------------------------------------------
# Volume
# ---------------------------------------------------------------------------

def _pulling(verts: tuple[Vector, ...]) -> list[tuple[Vector, ...]]:
    # verts: vertices of a full-dimensional polytope in Z^d
    d = len(verts[0])
    if d == 0 or len(verts) == d + 1:
        return [verts]
    v0 = verts[0]
    out = []
    for a, b in _hull.facets(verts):
        if _dot(a, v0) == b:
            continue
        fpts = tuple(v for v in verts if _dot(a, v) == b)
        frame, loc = local_points(PointConfiguration(d, fpts))
        for simplex in _pulling(loc):
            out.append((v0,) + tuple(frame.to_ambient(z) for z in simplex))
    return out


def pulling_triangulation(p: VPolytope) -> list[tuple[Vector, ...]]:
    """Pulling triangulation from the first vertex, simplices in ambient coordinates."""
    h = _local_hull(p)
    return [tuple(h.frame.to_ambient(z) for z in s) for s in _pulling(h.vertices)]


def relative_normalized_volume(p: VPolytope) -> int:
    """Normalized volume measured in the lattice ``aff(p) cap Z^n``."""
    h = _local_hull(p)
    if h.frame.dim == 0:
        return 1
    return sum(_hull.simplex_volume(s) for s in _pulling(h.vertices))


def normalized_volume(p: VPolytope) -> int:
    """``n!`` times the Euclidean volume; ``0`` for lower-dimensional polytopes."""
    if _local_hull(p).frame.dim < p.ambient_dim:
        return 0
    return relative_normalized_volume(p)


# ---------------------------------------------------------------------------
# Codegree and width
# ---------------------------------------------------------------------------

def codegree(p: VPolytope) -> int:
    """Smallest ``c >= 1`` such that ``c * p`` has an interior lattice point."""
    if not p.is_full_dimensional():
        raise PreconditionError("codegree is defined here for full-dimensional polytopes only")
    n = p.ambient_dim
    for c in range(1, n + 2):
        if interior_lattice_points(dilate(p, c)):
            return c
    raise AssertionError("(n+1)P always has an interior lattice point")


@dataclass(frozen=True)
class WidthResult:
    width: int
    direction: Vector
    search_bound: tuple[int, ...]
    directions_tried: int


def width_along(p: VPolytope, w) -> int:
    vals = [_dot(w, v) for v in p.vertices]
    return max(vals) - min(vals)


def width_certificate(p: VPolytope) -> WidthResult:
    """Lattice width with a minimizing direction.

    Let ``E`` hold the edge vectors ``v_i - v_0`` of a full-dimensional
    simplex on vertices of ``p``.  Any ``w`` of width at most ``W`` satisfies
    ``|E^T w|_inf <= W``, so ``|w_j| <= W * sum_i |(E^-T)_ji|``.  Starting from
    the best coordinate direction, every primitive ``w`` in that box is tried;
    the box is recorded as ``search_bound``.
    """
    if not p.is_full_dimensional():
        raise PreconditionError("lattice width needs a full-dimensional polytope")
    n = p.ambient_dim
    best_w = min((tuple(int(i == j) for i in range(n)) for j in range(n)),
                 key=lambda w: width_along(p, w))
    best = width_along(p, best_w)
    edges = _widest_simplex(p.vertices, n)
    # edges holds E^T row by row, so w = inv @ y with |y|_inf <= best
    inv = rational_inverse(edges)
    bound = tuple(int(best * sum(abs(x) for x in inv[j])) for j in range(n))
    tried = 0
    for w in product(*(range(-b, b + 1) for b in bound)):
        nz = next((x for x in w if x), 0)
        if nz <= 0:
            continue
        g = 0
        for x in w:
            g = gcd(g, x)
        if g != 1:
            continue
        tried += 1
        wd = width_along(p, w)
        if wd < best:
            best, best_w = wd, tuple(w)
    return WidthResult(best, tuple(best_w), bound, tried)


def _widest_simplex(verts, n) -> list[list[int]]:
    best, best_det = None, 0
    cands = list(verts)
    if len(cands) <= 12:
        for combo in combinations(cands, n + 1):
            e = [[a - b for a, b in zip(v, combo[0])] for v in combo[1:]]
            dt = abs(IntMatrix.from_rows(e, cols=n).det())
            if dt > best_det:
                best, best_det = e, dt
        return best
    chosen = [cands[0]]
    for v in cands[1:]:
        e = [[a - b for a, b in zip(u, chosen[0])] for u in chosen[1:] + [v]]
        if hermite_normal_form(IntMatrix.from_rows(e, cols=n)).rank == len(e):
            chosen.append(v)
        if len(chosen) == n + 1:
            break
    return [[a - b for a, b in zip(u, chosen[0])] for u in chosen[1:]]


def lattice_width(p: VPolytope) -> int:
    return width_certificate(p).width


# ---------------------------------------------------------------------------
# Projections
# ---------------------------------------------------------------------------

def project_config(a: PointConfiguration, pi: LatticeProjection | IntMatrix) -> PointConfiguration:
    """Image of ``a`` under a lattice projection (deduplicated)."""
    if isinstance(pi, IntMatrix):
        pi = LatticeProjection(pi)
    if pi.source_dim != a.ambient_dim:
        raise InputError(f"projection from Z^{pi.source_dim} applied to a configuration in Z^{a.ambient_dim}")
    return PointConfiguration(pi.target_dim, tuple(pi(p) for p in a.points))


def euclidean_volume(p: VPolytope) -> Fraction:
    return Fraction(normalized_volume(p), factorial(p.ambient_dim))
