"""Exact facet enumeration for full-dimensional integer point sets.

The facets of ``conv(P)`` for ``P`` in ``Z^d`` are the extreme rays of the
polar cone ``{y : <y, (1, p)> <= 0 for p in P}``.  Those rays are enumerated
with the double description method on integer vectors; adjacency uses the
combinatorial test, so no rank computations happen in the inner loop.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd

from .intlat import IntMatrix, bareiss_det, hermite_normal_form, rational_inverse

Point = tuple[int, ...]


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _normalize(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _independent_rows(rows):
    chosen = []
    for i, r in enumerate(rows):
        trial = [rows[j] for j in chosen] + [r]
        if hermite_normal_form(IntMatrix.from_rows(trial).T).rank == len(trial):
            chosen.append(i)
            if len(chosen) == len(r):
                break
    return chosen


@lru_cache(maxsize=4096)
def facets(points: tuple[Point, ...]) -> tuple[tuple[Point, int], ...]:
    """Facet inequalities ``<a, x> <= b`` (``a`` primitive) of a full-dimensional hull.

    ``points`` must affinely span ``R^d``.  For ``d == 0`` there are no facets.
    """
    d = len(points[0])
    if d == 0:
        return ()
    hom = [(1,) + p for p in points]
    dim = d + 1
    basis_idx = _independent_rows(hom)
    if len(basis_idx) != dim:
        raise ValueError("point set is not full-dimensional")
    inv = rational_inverse([hom[i] for i in basis_idx])
    rays = []
    for j in range(dim):
        col = [-inv[i][j] for i in range(dim)]
        den = 1
        for x in col:
            den = den * x.denominator // gcd(den, x.denominator)
        rays.append(_normalize(tuple(int(x * den) for x in col)))
    order = list(basis_idx) + [i for i in range(len(hom)) if i not in set(basis_idx)]
    # tight sets as bitmasks over processed constraint positions
    tight = []
    for r in rays:
        mask = 0
        for pos, i in enumerate(order[:dim]):
            if _dot(hom[i], r) == 0:
                mask |= 1 << pos
        tight.append(mask)

    for pos in range(dim, len(order)):
        v = hom[order[pos]]
        vals = [_dot(v, r) for r in rays]
        pos_idx = [i for i, x in enumerate(vals) if x > 0]
        if not pos_idx:
            bit = 1 << pos
            tight = [t | bit if x == 0 else t for t, x in zip(tight, vals)]
            continue
        neg_idx = [i for i, x in enumerate(vals) if x < 0]
        new_rays, new_tight = [], []
        for p in pos_idx:
            for q in neg_idx:
                common = tight[p] & tight[q]
                if bin(common).count("1") < dim - 2:
                    continue
                if any(i != p and i != q and tight[i] & common == common
                       for i in range(len(rays))):
                    continue
                r = _normalize(tuple(vals[p] * b - vals[q] * a
                                     for a, b in zip(rays[p], rays[q])))
                new_rays.append(r)
                new_tight.append(common | (1 << pos))
        bit = 1 << pos
        keep = [i for i, x in enumerate(vals) if x <= 0]
        rays = [rays[i] for i in keep] + new_rays
        tight = [tight[i] | (bit if vals[i] == 0 else 0) for i in keep] + new_tight

    out = []
    for y in rays:
        normal = y[1:]
        g = 0
        for x in normal:
            g = gcd(g, x)
        out.append((tuple(x // g for x in normal), -y[0] // g))
    return tuple(sorted(set(out)))


def vertices(points: tuple[Point, ...], facet_list) -> tuple[Point, ...]:
    """Points whose tight facet normals span ``R^d``."""
    d = len(points[0])
    if d == 0:
        return (points[0],)
    out = []
    for p in points:
        normals = [a for a, b in facet_list if _dot(a, p) == b]
        if len(normals) >= d and hermite_normal_form(IntMatrix.from_columns(normals, d)).rank == d:
            out.append(p)
    return tuple(sorted(set(out)))


def simplex_volume(simplex) -> int:
    """``|det|`` of the edge vectors of a full-dimensional lattice simplex."""
    v0 = simplex[0]
    return abs(bareiss_det([[a - b for a, b in zip(v, v0)] for v in simplex[1:]]))
