import itertools
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from latdefect.exceptions import PreconditionError
from latdefect.intlat import IntMatrix
from latdefect.mixedvol import Method, mixed_volume, mixed_volume_ilp
from latdefect.oracle import ehrhart_volume
from latdefect.pointconfig import Family, PointConfiguration, minkowski_sum_all, standard_simplex
from latdefect.polytope import dilate, vertices_of

from conftest import D2, SEGMENTS, SQUARE, TWO_D2, random_family


def _float_mixed_volume(f: Family) -> float:
    """Polarization with scipy hull volumes (Euclidean)."""
    n = f.ambient_dim
    total = 0.0
    for size in range(1, n + 1):
        for sub in itertools.combinations(range(n), size):
            pts = np.array(minkowski_sum_all([f[i] for i in sub], n).points, dtype=float)
            try:
                vol = ConvexHull(pts).volume
            except Exception:
                vol = 0.0  # degenerate hull
            total += (-1) ** (n - size) * vol
    return total


def _ehrhart_mixed_volume(f: Family) -> Fraction:
    n = f.ambient_dim
    total = Fraction(0)
    for size in range(1, n + 1):
        for sub in itertools.combinations(range(n), size):
            p = vertices_of(minkowski_sum_all([f[i] for i in sub], n))
            total += (-1) ** (n - size) * Fraction(ehrhart_volume(p), factorial(n))
    return total


def test_examples():
    assert mixed_volume(Family.of(D2, D2)).value == 1
    assert mixed_volume(Family.of(D2, TWO_D2)).value == 2
    assert mixed_volume(Family.of(*SEGMENTS)).value == 4
    assert mixed_volume_ilp(Family.of(D2, D2)).value == 1
    assert mixed_volume_ilp(Family.of(D2, TWO_D2)).value == 2
    assert mixed_volume_ilp(Family.of(SQUARE, SQUARE)).value == 2


def test_simplex_anchor():
    for n in range(1, 5):
        s = standard_simplex(n)
        f = Family((s,) * n)
        assert mixed_volume(f).value == 1
        assert mixed_volume_ilp(f).value == 1


def test_ilp_terms_for_simplex_pair():
    res = mixed_volume_ilp(Family.of(D2, TWO_D2))
    mags = {t.subset: t.magnitude for t in res.terms}
    assert mags == {(): 1, (0,): 0, (1,): 0, (0, 1): 1}


def test_audit_terms_resum():
    for f in (Family.of(D2, TWO_D2), Family.of(*SEGMENTS), Family.of(SQUARE, D2)):
        res = mixed_volume(f)
        assert res.resum() == res.value and res.method is Method.POLARIZATION
        d = res.to_dict()
        assert sum(Fraction(t["sign"]) * Fraction(t["magnitude"]) for t in d["terms"]) == d["value"]


def test_wrong_member_count():
    with pytest.raises(PreconditionError):
        mixed_volume(Family.of(D2))
    with pytest.raises(PreconditionError):
        mixed_volume_ilp(Family.of(D2, D2, D2))


def test_ilp_needs_full_dimensional():
    with pytest.raises(PreconditionError):
        mixed_volume_ilp(Family.of(*SEGMENTS))


def test_methods_agree_with_oracles(rng):
    for _ in range(40):
        n = rng.randint(2, 3)
        f = random_family(rng, n, n)
        mv = mixed_volume(f)
        assert mv.value == mixed_volume_ilp(f).value
        assert mv.value == _ehrhart_mixed_volume(f)
        assert mv.value == pytest.approx(_float_mixed_volume(f), abs=1e-6)
        assert mv.value >= 1


def test_symmetry_and_invariance(rng):
    u = IntMatrix.from_rows([[1, 2, 0], [0, 1, 0], [1, 1, 1]])
    for _ in range(6):
        f = random_family(rng, 3, 3)
        base = mixed_volume(f).value
        for perm in ((1, 0, 2), (2, 0, 1)):
            assert mixed_volume(Family(tuple(f[i] for i in perm))).value == base
        moved = Family(tuple(c.translate((rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3)))
                             for c in f))
        assert mixed_volume(moved).value == base
        assert mixed_volume(Family(tuple(c.transform(u) for c in f))).value == base


def test_multilinearity_in_dilation(rng):
    for _ in range(10):
        f = random_family(rng, 2, 2)
        c = PointConfiguration(2, dilate(vertices_of(f[0]), 3).vertices)
        assert mixed_volume(Family((c, f[1]))).value == 3 * mixed_volume(f).value
