import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from latdefect.exceptions import InputError, PreconditionError
from latdefect.intlat import IntMatrix, lattice_span
from latdefect.pointconfig import (
    Family,
    PointConfiguration,
    affine_frame,
    cayley_sum,
    difference_lattice,
    dimension,
    face_from_normal,
    faces,
    family_lattice,
    find_isomorphism,
    is_face,
    is_isomorphic,
    is_spanning,
    minkowski_sum,
    minkowski_sum_all,
    standard_simplex,
)

from conftest import D2, SEGMENTS, SQUARE, random_config, random_family

PC = PointConfiguration.of


def test_canonical_storage():
    a = PC([(1, 0), (0, 0), (1, 0)])
    assert a.points == ((0, 0), (1, 0))
    with pytest.raises(InputError):
        PointConfiguration(2, ((0, 0), (1,)))


def test_dimension_examples():
    assert dimension(PC([(3, 4)])) == 0
    assert dimension(PC(SEGMENTS[0])) == 1
    assert dimension(PC(D2)) == 2
    assert dimension(PointConfiguration.empty(2)) == -1


def test_minkowski_examples():
    a = PC(D2)
    assert minkowski_sum(a, PC([(0, 0)])) == a
    grid = minkowski_sum(PC(SEGMENTS[0]), PC(SEGMENTS[1]))
    assert grid == PC(itertools.product(range(3), repeat=2))
    s = minkowski_sum(a, a)
    assert s == PC([(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
    with pytest.raises(InputError):
        minkowski_sum(a, PC([(0,)]))


def test_cayley_sum_examples():
    cs = cayley_sum(Family.of([(0,)], [(1,)]))
    assert cs.config == PC([(0, 0), (1, 1)]) and dimension(cs.config) == 1
    rem = cayley_sum(Family.of(*SEGMENTS))
    assert len(rem.config) == 6 and rem.config.ambient_dim == 3
    assert dimension(rem.config) == 3 == dimension(minkowski_sum(PC(SEGMENTS[0]), PC(SEGMENTS[1]))) + 1
    assert rem.part(1) == PC([(0, 0, 1), (0, 1, 1), (0, 2, 1)])
    sq = cayley_sum(Family.of([(0,), (1,)], [(0,), (1,)]))
    assert sq.config == PC(SQUARE)


def test_cayley_sum_needs_nonempty():
    with pytest.raises(PreconditionError):
        cayley_sum(Family((PC(D2), PointConfiguration.empty(2))))


def test_difference_lattice_examples():
    assert difference_lattice(PC([(1, 1)])).rank == 0
    assert difference_lattice(PC([(0, 0), (2, 0)])) == lattice_span([(2, 0)], 2)
    assert difference_lattice(PC(SEGMENTS[0])) == lattice_span([(1, 0)], 2)
    with pytest.raises(PreconditionError):
        difference_lattice(PointConfiguration.empty(2))


def test_family_lattice_and_spanning_examples():
    assert family_lattice(Family.of(*SEGMENTS)) == lattice_span([(1, 0), (0, 1)], 2)
    lam = family_lattice(Family.of([(0, 0), (3, 0), (0, 3)]))
    assert lam == lattice_span([(3, 0), (0, 3)], 2) and lam.index() == 9
    translates = Family.of(D2, [(x + 4, y - 1) for x, y in D2])
    assert family_lattice(translates).is_full()
    assert is_spanning(Family.of(*SEGMENTS))
    assert not is_spanning(Family.of([(0, 0), (2, 0), (0, 2)]))
    for n in range(1, 5):
        simplex = standard_simplex(n).points
        assert is_spanning(Family.of(simplex, simplex))


def test_faces_examples():
    seg = faces(PC([(0,), (1,), (2,)]))
    assert [F.points.points for F in seg] == [((0,),), ((2,),), ((0,), (1,), (2,))]
    tri = faces(PC(D2))
    assert len(tri) == 7
    assert sorted(len(F.points) for F in tri) == [1, 1, 1, 2, 2, 2, 3]
    assert len(faces(PC(SQUARE))) == 9


def test_face_normals_witness_their_points(rng):
    for _ in range(40):
        a = random_config(rng, rng.randint(1, 3), full=False)
        for F in faces(a):
            assert face_from_normal(a, F.normal).points == F.points
            assert is_face(a, F.points)
            assert set(F.complement.points) == set(a.points) - set(F.points.points)


def test_standard_simplex_examples():
    assert standard_simplex(0).points == ((),)
    assert standard_simplex(1).points == ((0,), (1,))
    assert standard_simplex(2) == PC(D2)


def test_isomorphism_examples():
    assert is_isomorphic(PC([(0,), (1,), (2,)]), PC([(0,), (1,), (2,)]))
    assert is_isomorphic(PC(SEGMENTS[0]), PC(SEGMENTS[1]))
    assert not is_isomorphic(PC(D2), PC(SQUARE))


def test_isomorphism_lattice_modes():
    # {0, 3e1, 3e2} is a unimodular simplex in its own difference lattice,
    # but not in the lattice aff(A) cap Z^2, which has index 9 over it
    big = PC([(0, 0), (3, 0), (0, 3)])
    assert is_isomorphic(big, PC(D2), lattice="difference")
    assert not is_isomorphic(big, PC(D2), lattice="saturated")


def _random_unimodular(rnd, n):
    m = IntMatrix.identity(n)
    for _ in range(4):
        if n < 2:
            break
        i, j = rnd.sample(range(n), 2)
        rows = IntMatrix.identity(n).tolist()
        rows[i][j] = rnd.randint(-2, 2)
        m = m @ IntMatrix.from_rows(rows)
    if rnd.random() < 0.5:
        rows = m.tolist()
        rows[0] = [-x for x in rows[0]]
        m = IntMatrix.from_rows(rows)
    return m


def test_isomorphism_witnesses_apply(rng):
    for _ in range(60):
        n = rng.randint(1, 3)
        a = random_config(rng, n, full=False)
        u = _random_unimodular(rng, n)
        shift = tuple(rng.randint(-5, 5) for _ in range(n))
        b = a.transform(u).translate(shift)
        iso = find_isomorphism(a, b)
        assert iso is not None
        assert iso.image(a) == b


def test_isomorphism_is_an_equivalence(rng):
    pool = [random_config(rng, 2, size=(3, 4), full=False) for _ in range(14)]
    pool += [p.transform(_random_unimodular(rng, 2)) for p in pool[:6]]
    rel = {(i, j): is_isomorphic(a, b) for i, a in enumerate(pool) for j, b in enumerate(pool)}
    for i in range(len(pool)):
        assert rel[i, i]
    for (i, j), v in rel.items():
        assert v == rel[j, i]
    for i, j, k in itertools.product(range(len(pool)), repeat=3):
        if rel[i, j] and rel[j, k]:
            assert rel[i, k]


def test_difference_lattice_basepoint_independent(rng):
    for _ in range(50):
        a = random_config(rng, rng.randint(1, 3), full=False)
        base = difference_lattice(a)
        for p in a.points:
            assert difference_lattice(a, p) == base


def test_cayley_dimension_identity(rng):
    for _ in range(60):
        n = rng.randint(1, 3)
        f = random_family(rng, n, rng.randint(1, 3), full=False)
        cs = cayley_sum(f)
        assert dimension(cs.config) == dimension(minkowski_sum_all(f, n)) + f.k
        assert sum(len(p) for p in cs.partition()) == len(cs.config)


def test_cayley_parts_sit_on_simplex_vertices(rng):
    for _ in range(30):
        n = rng.randint(1, 3)
        f = random_family(rng, n, rng.randint(2, 3), full=False)
        cs = cayley_sum(f)
        for i, c in enumerate(f):
            e = tuple(int(j == i - 1) for j in range(f.k))
            assert cs.part(i) == PointConfiguration(n + f.k, tuple(p + e for p in c.points))


def test_spanning_matches_cayley_sum(rng):
    for _ in range(60):
        n = rng.randint(1, 3)
        f = random_family(rng, n, rng.randint(1, 3), full=False)
        assert is_spanning(f) == is_spanning(Family((cayley_sum(f).config,)))


points_2d = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=5)


@settings(max_examples=80, deadline=None)
@given(points_2d, points_2d, points_2d)
def test_minkowski_commutative_associative(p, q, r):
    a, b, c = PC(p), PC(q), PC(r)
    assert minkowski_sum(a, b) == minkowski_sum(b, a)
    assert minkowski_sum(minkowski_sum(a, b), c) == minkowski_sum(a, minkowski_sum(b, c))


@settings(max_examples=80, deadline=None)
@given(points_2d)
def test_affine_frame_round_trip(p):
    a = PC(p)
    fr = affine_frame(a)
    for x in a.points:
        assert fr.to_ambient(fr.to_local(x)) == x
        assert fr.contains(x)
