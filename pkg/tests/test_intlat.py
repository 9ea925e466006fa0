import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from latdefect.exceptions import InputError, PreconditionError
from latdefect.intlat import (
    IntMatrix,
    LatticeProjection,
    complete_to_unimodular,
    hermite_normal_form,
    integer_kernel,
    is_primitive_system,
    is_saturated,
    lattice_span,
    left_inverse,
    quotient_projection,
    saturation,
    smith_normal_form,
    xgcd,
)

matrices = st.integers(0, 4).flatmap(
    lambda r: st.integers(0, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c),
                           min_size=r, max_size=r).map(lambda rows: IntMatrix.from_rows(rows, cols=c))))


def _sympy_factors(m: IntMatrix):
    if 0 in m.shape:
        return ()
    return tuple(abs(int(x)) for x in invariant_factors(Matrix(m.tolist()), domain=ZZ) if x != 0)


def test_xgcd_bezout():
    for a, b in itertools.product(range(-7, 8), repeat=2):
        g, s, t = xgcd(a, b)
        assert g >= 0 and s * a + t * b == g


# --- Hermite normal form ----------------------------------------------------

def test_hnf_identity():
    hf = hermite_normal_form(IntMatrix.identity(2))
    assert hf.h == IntMatrix.identity(2) and hf.u == IntMatrix.identity(2)


def test_hnf_diag_is_canonical():
    m = IntMatrix.from_rows([[2, 0], [0, 2]])
    assert hermite_normal_form(m).h == m


def test_hnf_small_example():
    hf = hermite_normal_form(IntMatrix.from_rows([[1, 2], [3, 4]]))
    assert [hf.h[i, j] for i, j in hf.pivots] == [1, 2]
    assert abs(hf.h.det()) == 2


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_hnf_invariants(m):
    hf = hermite_normal_form(m)
    assert m @ hf.u == hf.h
    assert hf.u.is_unimodular()
    prev = -1
    for i, j in hf.pivots:
        assert i > prev and hf.h[i, j] > 0
        assert all(hf.h[r, j] == 0 for r in range(i))
        assert all(0 <= hf.h[i, jj] < hf.h[i, j] for jj in range(j))
        prev = i
    for j in range(hf.rank, m.cols):
        assert not any(hf.h.column(j))


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_hnf_is_canonical_under_column_operations(m):
    rnd = random.Random(hash(m.entries))
    u = IntMatrix.identity(m.cols)
    for _ in range(5):
        if m.cols < 2:
            break
        i, j = rnd.sample(range(m.cols), 2)
        e = [list(r) for r in IntMatrix.identity(m.cols).tolist()]
        e[i][j] = rnd.randint(-3, 3)
        u = u @ IntMatrix.from_rows(e)
    assert hermite_normal_form(m @ u).h == hermite_normal_form(m).h


# --- Smith normal form ------------------------------------------------------

def test_snf_examples():
    assert smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]])).s == IntMatrix.from_rows([[1, 0], [0, 6]])
    z = smith_normal_form(IntMatrix.zeros(2, 2))
    assert z.s == IntMatrix.zeros(2, 2) and z.rank == 0
    assert smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 2]])).invariant_factors == (2, 2)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_snf_invariants_and_oracle(m):
    sf = smith_normal_form(m)
    assert sf.u @ m @ sf.v == sf.s
    assert sf.u.is_unimodular() and sf.v.is_unimodular()
    d = sf.invariant_factors
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    for i in range(m.rows):
        for j in range(m.cols):
            if i != j or i >= len(d):
                assert sf.s[i, j] == 0
    assert d == _sympy_factors(m)


# --- lattices ---------------------------------------------------------------

def test_lattice_span_examples():
    l1 = lattice_span([(1, 0)], 2)
    assert l1.rank == 1 and l1.generators == [(1, 0)]
    l2 = lattice_span([(2, 0), (0, 2), (1, 1)], 2)
    assert l2.rank == 2 and l2.index() == 2
    assert lattice_span([], 2).rank == 0


def test_lattice_span_dimension_mismatch():
    with pytest.raises(InputError):
        lattice_span([(1, 0), (1, 0, 0)], 2)


def test_saturation_examples():
    assert saturation(lattice_span([(2, 0)], 2)) == lattice_span([(1, 0)], 2)
    assert saturation(lattice_span([(2, 0), (0, 2)], 2)) == lattice_span([(1, 0), (0, 1)], 2)
    sat = lattice_span([(1, 1)], 2)
    assert saturation(sat) == sat


vector_sets = st.integers(1, 3).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), max_size=4)))


@settings(max_examples=150, deadline=None)
@given(vector_sets)
def test_lattice_properties(data):
    n, gens = data
    lat = lattice_span(gens, n)
    assert lattice_span(lat.generators, n) == lat
    sat = saturation(lat)
    assert saturation(sat) == sat and is_saturated(sat)
    assert sat.contains_lattice(lat) and sat.rank == lat.rank
    d = smith_normal_form(lat.basis).invariant_factors if lat.rank else ()
    idx = 1
    for x in d:
        idx *= x
    # index of lat inside its saturation
    assert lat.index() == idx
    for g in gens:
        assert tuple(g) in lat


def test_integer_kernel_is_exact_kernel():
    m = IntMatrix.from_rows([[1, 2, 3], [2, 4, 6]])
    k = integer_kernel(m)
    assert k.cols == 2
    for c in k.columns():
        assert m @ c == (0, 0)
    assert is_saturated(lattice_span(k.columns(), 3))


# --- primitive systems ------------------------------------------------------

def test_primitive_examples():
    assert is_primitive_system(IntMatrix.from_columns([(1, 0), (0, 1)], 2))
    assert not is_primitive_system(IntMatrix.from_columns([(2, 0)], 2))
    assert not is_primitive_system(IntMatrix.from_columns([(1, 1), (1, -1)], 2))


def test_primitive_too_many_columns():
    with pytest.raises(InputError):
        is_primitive_system(IntMatrix.from_columns([(1,), (0,)], 1))


def _brute_left_inverse(m: IntMatrix, bound: int) -> bool:
    n, k = m.shape
    target = IntMatrix.identity(k)
    rows = list(itertools.product(range(-bound, bound + 1), repeat=n))
    # rows of u are independent: row i must satisfy row @ m = e_i
    for i in range(k):
        e = target.row(i)
        if not any(tuple(sum(r[a] * m[a, j] for a in range(n)) for j in range(k)) == e for r in rows):
            return False
    return True


def test_primitive_matches_brute_force_left_inverse():
    rnd = random.Random(7)
    cases = 0
    while cases < 120:
        n = rnd.randint(1, 3)
        k = rnd.randint(1, n)
        m = IntMatrix.from_columns([tuple(rnd.randint(-3, 3) for _ in range(n)) for _ in range(k)], n)
        prim = is_primitive_system(m)
        inv = left_inverse(m)
        assert (inv is not None) == prim
        if prim:
            assert inv @ m == IntMatrix.identity(k)
        assert _brute_left_inverse(m, 6) == prim
        cases += 1


# --- projections ------------------------------------------------------------

def test_quotient_projection_examples():
    p = quotient_projection(lattice_span([(1, 0)], 2))
    assert p.target_dim == 1 and p((5, 0)) == (0,) and abs(p((0, 1))[0]) == 1
    full = quotient_projection(lattice_span([(1, 0), (0, 1)], 2))
    assert full.target_dim == 0
    diag = quotient_projection(lattice_span([(1, 1)], 2))
    assert diag((1, 1)) == (0,) and diag.kernel() == lattice_span([(1, 1)], 2)


def test_quotient_projection_requires_saturation():
    with pytest.raises(PreconditionError):
        quotient_projection(lattice_span([(2, 0)], 2))


def test_non_surjective_projection_rejected():
    with pytest.raises(PreconditionError):
        LatticeProjection(IntMatrix.from_rows([[2, 0]]))


@settings(max_examples=100, deadline=None)
@given(vector_sets)
def test_quotient_kernel_and_completion(data):
    n, gens = data
    sat = saturation(lattice_span(gens, n))
    p = quotient_projection(sat)
    assert p.target_dim == n - sat.rank
    assert p.kernel() == sat
    q = complete_to_unimodular(p.matrix)
    assert q.rows + p.target_dim == n
    stacked = IntMatrix.from_rows(q.tolist() + p.matrix.tolist(), cols=n)
    assert stacked.is_unimodular()
