import itertools

import pytest
from hypothesis import given, settings, strategies as st

from rbscat.guards import GuardConfig, GuardExceeded
from rbscat.rings import (
    Mat,
    RingError,
    Submodule,
    canonical_rowspace,
    complete_to_invertible,
    default_irreducible,
    enumerate_flags,
    enumerate_gl,
    enumerate_splittable_submodules,
    enumerate_submodules,
    gl_from_generators,
    is_splittable,
    make_ring,
    quotient_map,
    reduce_vector,
)

F2 = make_ring("F2")
F3 = make_ring("F3")
F4 = make_ring("F4")
Z4 = make_ring("Z4")
Z9 = make_ring("Z9")


# ---------------------------------------------------------------------------
# independent oracles

def gaussian_binomial(n, k, q):
    """Number of k-dim subspaces of F_q^n, by the recursion
    [n,k]_q = [n-1,k-1]_q + q^k [n-1,k]_q."""
    if k < 0 or k > n:
        return 0
    if k == 0 or k == n:
        return 1
    return gaussian_binomial(n - 1, k - 1, q) + q ** k * gaussian_binomial(n - 1, k, q)


def gl_order(q, n):
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def brute_force_complement_exists(sub, all_subs):
    """Exhaustive search for a complement: S + T = R^n, S cap T = 0."""
    whole = Submodule.full(sub.ring, sub.n)
    elems = sub.elements()
    for t in all_subs:
        if len(elems & t.elements()) == 1:
            joined = Submodule.from_rows(sub.ring, sub.n,
                                         list(sub.mat) + list(t.mat))
            if joined == whole:
                return True
    return False


# ---------------------------------------------------------------------------
# rings

def test_ring_sizes_and_units():
    assert F2.size == 2 and len(F2.units) == 1
    assert F4.size == 4 and len(F4.units) == 3
    assert F4.poly == (1, 1, 1)  # x^2 + x + 1
    assert Z4.units == (1, 3)
    assert Z9.size == 9 and len(Z9.units) == 6


def test_ring_axioms_exhaustive():
    # construction already validates; re-check a few laws explicitly
    for R in (F2, F3, F4, Z4):
        n = R.size
        for a, b, c in itertools.product(range(n), repeat=3):
            assert R.add[R.add[a][b]][c] == R.add[a][R.add[b][c]]
            assert R.mul[R.mul[a][b]][c] == R.mul[a][R.mul[b][c]]
            assert R.mul[a][R.add[b][c]] == R.add[R.mul[a][b]][R.mul[a][c]]


def test_units_are_exactly_invertibles():
    for R in (F2, F3, F4, Z4, Z9):
        for a in range(R.size):
            has_inv = any(R.mul[a][b] == 1 for b in range(R.size))
            assert (a in R.units) == has_inv
        if R.is_field:
            assert len(R.units) == R.size - 1


def test_bad_descriptors():
    with pytest.raises(RingError):
        make_ring("F6")
    with pytest.raises(RingError):
        make_ring("Z6")
    with pytest.raises(RingError):
        make_ring({"kind": "Fp", "p": 4, "k": 1})
    with pytest.raises(RingError):
        make_ring({"kind": "Fq", "p": 2, "k": 2, "poly": [1, 0, 1]})  # (x+1)^2


def test_default_irreducible():
    assert default_irreducible(2, 2) == (1, 1, 1)
    assert default_irreducible(3, 2) == (1, 0, 1)  # x^2 + 1 over F_3
    poly = default_irreducible(2, 3)
    assert len(poly) == 4 and poly[-1] == 1


def test_f8_f9_construct():
    F8 = make_ring("F8")
    F9 = make_ring("F9")
    assert len(F8.units) == 7
    assert len(F9.units) == 8


# ---------------------------------------------------------------------------
# canonical forms

@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3),
                min_size=1, max_size=4))
def test_howell_idempotent_and_membership(rows):
    canon = canonical_rowspace(Z4, rows)
    assert canonical_rowspace(Z4, canon) == canon
    # membership test agrees with brute-force span
    span = Submodule.from_rows(Z4, 3, rows).elements()
    for v in itertools.product(range(4), repeat=3):
        in_span = v in span
        assert (not any(reduce_vector(Z4, canon, v))) == in_span


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3),
                min_size=1, max_size=3))
def test_rref_idempotent_f3(rows):
    canon = canonical_rowspace(F3, rows)
    assert canonical_rowspace(F3, canon) == canon


def test_canonical_invariant_under_invertible_left_mult():
    # left-multiplying the generating matrix by an invertible U keeps the
    # row span, hence the canonical form
    gl2 = enumerate_gl(Z4, 2)
    rows = [[2, 1], [0, 2]]
    base = canonical_rowspace(Z4, rows)
    m = Mat(Z4, rows)
    for u in gl2:
        assert canonical_rowspace(Z4, u.mul(m).data) == base
    gl_f3 = enumerate_gl(F3, 2)
    rows_f = [[1, 2], [2, 1]]
    base_f = canonical_rowspace(F3, rows_f)
    mf = Mat(F3, rows_f)
    for u in gl_f3:
        assert canonical_rowspace(F3, u.mul(mf).data) == base_f


def test_canonical_equal_iff_equal_span():
    seen = {}
    for rows in itertools.product(itertools.product(range(4), repeat=2), repeat=2):
        sub = Submodule.from_rows(Z4, 2, [list(r) for r in rows])
        key = frozenset(sub.elements())
        if key in seen:
            assert seen[key] == sub.mat
        else:
            seen[key] = sub.mat


# ---------------------------------------------------------------------------
# submodules / splittability

def test_subspace_counts_match_gaussian_binomial():
    for (R, n) in ((F2, 2), (F2, 3), (F3, 2), (F4, 2), (F3, 3)):
        subs = enumerate_submodules(R, n)
        by_rank = {}
        for s in subs:
            by_rank[s.rank] = by_rank.get(s.rank, 0) + 1
        q = R.size
        for k in range(n + 1):
            assert by_rank.get(k, 0) == gaussian_binomial(n, k, q), (q, n, k)


def test_splittable_counts():
    assert len(enumerate_splittable_submodules(F2, 2)) == 5
    assert len(enumerate_splittable_submodules(F3, 2)) == 6
    assert len(enumerate_splittable_submodules(Z4, 2)) == 8


def test_splittable_agrees_with_complement_search():
    for R in (Z4, Z9):
        all_subs = enumerate_submodules(R, 2)
        for s in all_subs:
            assert is_splittable(s) == brute_force_complement_exists(s, all_subs), s


def test_splittable_examples():
    assert is_splittable(Submodule.from_rows(Z4, 2, [[1, 0]]))
    assert not is_splittable(Submodule.from_rows(Z4, 2, [[2, 0]]))
    assert is_splittable(Submodule.from_rows(F3, 2, [[1, 2]]))


# ---------------------------------------------------------------------------
# flags

def test_flag_counts():
    assert len(enumerate_flags(F2, 2)) == 4
    assert len(enumerate_flags(F2, 3)) == 36  # 1 + 7 + 7 + 21
    assert len(enumerate_flags(F4, 1)) == 1
    assert len(enumerate_flags(Z4, 2)) == 7


def test_flag_refinement_is_partial_order():
    flags = enumerate_flags(F2, 2)
    for f in flags:
        assert f.refines_to(f)
    empty = next(f for f in flags if not f.members)
    for f in flags:
        assert f.refines_to(empty)  # empty flag is the maximum
        if f.members and f != empty:
            assert not empty.refines_to(f)
    # antisymmetry + transitivity on the (F2,3) poset
    flags3 = enumerate_flags(F2, 3)
    rel = {(i, j) for i, f in enumerate(flags3) for j, g in enumerate(flags3)
           if f.refines_to(g)}
    for (i, j) in rel:
        if (j, i) in rel:
            assert i == j
        for k in range(len(flags3)):
            if (j, k) in rel:
                assert (i, k) in rel


def test_flag_lengths():
    flags = enumerate_flags(F2, 3)
    by_len = {}
    for f in flags:
        by_len[f.length] = by_len.get(f.length, 0) + 1
    assert by_len == {1: 1, 2: 14, 3: 21}


# ---------------------------------------------------------------------------
# quotient maps

def test_quotient_map_identity_on_zero():
    full = Submodule.full(F2, 2)
    sec, proj = quotient_map(Submodule.zero(F2, 2), full)
    assert len(sec) == 2
    for i, row in enumerate(sec):
        out = proj(row)
        assert out[i] == 1 and sum(1 for x in out if x) == 1


def test_quotient_map_kills_submodule():
    full = Submodule.full(F2, 2)
    s = Submodule.from_rows(F2, 2, [[1, 0]])
    sec, proj = quotient_map(s, full)
    assert proj((1, 0)) == (0,)
    assert len(sec) == 1


def test_quotient_map_projection_section_identity():
    full = Submodule.full(F3, 2)
    s = Submodule.from_rows(F3, 2, [[1, 1]])
    sec, proj = quotient_map(s, full)
    assert len(sec) == 1
    assert proj(sec[0]) == (1,)
    for v in s.elements():
        assert proj(v) == (0,)


def test_quotient_map_inside_proper_submodule():
    big = Submodule.from_rows(F2, 3, [[1, 0, 0], [0, 1, 0]])
    small = Submodule.from_rows(F2, 3, [[1, 1, 0]])
    sec, proj = quotient_map(small, big)
    assert len(sec) == 1
    assert proj(sec[0]) == (1,)
    assert proj((1, 1, 0)) == (0,)


def test_quotient_map_over_z4():
    big = Submodule.full(Z4, 2)
    s = Submodule.from_rows(Z4, 2, [[2, 1]])
    sec, proj = quotient_map(s, big)
    assert len(sec) == 1
    assert proj(sec[0]) == (1,)
    for v in s.elements():
        assert proj(v) == (0,)


def test_complete_to_invertible():
    ext, inv = complete_to_invertible(Z4, [(2, 1)], 2)
    assert ext.mul(inv) == Mat.identity(Z4, 2)
    ext2, _ = complete_to_invertible(F3, [(1, 2), (0, 1)], 2)
    assert ext2.rows == 2


# ---------------------------------------------------------------------------
# GL enumeration

def test_gl_orders_against_formula():
    for (R, n) in ((F2, 2), (F3, 2), (F2, 3)):
        got = enumerate_gl(R, n)
        assert len(got) == gl_order(R.size, n)
        assert len(got) == len(set(m.data for m in got))


def test_gl_f4():
    assert len(enumerate_gl(F4, 2)) == gl_order(4, 2) == 180


def test_gl_z4():
    gl = enumerate_gl(Z4, 2)
    assert len(gl) == 96
    # closed under product and inverse
    gl_set = {m.data for m in gl}
    for m in gl[:10]:
        assert m.inverse().data in gl_set
        for m2 in gl[:10]:
            assert m.mul(m2).data in gl_set


def test_gl_generator_closure_matches():
    for (R, n) in ((F2, 2), (F3, 2), (Z4, 2), (F2, 3)):
        brute = enumerate_gl(R, n)
        closed = gl_from_generators(R, n)
        assert [m.data for m in brute] == [m.data for m in closed]


def test_gl_zero_module():
    gl = enumerate_gl(F2, 0)
    assert len(gl) == 1  # the trivial group


def test_gl_guard():
    tight = GuardConfig(max_gl_candidates=10)
    with pytest.raises(GuardExceeded):
        enumerate_gl(F3, 2, guards=tight)


def test_mat_inverse():
    m = Mat(F3, [[1, 1], [0, 1]])
    assert m.mul(m.inverse()) == Mat.identity(F3, 2)
    mz = Mat(Z4, [[1, 2], [0, 3]])
    assert mz.mul(mz.inverse()) == Mat.identity(Z4, 2)
    with pytest.raises(RingError):
        Mat(Z4, [[2, 0], [0, 1]]).inverse()
