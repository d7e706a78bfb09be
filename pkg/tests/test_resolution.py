import itertools

import pytest

from rbscat.fincat import Group, Poset, group_category, poset_category, terminal_category
from rbscat.homology import homology, nerve_chain_complex
from rbscat.resolution import category_homology_mod, kernel_mod, rank_mod_dense

import numpy as np


def bz(k):
    return group_category(Group(list(range(k)), lambda a, b: (a + b) % k, 0))


def bs3():
    perms = list(itertools.permutations(range(3)))
    S3 = Group(perms, lambda a, b: tuple(a[b[i]] for i in range(3)), (0, 1, 2))
    return group_category(S3)


def hexagon_circle():
    els = ["v1", "v2", "v3", "e1", "e2", "e3"]
    pairs = [(x, x) for x in els] + \
        [("v1", "e1"), ("v2", "e1"), ("v2", "e2"), ("v3", "e2"),
         ("v3", "e3"), ("v1", "e3")]
    return poset_category(Poset(els, pairs))


def test_kernel_mod():
    M = np.array([[1, 1, 0], [0, 0, 1]], dtype=np.int64)
    K = kernel_mod(M, 2)
    assert K.shape[0] == 1
    assert ((M @ K.T) % 2 == 0).all()
    assert rank_mod_dense(M, 2) == 2


def test_point_and_interval():
    assert category_homology_mod(terminal_category(), 2, 3) == [1, 0, 0, 0]
    P = poset_category(Poset([0, 1], [(0, 0), (1, 1), (0, 1)]))
    assert category_homology_mod(P, 3, 3) == [1, 0, 0, 0]


def test_circle_over_primes():
    C = hexagon_circle()
    for ell in (2, 3, 5):
        assert category_homology_mod(C, ell, 2) == [1, 1, 0]


def test_group_homology_bz2_bz3():
    assert category_homology_mod(bz(2), 2, 5) == [1, 1, 1, 1, 1, 1]
    assert category_homology_mod(bz(3), 3, 5) == [1, 1, 1, 1, 1, 1]
    assert category_homology_mod(bz(3), 2, 3) == [1, 0, 0, 0]
    # Z/4 over F2: also all ones
    assert category_homology_mod(bz(4), 2, 4) == [1, 1, 1, 1, 1]


def test_bs3_classical_patterns():
    assert category_homology_mod(bs3(), 2, 4) == [1, 1, 1, 1, 1]
    assert category_homology_mod(bs3(), 3, 4) == [1, 0, 0, 1, 1]


def test_agreement_with_nerve_on_corpus():
    cats = [terminal_category(), bz(2), bz(3), hexagon_circle()]
    for C in cats:
        cx = nerve_chain_complex(C, 4)
        for ell in (2, 3):
            direct = homology(cx, "F%d" % ell)
            resolved = category_homology_mod(C, ell, 3)
            for k in range(4):
                assert direct.betti[k] == resolved[k], (C, ell, k)


def test_disconnected_category():
    C = poset_category(Poset(["a", "b"], [("a", "a"), ("b", "b")]))
    assert category_homology_mod(C, 2, 2) == [2, 0, 0]


@pytest.mark.slow
def test_agreement_with_nerve_gl2f3():
    # deep cross-check on a group algebra of order 48 (runs ~2 min)
    from rbscat.rings import make_ring, enumerate_gl, Mat
    from rbscat.guards import GuardConfig
    F3 = make_ring("F3")
    gl = enumerate_gl(F3, 2)
    mats = {m.data: m for m in gl}
    G = Group([m.data for m in gl], lambda a, b: mats[a].mul(mats[b]).data,
              Mat.identity(F3, 2).data)
    BG = group_category(G)
    cx = nerve_chain_complex(BG, 3, GuardConfig(max_simplices_per_degree=200000))
    direct = homology(cx, "F2")
    resolved = category_homology_mod(BG, 2, 2)
    assert [direct.betti[k] for k in range(3)] == resolved
