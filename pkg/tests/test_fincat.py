import pytest

from rbscat.fincat import (
    CategoryError,
    Group,
    Poset,
    action_category,
    check_poset_regularity,
    full_subcategory,
    group_category,
    identity_functor,
    is_equivalence,
    is_fully_faithful,
    is_isomorphism_of_categories,
    left_fiber,
    opposite,
    poset_category,
    poset_quotient,
    product,
    product_tuple,
    skeleton,
    strict_fiber,
    terminal_category,
    twisted_arrow_op,
    validate_category,
)
from rbscat.toolkit import (
    is_colim_equivalence,
    is_lim_equivalence,
    is_proper,
    is_weakly_contractible,
)


def chain_category():
    P = Poset([0, 1], [(0, 0), (1, 1), (0, 1)])
    return poset_category(P)


def bz(k):
    G = Group(list(range(k)), lambda a, b: (a + b) % k, 0)
    return group_category(G)


# ---------------------------------------------------------------------------
# validation

def test_terminal_category():
    T = terminal_category()
    assert T.n_objects == 1 and T.n_morphisms == 1


def test_poset_as_category():
    C = chain_category()
    assert C.n_morphisms == 3


def test_broken_associativity_is_reported():
    # one object, three morphisms e, a, b with a.a = b, a.b = b.a = e, b.b = a
    # but deliberately break one entry
    comp = {
        ("e", "e"): "e", ("e", "a"): "a", ("e", "b"): "b",
        ("a", "e"): "a", ("b", "e"): "b",
        ("a", "a"): "b", ("a", "b"): "e", ("b", "a"): "e",
        ("b", "b"): "e",  # should be "a" for Z/3
    }
    with pytest.raises(CategoryError, match="associativity"):
        validate_category(["*"], [(m, "*", "*") for m in "eab"],
                          {"*": "e"}, comp)


def test_missing_identity_is_reported():
    with pytest.raises(CategoryError, match="identity"):
        validate_category(["*"], [("f", "*", "*")], {}, {("f", "f"): "f"})


def test_missing_composite_is_reported():
    with pytest.raises(CategoryError, match="missing"):
        validate_category(["*"], [("e", "*", "*"), ("f", "*", "*")],
                          {"*": "e"},
                          {("e", "e"): "e", ("e", "f"): "f", ("f", "e"): "f"})


# ---------------------------------------------------------------------------
# calculus

def test_opposite_involutive():
    C = chain_category()
    assert opposite(opposite(C)).objects == C.objects
    assert opposite(C).hom(1, 0) == [2] or len(opposite(C).hom(1, 0)) == 1


def test_product_with_terminal():
    C = chain_category()
    P = product(C, terminal_category())
    assert P.n_objects == C.n_objects and P.n_morphisms == C.n_morphisms


def test_product_tuple_three_factors():
    T = terminal_category()
    C = chain_category()
    P = product_tuple([C, T, T])
    assert P.n_objects == 2 and P.n_morphisms == 3


def test_full_subcategory_inclusion_fully_faithful():
    C = chain_category()
    sub, incl = full_subcategory(C, [0])
    assert sub.n_morphisms == 1
    assert is_fully_faithful(incl)


def test_isomorphism_detection():
    C = chain_category()
    F = identity_functor(C)
    assert is_isomorphism_of_categories(F)
    assert is_equivalence(F)


def test_skeleton_collapses_indiscrete():
    # indiscrete category on 3 objects: unique morphism between any pair
    objs = list(range(3))
    morphs = [((a, b), a, b) for a in objs for b in objs]
    comp = {(((b, c)), ((a, b))): (a, c)
            for a in objs for b in objs for c in objs}
    idents = {a: (a, a) for a in objs}
    C = validate_category(objs, morphs, idents, comp)
    S = skeleton(C)
    assert S.n_objects == 1 and S.n_morphisms == 1


# ---------------------------------------------------------------------------
# fibers

def test_left_fiber_of_identity_has_terminal():
    C = chain_category()
    lf = left_fiber(identity_functor(C), 1)
    assert lf.has_terminal_object() is not None


def test_left_fiber_can_be_empty():
    C = chain_category()
    sub, incl = full_subcategory(C, [1])
    lf = left_fiber(incl, 0)
    assert lf.n_objects == 0


def test_strict_fiber_inclusion():
    C = chain_category()
    fib, rf, incl = strict_fiber(identity_functor(C), 1)
    assert fib.n_objects == 1
    # right fiber over 1: objects (c, m: 1 -> c), and only c = 1 receives
    assert rf.n_objects == 1
    fib0, rf0, incl0 = strict_fiber(identity_functor(C), 0)
    assert rf0.n_objects == 2  # (0, id) and (1, 0->1)


def test_proper_iff_left_closed_for_full_inclusions():
    C = chain_category()
    sub1, incl1 = full_subcategory(C, [1])
    sub0, incl0 = full_subcategory(C, [0])
    assert not is_proper(incl1, 3).ok   # {1} is not left closed in {0<1}
    assert is_proper(incl0, 3).ok       # {0} is a sieve


def test_groupoid_target_functors_are_proper():
    B = bz(2)
    F = identity_functor(B)
    assert is_proper(F, 3).ok


def test_left_adjoint_is_lim_equivalence():
    # the inclusion of the initial object {0} -> {0<1} is left adjoint to
    # the constant functor, hence a lim-equivalence: every left fiber has
    # a terminal object
    C = chain_category()
    sub, incl = full_subcategory(C, [0])
    assert is_lim_equivalence(incl, 3).ok
    # whereas the non-initial inclusion has an empty left fiber over 0
    sub1, incl1 = full_subcategory(C, [1])
    assert not is_lim_equivalence(incl1, 3).ok


# ---------------------------------------------------------------------------
# twisted arrows

def test_twisted_arrow_counts():
    C = chain_category()
    tw, proj = twisted_arrow_op(C)
    assert tw.n_objects == 3
    assert tw.n_morphisms == 5
    T = terminal_category()
    twt, _ = twisted_arrow_op(T)
    assert twt.n_objects == 1 and twt.n_morphisms == 1
    B = bz(2)
    twb, projb = twisted_arrow_op(B)
    assert twb.n_objects == 2


def test_twisted_projection_cofinal():
    for C in (terminal_category(), chain_category(), bz(2), bz(3)):
        tw, proj = twisted_arrow_op(C)
        assert is_colim_equivalence(proj, 3).ok


# ---------------------------------------------------------------------------
# actions, quotients

def test_action_category_trivial_group():
    P = Poset([0, 1], [(0, 0), (1, 1), (0, 1)])
    G = Group(["e"], lambda a, b: "e", "e")
    A = action_category(G, P, lambda g, p: p)
    assert A.n_objects == 2 and A.n_morphisms == 3


def test_action_category_rejects_non_automorphisms():
    P = Poset([0, 1], [(0, 0), (1, 1), (0, 1)])
    G = Group([0, 1], lambda a, b: (a + b) % 2, 0)
    swap = lambda g, p: p if g == 0 else 1 - p
    with pytest.raises(CategoryError):
        action_category(G, P, swap)  # swapping 0<1 breaks the order


def test_poset_quotient_regular_swap():
    P = Poset(["a", "b"], [("a", "a"), ("b", "b")])
    G = Group([0, 1], lambda a, b: (a + b) % 2, 0)
    swap = lambda g, p: p if g == 0 else ("b" if p == "a" else "a")
    assert check_poset_regularity(G, P, swap) is None
    Q, cls = poset_quotient(G, P, swap)
    assert len(Q) == 1


def test_poset_quotient_regularity_violation():
    # Z/2 acting on {a < b, b' } with a fixed, swapping b and c where a<b, a<c
    # build instead: action sending x to a strictly larger element
    P = Poset([0, 1], [(0, 0), (1, 1), (0, 1)])
    G = Group([0, 1], lambda a, b: (a + b) % 2, 0)
    # a non-automorphism cannot be used; use a 3-chain with a middle swap
    P3 = Poset(["a", "b1", "b2"],
               [("a", "a"), ("b1", "b1"), ("b2", "b2"),
                ("a", "b1"), ("a", "b2")])
    swap = lambda g, p: p if g == 0 or p == "a" else ("b2" if p == "b1" else "b1")
    assert check_poset_regularity(G, P3, swap) is None
    Q, cls = poset_quotient(G, P3, swap)
    assert len(Q) == 2
    assert Q.leq(cls["a"], cls["b1"])


# ---------------------------------------------------------------------------
# contractibility certificates

def test_terminal_object_contractible_any_depth():
    C = chain_category()
    for depth in (1, 2, 5):
        assert is_weakly_contractible(C, depth).ok


def test_discrete_two_objects_not_contractible():
    C = validate_category(
        ["a", "b"], [("ia", "a", "a"), ("ib", "b", "b")],
        {"a": "ia", "b": "ib"}, {("ia", "ia"): "ia", ("ib", "ib"): "ib"})
    cert = is_weakly_contractible(C, 3)
    assert cert.verdict == "not-contractible"


def test_bz2_not_contractible():
    cert = is_weakly_contractible(bz(2), 3)
    assert cert.verdict == "not-contractible"


def test_empty_category_not_contractible():
    C = validate_category([], [], {}, {})
    assert not is_weakly_contractible(C, 2).ok
