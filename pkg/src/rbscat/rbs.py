"""Categories of splittable flags over a finite ring.

For a finite commutative local ring or field R and M = R^n, the flag
category has objects the splittable flags of submodules of M and
Hom(F, F') = {g in GL(M) : gF <= F'} / U_F, where U_F is the subgroup of
the flag stabiliser P_F acting as the identity on every graded piece and
<= is the refinement order (the empty flag is the maximum).  Composition
is induced by group multiplication; morphisms are stored as canonical
minimal coset representatives so equality and composition are table
lookups.

Also here: the flag poset with its GL action, the action category
GL\\\\P with the comparison functor to the flag category, the subgroup
E(M) generated by all U_F with the determinant cross-check, Tits
buildings with their top homology ranks, and the blockwise decomposition
of the subcategory under a fixed flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import (
    FinFunctor,
    Group,
    Poset,
    action_category,
    full_subcategory,
    is_fully_faithful,
    is_isomorphism_of_categories,
    product_tuple,
    validate_category,
)
from .guards import DEFAULT
from .homology import chain_complex_from_facets, homology
from .rings import (
    Mat,
    QuotientData,
    Submodule,
    enumerate_flags,
    enumerate_gl,
    enumerate_submodules,
    make_ring,
)


class GLData:
    """GL(R^n) with integer-indexed multiplication tables."""

    def __init__(self, ring, n, guards=DEFAULT):
        self.ring = ring
        self.n = n
        self.mats = enumerate_gl(ring, n, guards)
        self.index = {m.data: i for i, m in enumerate(self.mats)}
        size = len(self.mats)
        guards.check(size, "max_group_order", "GL table")
        self.mult = [[0] * size for _ in range(size)]
        for i, a in enumerate(self.mats):
            for j, b in enumerate(self.mats):
                self.mult[i][j] = self.index[a.mul(b).data]
        ident = Mat.identity(ring, n)
        self.one = self.index[ident.data]
        self.inv = [0] * size
        for i in range(size):
            self.inv[i] = next(j for j in range(size)
                               if self.mult[i][j] == self.one)

    def __len__(self):
        return len(self.mats)

    def group(self):
        """As a generic Group on matrix-data labels."""
        return Group([m.data for m in self.mats],
                     lambda a, b: self.mats[self.mult[self.index[a]][self.index[b]]].data,
                     self.mats[self.one].data)


@dataclass
class SubgroupData:
    """P_F, U_F per flag, and the subgroup generated by all U_F."""

    parabolic: dict       # flag index -> sorted tuple of g indices
    unipotent: dict       # flag index -> sorted tuple of g indices
    e_group: tuple        # sorted g indices of <U_F : F>
    det_one: tuple        # sorted g indices with det = 1 (cross-check)


class RBSCategory:
    """The flag category together with its construction data."""

    def __init__(self, ring, n, guards=DEFAULT, well_definedness="sampled"):
        self.ring = ring
        self.n = n
        self.guards = guards
        self.flags = enumerate_flags(ring, n, guards)
        self.flag_index = {f: i for i, f in enumerate(self.flags)}
        self.gl = GLData(ring, n, guards)
        self._build_action()
        self._build_subgroups()
        self._build_category(well_definedness)

    # -- group action on flags -------------------------------------------

    def _build_action(self):
        gl, flags = self.gl, self.flags
        sub_transform = {}
        self.flag_act = [[0] * len(flags) for _ in range(len(gl))]
        for gi, g in enumerate(gl.mats):
            for fi, f in enumerate(flags):
                members = []
                for m in f.members:
                    key = (gi, m)
                    if key not in sub_transform:
                        sub_transform[key] = m.transform(g)
                    members.append(sub_transform[key])
                members.sort(key=Submodule.sort_key)
                image = f.__class__(self.ring, self.n, tuple(members))
                self.flag_act[gi][fi] = self.flag_index[image]

    def refines(self, fi, fj):
        """Refinement order: fi <= fj iff members(fj) subset of members(fi)."""
        return self.flags[fi].refines_to(self.flags[fj])

    # -- parabolic and unipotent subgroups --------------------------------

    def _build_subgroups(self):
        gl, flags = self.gl, self.flags
        self.parabolic = {}
        self.unipotent = {}
        self._quotients = {}
        for fi, f in enumerate(flags):
            chain = f.full_chain()
            quots = [QuotientData(chain[i], chain[i + 1])
                     for i in range(len(chain) - 1)]
            self._quotients[fi] = quots
            pf = [gi for gi in range(len(gl)) if self.flag_act[gi][fi] == fi]
            uf = []
            for gi in pf:
                g = gl.mats[gi]
                if all(self._acts_as_identity(g, q) for q in quots):
                    uf.append(gi)
            self.parabolic[fi] = tuple(pf)
            self.unipotent[fi] = tuple(sorted(uf))

    @staticmethod
    def _acts_as_identity(g, quot):
        for row in quot.section_rows:
            if quot.project(g.mul_vec(row)) != quot.project(row):
                return False
        return True

    # -- morphisms ---------------------------------------------------------

    def coset_min(self, fi, gi):
        """Canonical representative index of the coset g U_{F_i}."""
        key = (fi, gi)
        cached = self._coset_cache.get(key)
        if cached is None:
            mult = self.gl.mult[gi]
            cached = min(mult[u] for u in self.unipotent[fi])
            self._coset_cache[key] = cached
        return cached

    def _build_category(self, well_definedness):
        gl, flags = self.gl, self.flags
        nf = len(flags)
        self._coset_cache = {}
        morphs = []
        comp = {}
        idents = {}
        hom_reps = {}
        for fi in range(nf):
            for gi in range(len(gl)):
                tj = self.flag_act[gi][fi]
                rep = self.coset_min(fi, gi)
                for fj in range(nf):
                    if self.refines(tj, fj):
                        hom_reps.setdefault((fi, fj), set()).add(rep)
        for (fi, fj), reps in sorted(hom_reps.items()):
            for rep in sorted(reps):
                morphs.append(((fi, fj, rep), fi, fj))
        for fi in range(nf):
            idents[fi] = (fi, fi, self.coset_min(fi, gl.one))
        by_src = {}
        for (lbl, s, t) in morphs:
            by_src.setdefault(s, []).append(lbl)
        for (lbl1, s1, t1) in morphs:
            for lbl2 in by_src.get(t1, ()):
                _, t2, h = lbl2
                comp[(lbl2, lbl1)] = (s1, t2, self.coset_min(s1, gl.mult[h][lbl1[2]]))
        self.cat = validate_category(list(range(nf)), morphs, idents, comp,
                                     guards=self.guards, assoc="auto")
        self._check_well_definedness(well_definedness)

    def _check_well_definedness(self, mode):
        """All representative products of a composable coset pair land in one
        coset (guaranteed by U_{F'} <= g U_F g^{-1}; asserted here)."""
        if mode == "none":
            return
        gl = self.gl
        pairs = [((fi, fj, g), (fj2, fk, h))
                 for (fi, fj, g) in self.morphism_labels()
                 for (fj2, fk, h) in self.morphism_labels() if fj == fj2]
        if mode == "sampled":
            pairs = pairs[::max(1, len(pairs) // 500)]
        for (fi, fj, g), (_, fk, h) in pairs:
            expected = self.coset_min(fi, gl.mult[h][g])
            for u in self.unipotent[fi]:
                gu = gl.mult[g][u]
                for v in self.unipotent[fj]:
                    hv = gl.mult[h][v]
                    assert self.coset_min(fi, gl.mult[hv][gu]) == expected, \
                        "coset composition depends on representatives"

    def morphism_labels(self):
        return self.cat.mor_labels

    def hom_size(self, fi, fj):
        return len(self.cat.hom(fi, fj))

    def aut_size(self, fi):
        return self.hom_size(fi, fi)

    def transporter_size(self, fi, fj):
        gl = self.gl
        return sum(1 for gi in range(len(gl))
                   if self.refines(self.flag_act[gi][fi], fj))

    @property
    def empty_flag_index(self):
        return next(i for i, f in enumerate(self.flags) if not f.members)

    def graded_dims(self, fi):
        """Free ranks of the graded pieces of the flag."""
        return tuple(q.quotient_rank for q in self._quotients[fi])


def build_rbs(ring_spec, n, guards=DEFAULT, well_definedness="sampled"):
    ring = make_ring(ring_spec, guards)
    return RBSCategory(ring, n, guards, well_definedness)


# ---------------------------------------------------------------------------
# flag poset, GL action, action category

def flag_poset(rbs):
    """Poset of splittable flags under refinement ([empty] is the maximum)."""
    n = len(rbs.flags)
    pairs = [(i, j) for i in range(n) for j in range(n) if rbs.refines(i, j)]
    return Poset(list(range(n)), pairs)


def gl_action(rbs):
    """(Group, Poset, action) triple for the GL action on the flag poset."""
    P = flag_poset(rbs)
    G = Group(list(range(len(rbs.gl))),
              lambda a, b: rbs.gl.mult[a][b], rbs.gl.one)

    def act(gi, fi):
        return rbs.flag_act[gi][fi]

    return G, P, act


def gl_flag_action_category(rbs):
    """The action category GL\\\\P of the GL action on the flag poset."""
    G, P, act = gl_action(rbs)
    return action_category(G, P, act)


def comparison_functor(rbs, action_cat=None):
    """p: GL\\\\P -> flag category; identity on objects, g -> its coset."""
    if action_cat is None:
        action_cat = gl_flag_action_category(rbs)
    obj_map = {p: p for p in action_cat.objects}
    mor_map = {}
    for (g, p, pp) in action_cat.mor_labels:
        mor_map[(g, p, pp)] = (p, pp, rbs.coset_min(p, g))
    return FinFunctor(action_cat, rbs.cat, obj_map, mor_map)


def bgl_category(rbs):
    """One-object category B(GL(M)) and its inclusion at the empty flag."""
    e = rbs.empty_flag_index
    sub, incl = full_subcategory(rbs.cat, [e])
    return sub, incl


def comparison_iso_over_bgl(rbs, p):
    """The comparison functor restricted over the empty flag is an
    isomorphism onto B(GL(M)) (the full subcategory on the empty flag)."""
    e = rbs.empty_flag_index
    src_sub, _ = full_subcategory(p.source, [e])
    tgt_sub, _ = full_subcategory(p.target, [e])
    restricted = FinFunctor(src_sub, tgt_sub,
                            {e: p.obj_map[e]},
                            {m: p.mor_map[m] for m in src_sub.mor_labels})
    return is_isomorphism_of_categories(restricted)


# ---------------------------------------------------------------------------
# E(M) and pi_1 target

def compute_e_group(rbs):
    """E(M) = multiplicative closure of all U_F; with det = 1 cross-check."""
    gl = rbs.gl
    gens = sorted({u for uf in rbs.unipotent.values() for u in uf})
    seen = set(gens) | {gl.one}
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for b in gens:
                c = gl.mult[a][b]
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    det_one = tuple(sorted(i for i, m in enumerate(gl.mats) if m.det() == 1))
    return SubgroupData(
        parabolic=dict(rbs.parabolic),
        unipotent=dict(rbs.unipotent),
        e_group=tuple(sorted(seen)),
        det_one=det_one)


def pi1_target(rbs, subgroups=None):
    """GL(M)/E(M) as a finite group with multiplication table."""
    if subgroups is None:
        subgroups = compute_e_group(rbs)
    gl = rbs.gl
    e_set = set(subgroups.e_group)
    cosets = {}
    rep_of = {}
    for gi in range(len(gl)):
        rep = min(gl.mult[gi][e] for e in e_set)
        rep_of[gi] = rep
        cosets.setdefault(rep, []).append(gi)
    reps = sorted(cosets)
    mult = {(a, b): rep_of[gl.mult[a][b]] for a in reps for b in reps}
    return Group(reps, lambda a, b: mult[(a, b)], rep_of[gl.one])


def pi1_quotient_functor(rbs, subgroups=None):
    """The functor from the flag category to B(GL/E) sending every flag to
    the basepoint and a coset g U_F to the class of g.

    Well-defined because every U_F lies in E; validated as a functor and
    surjective on morphisms (so the induced map on fundamental groups is
    onto the quotient).
    """
    from .fincat import group_category
    if subgroups is None:
        subgroups = compute_e_group(rbs)
    gl = rbs.gl
    e_set = set(subgroups.e_group)
    quotient = pi1_target(rbs, subgroups)
    B = group_category(quotient)
    rep_of = {gi: min(gl.mult[gi][e] for e in e_set) for gi in range(len(gl))}
    obj_map = {o: "*" for o in rbs.cat.objects}
    mor_map = {}
    for (fi, fj, g) in rbs.cat.mor_labels:
        # independence of the coset representative: all of gU_F maps to gE
        classes = {rep_of[gl.mult[g][u]] for u in rbs.unipotent[fi]}
        assert len(classes) == 1, "U_F is not contained in E(M)"
        mor_map[(fi, fj, g)] = ("*", classes.pop())
    functor = FinFunctor(rbs.cat, B, obj_map, mor_map)
    surjective = {mor_map[m] for m in rbs.cat.mor_labels} == set(B.mor_labels)
    return functor, surjective


# ---------------------------------------------------------------------------
# Tits building

@dataclass
class TitsComplex:
    q: int
    n: int
    vertex_count: int
    simplex_counts: list
    complex: object
    homology_z: object
    steinberg_rank: int
    euler_characteristic: int


def tits_building(q, n, guards=DEFAULT):
    """Order complex of proper nonzero subspaces of F_q^n.

    The top reduced homology has rank q^{n(n-1)/2} (a wedge of
    (n-2)-spheres); the rank is computed and asserted, not assumed.
    """
    if n < 2:
        raise ValueError("the building needs n >= 2")
    ring = make_ring("F%d" % q, guards)
    subs = [s for s in enumerate_submodules(ring, n, guards)
            if 0 < s.rank < n]
    index = {s: i for i, s in enumerate(subs)}
    facets = []

    def extend(chain):
        extended = False
        for s in subs:
            if chain[-1] < s:
                extend(chain + [s])
                extended = True
        if not extended:
            facets.append(tuple(index[x] for x in chain))

    for s in subs:
        if not any(t < s for t in subs):
            extend([s])
    cx = chain_complex_from_facets(facets)
    hz = homology(cx, "Z")
    top = n - 2
    reduced_top = hz.betti.get(top, 0) - (1 if top == 0 else 0)
    expected = q ** (n * (n - 1) // 2)
    assert reduced_top == expected, \
        "Steinberg rank %d != q^(n(n-1)/2) = %d" % (reduced_top, expected)
    chi = sum((-1) ** k * d for k, d in enumerate(cx.dims))
    assert chi == 1 + (-1) ** n * expected
    return TitsComplex(q, n, len(subs), list(cx.dims), cx, hz,
                       reduced_top, chi)


def steinberg_rank(q, n, guards=DEFAULT):
    return tits_building(q, n, guards).steinberg_rank


# ---------------------------------------------------------------------------
# inductive decomposition under a flag

@dataclass
class InductiveDecomposition:
    flag_index: int
    le_subcategory: object        # full subcat on objects admitting a map to F
    refinement_subcategory: object
    graded_cats: list             # RBSCategory per graded piece
    functor: object               # refinement subcat -> product of graded cats
    is_isomorphism: bool
    inclusion_is_equivalence: bool


def inductive_decomposition(rbs, fi, guards=DEFAULT):
    """Blockwise description of the subcategory under the flag F_i.

    The full subcategory on objects admitting a map to F deformation
    retracts onto the full subcategory on refinements of F, and the
    latter is isomorphic to the product of the flag categories of the
    graded pieces of F (morphisms decompose blockwise through P_F).
    """
    cat = rbs.cat
    nf = len(rbs.flags)
    # objects admitting a map to F
    le_objs = [gj for gj in range(nf) if cat.hom(gj, fi)]
    le_sub, _ = full_subcategory(cat, le_objs)
    # refinements of F (members contain members(F))
    ref_objs = [gj for gj in range(nf) if rbs.refines(gj, fi)]
    ref_sub, ref_incl = full_subcategory(cat, ref_objs)

    quots = rbs._quotients[fi]
    dims = rbs.graded_dims(fi)
    graded = [RBSCategory(rbs.ring, d, guards) for d in dims]
    # object map: refinement G -> tuple of graded flags
    obj_map = {}
    piece_flag_idx = {}
    for gj in ref_objs:
        pieces = _graded_flags(rbs, gj, fi, quots, graded)
        piece_flag_idx[gj] = pieces
        obj_map[gj] = tuple(pieces)
    # morphism map: g U_G -> blockwise (g_i U_{G_i})
    mor_map = {}
    for lbl in ref_sub.mor_labels:
        (src, tgt, rep) = lbl
        g = rbs.gl.mats[rep]
        assert rbs.flag_act[rep][fi] == fi, \
            "transporter between refinements must stabilise the flag"
        piece_labels = []
        for i, q in enumerate(quots):
            gm = _block_matrix(rbs, g, q, graded[i].ring)
            gi_idx = graded[i].gl.index[gm.data]
            src_piece = piece_flag_idx[src][i]
            tgt_piece = piece_flag_idx[tgt][i]
            rep_piece = graded[i].coset_min(src_piece, gi_idx)
            piece_labels.append((src_piece, tgt_piece, rep_piece))
        mor_map[lbl] = tuple(piece_labels)
    prod = product_tuple([g.cat for g in graded])
    functor = FinFunctor(ref_sub, prod, obj_map, mor_map)
    iso = is_isomorphism_of_categories(functor)
    # the inclusion of refinements into the <=[F] subcategory is an equivalence
    incl_ok = is_fully_faithful(ref_incl_to_le(rbs, ref_objs, le_objs, le_sub, ref_sub)) \
        and _essentially_surjective_on_le(rbs, fi, le_objs, ref_objs, le_sub)
    return InductiveDecomposition(fi, le_sub, ref_sub, graded, functor,
                                  iso, incl_ok)


def ref_incl_to_le(rbs, ref_objs, le_objs, le_sub, ref_sub):
    obj_map = {o: o for o in ref_objs}
    mor_map = {m: m for m in ref_sub.mor_labels}
    return FinFunctor(ref_sub, le_sub, obj_map, mor_map)


def _essentially_surjective_on_le(rbs, fi, le_objs, ref_objs, le_sub):
    """Every object with a map to F is isomorphic to a refinement of F."""
    ref_set = set(ref_objs)
    for gj in le_objs:
        if gj in ref_set:
            continue
        if not any(rbs.flag_act[gi][gj] in ref_set for gi in range(len(rbs.gl))):
            return False
    return True


def _graded_flags(rbs, gj, fi, quots, graded):
    """Image flags of G in the graded pieces of F (G refines F)."""
    G = rbs.flags[gj]
    F = rbs.flags[fi]
    chain = F.full_chain()
    out = []
    for i, q in enumerate(quots):
        lower, upper = chain[i], chain[i + 1]
        members = []
        for m in G.members:
            if lower < m and m < upper:
                rows = [q.project(r) for r in m.free_basis()]
                sub = Submodule.from_rows(graded[i].ring, q.quotient_rank, rows)
                members.append(sub)
        members.sort(key=Submodule.sort_key)
        flag = rbs.flags[0].__class__(graded[i].ring, q.quotient_rank,
                                      tuple(members))
        out.append(graded[i].flag_index[flag])
    return out


def _block_matrix(rbs, g, quot, ring):
    """Matrix of the action induced by g on a graded piece, in the
    deterministic complement coordinates (column-vector convention)."""
    images = [quot.project(g.mul_vec(r)) for r in quot.section_rows]
    d = len(quot.section_rows)
    return Mat(ring, [[images[j][i] for j in range(d)] for i in range(d)], cols=d)
