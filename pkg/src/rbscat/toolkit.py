"""Depth-bounded contractibility, limit-equivalence and properness checks.

Contractibility of a finite category is necessarily certified only up to
a depth: the certificate records connectivity, vanishing of reduced
integer homology through degree D-1, and triviality of the edge-path
group under budgeted Tietze simplification.  A functor is a
lim-equivalence (up to depth D) when all its left fibers are weakly
contractible; it is proper when, over every target object, the inclusion
of the strict fiber into the right fiber is a lim-equivalence.  Dually, a
colim-equivalence has weakly contractible right fibers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import left_fiber, right_fiber, strict_fiber, skeleton
from .guards import DEFAULT
from .homology import homology, nerve_chain_complex
from .presentation import pi1_presentation, tietze_trivial


@dataclass
class ContractibilityCertificate:
    verdict: str               # "contractible" | "not-contractible" | "inconclusive"
    depth: int
    connected: bool = False
    reduced_betti: dict = field(default_factory=dict)
    torsion: dict = field(default_factory=dict)
    pi1_trivial: object = None  # True / False / None
    witness: str = ""

    @property
    def ok(self):
        return self.verdict == "contractible"


def is_weakly_contractible(C, depth=3, guards=DEFAULT):
    """Certificate that |C| is contractible through the stated depth.

    The category is first replaced by a skeleton (an equivalence, so the
    homotopy type is unchanged); a terminal or initial object settles the
    question at every depth, otherwise reduced integer nerve homology
    through depth-1 plus a Tietze run on the edge-path group decide.
    """
    if C.n_objects == 0:
        return ContractibilityCertificate("not-contractible", depth,
                                          witness="empty category")
    C = skeleton(C)
    if C.has_terminal_object() is not None or C.has_initial_object() is not None:
        # a cone point contracts the nerve at every depth
        return ContractibilityCertificate("contractible", depth, connected=True,
                                          pi1_trivial=True,
                                          witness="terminal or initial object")
    if not C.is_connected():
        return ContractibilityCertificate("not-contractible", depth,
                                          witness="disconnected")
    cx = nerve_chain_complex(C, depth, guards)
    h = homology(cx, "Z")
    reduced = {k: (h.betti[k] - 1 if k == 0 else h.betti[k]) for k in h.betti}
    for k in sorted(reduced):
        if reduced[k] != 0 or h.torsion.get(k):
            return ContractibilityCertificate(
                "not-contractible", depth, connected=True, reduced_betti=reduced,
                torsion=h.torsion,
                witness="reduced H_%d nonzero" % k)
    pres = pi1_presentation(C)
    triv = tietze_trivial(pres, guards.tietze_budget)
    if triv is False:
        return ContractibilityCertificate(
            "not-contractible", depth, connected=True, reduced_betti=reduced,
            torsion=h.torsion, pi1_trivial=False, witness="pi1 nontrivial")
    verdict = "contractible" if triv else "inconclusive"
    return ContractibilityCertificate(verdict, depth, connected=True,
                                      reduced_betti=reduced, torsion=h.torsion,
                                      pi1_trivial=triv,
                                      witness="" if triv else "Tietze budget exhausted")


@dataclass
class FiberwiseVerdict:
    ok: bool
    depth: int
    per_object: dict
    failure: object = None

    @property
    def inconclusive(self):
        return not self.ok and self.failure is None


def is_lim_equivalence(F, depth=3, guards=DEFAULT):
    """All left fibers weakly contractible up to the depth."""
    return _fiber_check(F, depth, guards, side="left")


def is_colim_equivalence(F, depth=3, guards=DEFAULT):
    """All right fibers weakly contractible (the functor is cofinal)."""
    return _fiber_check(F, depth, guards, side="right")


def _fiber_check(F, depth, guards, side):
    per = {}
    failure = None
    ok = True
    for d in F.target.objects:
        fib = left_fiber(F, d) if side == "left" else right_fiber(F, d)
        cert = is_weakly_contractible(fib, depth, guards)
        per[d] = cert
        if not cert.ok:
            ok = False
            if cert.verdict == "not-contractible" and failure is None:
                failure = (d, cert.witness)
    return FiberwiseVerdict(ok, depth, per, failure)


def is_proper(F, depth=3, guards=DEFAULT):
    """For every target object, strict fiber -> right fiber is a
    lim-equivalence up to the depth."""
    per = {}
    failure = None
    ok = True
    for d in F.target.objects:
        _, _, incl = strict_fiber(F, d)
        verdict = is_lim_equivalence(incl, depth, guards)
        per[d] = verdict
        if not verdict.ok:
            ok = False
            if failure is None and verdict.failure is not None:
                failure = (d, verdict.failure)
    return FiberwiseVerdict(ok, depth, per, failure)
