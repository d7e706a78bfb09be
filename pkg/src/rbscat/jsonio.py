"""Deterministic JSON schemas for the CLI artifacts.

Labels inside categories are nested tuples of ints/strings; JSON holds
them as nested lists and the loader converts back, so a build/load
round-trip is the identity.  All dumps are byte-stable: sorted keys,
fixed separators, no floats except the explicitly rounded timings.
"""

from __future__ import annotations

import json

from .fincat import validate_category


def dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(v) for v in x)
    return x


def _thaw(x):
    if isinstance(x, tuple):
        return [_thaw(v) for v in x]
    return x


def fincat_to_json(C):
    return {
        "schema": "fincat/1",
        "objects": [_thaw(o) for o in C.objects],
        "morphisms": [
            {"label": _thaw(C.mor_labels[i]),
             "src": _thaw(C.objects[C.src[i]]),
             "tgt": _thaw(C.objects[C.tgt[i]])}
            for i in range(C.n_morphisms)],
        "identities": [[_thaw(C.objects[i]), _thaw(C.mor_labels[C.identity_of[i]])]
                       for i in range(C.n_objects)],
        "composition": [[_thaw(C.mor_labels[g]), _thaw(C.mor_labels[f]),
                         _thaw(C.mor_labels[h])]
                        for (g, f), h in sorted(C.comp.items())],
    }


def fincat_from_json(doc, guards=None, assoc="auto"):
    from .guards import DEFAULT
    assert doc.get("schema") == "fincat/1", "not a fincat artifact"
    objects = [_freeze(o) for o in doc["objects"]]
    morphisms = [(_freeze(m["label"]), _freeze(m["src"]), _freeze(m["tgt"]))
                 for m in doc["morphisms"]]
    identities = {_freeze(o): _freeze(m) for o, m in doc["identities"]}
    comp = {(_freeze(g), _freeze(f)): _freeze(h)
            for g, f, h in doc["composition"]}
    return validate_category(objects, morphisms, identities, comp,
                             guards=guards or DEFAULT, assoc=assoc)


def ring_to_json(ring):
    return ring.descriptor()


def flag_to_json(flag):
    return [[list(row) for row in m.mat] for m in flag.members]


def complex_to_json(cx):
    return {
        "schema": "chaincomplex/1",
        "dims": list(cx.dims),
        "complete": cx.complete,
        "boundaries": {
            str(k): [[r, c, v] for c, col in enumerate(cols)
                     for r, v in sorted(col.items())]
            for k, cols in sorted(cx.boundaries.items())},
    }


def complex_from_json(doc):
    from .homology import ChainComplex
    assert doc.get("schema") == "chaincomplex/1", "not a chain complex artifact"
    dims = list(doc["dims"])
    boundaries = {}
    for k, triples in doc["boundaries"].items():
        k = int(k)
        cols = [dict() for _ in range(dims[k])]
        for r, c, v in triples:
            cols[c][r] = v
        boundaries[k] = cols
    return ChainComplex(dims, boundaries, complete=doc.get("complete", False))


def homology_to_json(h):
    return {
        "schema": "homology/1",
        "coefficients": h.coefficients,
        "betti": {str(k): v for k, v in sorted(h.betti.items())},
        "torsion": {str(k): list(v) for k, v in sorted(h.torsion.items())},
        "trusted_max_degree": h.trusted_max,
        "chain_dims": list(h.dims),
    }
