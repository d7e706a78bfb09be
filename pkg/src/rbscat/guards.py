"""Resource guards.

Every potentially explosive enumeration in the library is bounded by an
explicit limit from a GuardConfig.  Exceeding a limit raises GuardExceeded
(never silent truncation).  All limits live here so the CLI can load them
from a single config file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict, fields


class GuardExceeded(RuntimeError):
    """An enumeration would exceed a configured resource limit."""


@dataclass
class GuardConfig:
    # ring_linalg
    max_ring_size: int = 256
    max_ring_axiom_exhaustive: int = 64       # exhaustive triple check up to this ring size
    max_gl_candidates: int = 10_000_000       # |R|^(n^2) brute-force bound
    max_vector_enum: int = 1_000_000          # |R|^n bound for vector/submodule enumeration
    # fincat
    max_simplices_per_degree: int = 2_000_000
    max_assoc_triples: int = 20_000_000       # exhaustive associativity bound
    max_functor_pairs: int = 20_000_000
    tietze_budget: int = 200_000
    # rbs / groups
    max_group_order: int = 100_000
    # qkt
    max_total_dim: int = 3
    max_filt_morphisms: int = 20_000

    def check(self, value, limit_name, what):
        limit = getattr(self, limit_name)
        if value > limit:
            raise GuardExceeded(
                "%s requires %d > %s=%d" % (what, value, limit_name, limit))
        return value


DEFAULT = GuardConfig()


def load_config(path):
    """Load a GuardConfig from a JSON file; unknown keys are rejected."""
    with open(path) as fh:
        raw = json.load(fh)
    known = {f.name for f in fields(GuardConfig)}
    bad = set(raw) - known
    if bad:
        raise ValueError("unknown guard keys: %s" % sorted(bad))
    return GuardConfig(**raw)


def dump_config(cfg):
    return json.dumps(asdict(cfg), indent=2, sort_keys=True)
