"""rbscat: finite flag categories and their homology at desk scale.

The library builds categories of splittable flags over finite coefficient
rings, finite posets and buildings attached to them, and the span/monoidal
Q-construction machinery over truncated vector space categories, and
verifies structural theorems about them through exact nerve homology,
fundamental-group presentations and exhaustive categorical checks.
"""

__version__ = "0.1.0"
