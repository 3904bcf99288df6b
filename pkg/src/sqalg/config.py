from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Bounds:
    """Numeric limits shared by the library and the command line."""

    degree_bound: int = 48  # enumeration limit for degreewise bases of A
    s_max: int = 12
    t_max: int = 24
    iso_random_tries: int = 400
    iso_exhaustive_dim: int = 18  # Hom spaces up to 2**18 elements are searched exhaustively


DEFAULT = Bounds()
