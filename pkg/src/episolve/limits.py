"""Resource limits shared by the grounder and the solving engines."""

from __future__ import annotations

from dataclasses import dataclass


class ResourceLimitError(RuntimeError):
    """A configured resource bound would be exceeded."""


@dataclass(frozen=True)
class SolveLimits:
    """Bounds on the exhaustive engines.

    max_ground caps the number of ground rule instances produced by the
    grounder, max_modal the number of distinct (modality, literal) pairs a
    guess ranges over, and max_lits the size of the ground literal universe
    used for belief-set enumeration.
    """

    max_ground: int = 5000
    max_modal: int = 20
    max_lits: int = 22


DEFAULT_LIMITS = SolveLimits()
