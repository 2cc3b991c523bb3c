"""Round-level record types shared by the algorithms, metrics and engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graphs import Graph


@dataclass(slots=True)
class RoundOutcome:
    """What one algorithm round did: who proposed, who accepted, what moved.

    `matching` lists the connected pairs as (u, v, pre_round_gap); for the
    two-sided deterministic algorithm the pairs are ordered (sender half of
    u, answerer half of v) and both directions may appear.  `transfers`
    aligns with `matching` and records the amount shifted across each pair.
    """

    new_loads: list
    proposals: dict[int, int] = field(default_factory=dict)
    acceptances: list[tuple[int, int]] = field(default_factory=list)
    matching: list[tuple[int, int, object]] = field(default_factory=list)
    transfers: list = field(default_factory=list)


@dataclass(slots=True)
class RoundTrace:
    """Per-round summary retained for CSV output and invariant checking."""

    round_index: int
    graph: Graph
    matching: list[tuple[int, int, object]]
    max_gap: object
    d_r: object
    phi: Optional[object] = None

    @property
    def connections(self) -> int:
        return len(self.matching)
