"""Per-node load vectors and the initial-load generators scenarios pick by name.

Loads are plain Python ints in integral mode and Dyadic values in continuous
mode; the hot loops work on bare lists and LoadState is the thin wrapper the
public interfaces exchange.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Optional

from .dyadic import Dyadic

MODE_INTEGRAL = "integral"
MODE_CONTINUOUS = "continuous"
MODES = (MODE_INTEGRAL, MODE_CONTINUOUS)


@dataclass
class LoadState:
    """A snapshot of every node's load.

    `split_halves`, when present, carries the two half-loads the two-sided
    deterministic algorithm maintains per node; they must sum to the node's
    real load.
    """

    mode: str
    loads: list
    split_halves: Optional[list] = None

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        for i, w in enumerate(self.loads):
            if self.mode == MODE_INTEGRAL:
                if not isinstance(w, int):
                    raise ValueError(f"integral mode needs int loads, node {i} has {w!r}")
            elif not isinstance(w, (int, Dyadic)):
                raise ValueError(f"continuous mode needs dyadic loads, node {i} has {w!r}")
            if w < 0:
                raise ValueError(f"node {i} has negative load {w}")
        if self.split_halves is not None:
            if len(self.split_halves) != len(self.loads):
                raise ValueError("split halves must cover every node")
            for i, ((s, a), w) in enumerate(zip(self.split_halves, self.loads)):
                if s + a != w:
                    raise ValueError(f"split halves of node {i} do not sum to its load")

    @property
    def n(self) -> int:
        return len(self.loads)


def total_load(loads) -> object:
    """Exact total; int when all loads are ints, Dyadic otherwise."""
    if isinstance(loads, LoadState):
        loads = loads.loads
    total = 0
    for w in loads:
        total = total + w
    return total


# ----------------------------------------------------------------------
# generators
# ----------------------------------------------------------------------


def line_ramp(n: int) -> list[int]:
    """Loads 1..n in node order: node i starts with i + 1 units."""
    return list(range(1, n + 1))


def single_source(n: int, total: int) -> list[int]:
    """All `total` units on node 0, everything else empty."""
    if total < 0:
        raise ValueError("total load must be non-negative")
    return [total] + [0] * (n - 1)


def uniform_random(n: int, max_value: int, rng: Random, granularity_bits: int = 0) -> list:
    """Independent uniform loads on [0, max_value].

    With granularity_bits == 0 the draws are integers; otherwise they are
    dyadics on a 2**-granularity_bits grid, for continuous-mode scenarios.
    """
    if max_value < 0:
        raise ValueError("max_value must be non-negative")
    if granularity_bits == 0:
        return [rng.randint(0, max_value) for _ in range(n)]
    scale = max_value << granularity_bits
    return [Dyadic(rng.randint(0, scale), granularity_bits) for _ in range(n)]
