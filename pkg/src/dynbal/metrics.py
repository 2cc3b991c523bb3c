"""Progress metrics and per-round invariant verdicts.

The potential function is the sum of |w(u) - w(v)| over all unordered node
pairs, computed here by a sorted prefix scan; the tests keep an independent
brute-force double loop as the oracle.  All checks are exact: they compare
dyadics and integers with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .dyadic import Dyadic, as_dyadic
from .graphs import nodes_within
from .loads import MODE_INTEGRAL, LoadState, total_load
from .records import RoundTrace

# External names for the invariant checks, as they appear in scenario
# configs and CSV columns.
CHECK_CONSERVATION = "conservation"
CHECK_POTENTIAL_DROP = "potentialDrop"
CHECK_COVERING_EDGE = "coveringEdge"
CHECK_SHIFT_LOWER_BOUND = "shiftLowerBound"
CHECK_MATCHING_BUDGET = "matchingBudget"
CHECK_INTEGRALITY = "integrality"
CHECK_PREFIX_MONOTONE = "prefixMonotone"
CHECK_SPLIT_POTENTIAL = "splitPotential"

ALL_CHECKS = (
    CHECK_CONSERVATION,
    CHECK_POTENTIAL_DROP,
    CHECK_COVERING_EDGE,
    CHECK_SHIFT_LOWER_BOUND,
    CHECK_MATCHING_BUDGET,
    CHECK_INTEGRALITY,
    CHECK_PREFIX_MONOTONE,
    CHECK_SPLIT_POTENTIAL,
)

# Checks that only make sense for the two-sided deterministic algorithm.
TWO_SIDED_ONLY_CHECKS = (
    CHECK_POTENTIAL_DROP,
    CHECK_COVERING_EDGE,
    CHECK_SHIFT_LOWER_BOUND,
    CHECK_SPLIT_POTENTIAL,
)

KIND_TWO_SIDED = "two-sided"
KIND_MATCHING = "matching"


def potential(loads: Sequence) -> object:
    """Sum of pairwise absolute load differences, via one sort."""
    ordered = sorted(loads)
    n = len(ordered)
    acc = 0
    for i, w in enumerate(ordered):
        acc = acc + w * (2 * i - n + 1)
    return acc


def max_gap(loads: Sequence) -> object:
    """Largest pairwise load difference (0 for a single node)."""
    if len(loads) <= 1:
        return 0
    return max(loads) - min(loads)


def twice_shifted_load(matching: Iterable[tuple[int, int, object]]) -> Dyadic:
    """Half the summed pre-round gaps over the connected pairs.

    In the continuous two-sided round this equals twice the total load that
    actually moved, which is why the potential must drop by at least half
    of it.
    """
    total = 0
    for _, _, gap in matching:
        total = total + gap
    return as_dyadic(total).half()


def prefix_sums(order: Sequence[int], loads: Sequence) -> list:
    """Running totals of loads read in positional order; starts at 0."""
    acc = 0
    out = [0]
    for node in order:
        acc = acc + loads[node]
        out.append(acc)
    return out


# ----------------------------------------------------------------------
# invariant checking
# ----------------------------------------------------------------------


@dataclass(slots=True)
class InvariantReport:
    """Named verdicts for one round; a witness explains each failure."""

    round_index: int
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [name for name, good in self.checks.items() if not good]


def check_round(
    before: LoadState,
    after: LoadState,
    trace: RoundTrace,
    *,
    algorithm_kind: str,
    enabled: Sequence[str],
    phi_before=None,
    phi_after=None,
    line_order: Optional[Sequence[int]] = None,
    initial_prefix: Optional[Sequence] = None,
) -> InvariantReport:
    """Evaluate the enabled invariants for one committed round.

    `phi_before`/`phi_after` may be passed in when the caller already
    computed them; otherwise they are derived here on demand.
    """
    report = InvariantReport(trace.round_index)
    checks, witnesses = report.checks, report.witnesses

    def need_phi_before():
        nonlocal phi_before
        if phi_before is None:
            phi_before = potential(before.loads)
        return phi_before

    def need_phi_after():
        nonlocal phi_after
        if phi_after is None:
            phi_after = potential(after.loads)
        return phi_after

    for name in enabled:
        if name == CHECK_CONSERVATION:
            total_before = total_load(before)
            total_after = total_load(after)
            good = total_before == total_after
            if not good:
                witnesses[name] = {"before": str(total_before), "after": str(total_after)}

        elif name == CHECK_POTENTIAL_DROP:
            bound = need_phi_before() - trace.d_r.half()
            good = need_phi_after() <= bound
            if not good:
                witnesses[name] = {
                    "phi_after": str(phi_after),
                    "allowed": str(bound),
                }

        elif name == CHECK_COVERING_EDGE:
            good, witness = _covering_edge_ok(before.loads, trace)
            if not good:
                witnesses[name] = witness

        elif name == CHECK_SHIFT_LOWER_BOUND:
            gap = max_gap(before.loads)
            good = trace.d_r * 30 >= gap
            if not good:
                witnesses[name] = {"d_r": str(trace.d_r), "max_gap": str(gap)}

        elif name == CHECK_MATCHING_BUDGET:
            good, witness = _matching_budget_ok(trace.matching, algorithm_kind)
            if not good:
                witnesses[name] = witness

        elif name == CHECK_INTEGRALITY:
            good = True
            if after.mode == MODE_INTEGRAL:
                for i, w in enumerate(after.loads):
                    if not isinstance(w, int) or w < 0:
                        good = False
                        witnesses[name] = {"node": i, "load": repr(w)}
                        break

        elif name == CHECK_PREFIX_MONOTONE:
            if line_order is None or initial_prefix is None:
                raise ValueError("prefixMonotone needs the line order and baseline prefixes")
            current = prefix_sums(line_order, before.loads)
            good = True
            for i, (now, base) in enumerate(zip(current, initial_prefix)):
                if now > base:
                    good = False
                    witnesses[name] = {"prefix": i, "now": str(now), "baseline": str(base)}
                    break

        elif name == CHECK_SPLIT_POTENTIAL:
            halves = []
            for w in before.loads:
                h = as_dyadic(w).half()
                halves.append(h)
                halves.append(h)
            good = potential(halves) == need_phi_before() * 2
            if not good:
                witnesses[name] = {
                    "split": str(potential(halves)),
                    "twice_whole": str(need_phi_before() * 2),
                }

        else:
            raise ValueError(f"unknown invariant check {name!r}")

        checks[name] = good

    return report


def _covering_edge_ok(loads, trace: RoundTrace):
    """Every positive-gap edge must have a connected edge of at least its
    gap within three hops."""
    graph = trace.graph
    connected = trace.matching
    for u, v in graph.edges:
        gap = abs(loads[u] - loads[v])
        if not gap > 0:
            continue
        near = nodes_within(graph, (u, v), 3)
        covered = any(
            (a in near or b in near) and pair_gap >= gap for a, b, pair_gap in connected
        )
        if not covered:
            return False, {"edge": (u, v), "gap": str(gap)}
    return True, None


def _matching_budget_ok(matching, algorithm_kind: str):
    if algorithm_kind == KIND_TWO_SIDED:
        as_sender: dict[int, int] = {}
        as_answerer: dict[int, int] = {}
        for u, v, _ in matching:
            as_sender[u] = as_sender.get(u, 0) + 1
            as_answerer[v] = as_answerer.get(v, 0) + 1
            if as_sender[u] > 1 or as_answerer[v] > 1:
                return False, {"node": u if as_sender[u] > 1 else v}
        return True, None
    seen: set[int] = set()
    for u, v, _ in matching:
        if u in seen or v in seen:
            return False, {"node": u if u in seen else v}
        seen.add(u)
        seen.add(v)
    return True, None
