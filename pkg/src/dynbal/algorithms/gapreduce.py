"""One gap-reduction call: flood the extremes, then pair light with heavy.

The call opens with n flooding rounds in which every node forwards the
smallest and largest load it has heard of; on a graph that is connected
every round this reaches everyone.  With the frozen extremes m and M and
the spread psi = M - m, a node is light when w < m + psi/4 and heavy when
w > M - psi/4.  For the main rounds each light node proposes to its
heaviest neighbor provided that neighbor is heavy; each heavy node accepts
its lightest proposer; the pair splits its total with the floor going to
the light node.  Thresholds never move within a call, so once either side
is exhausted the remaining rounds provably transfer nothing and can be
fast-forwarded.

The gapless variant skips flooding entirely: it is handed a target spread
psi and every node proposes to its heaviest neighbor whenever that
neighbor is at least psi/2 ahead (inclusive).  Nodes that proposed do not
also accept, which keeps the variant matching-based.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, e, log
from random import Random

from ..dyadic import integral_half_sum
from ..graphs import Graph
from ..records import RoundOutcome
from ..smoothing import DEFAULT_C1
from .base import KIND_MATCHING, BalancingAlgorithm, heaviest_neighbor


def _guarded_log_argument(n: int, total: int) -> float:
    """n * ln(total), floored at e so the outer log stays positive."""
    arg = n * log(total) if total > 1 else 0.0
    return max(arg, e)


def gap_reduce_round_budget(n: int, total: int, c1: Fraction, k: Fraction) -> int:
    """Main-loop rounds for one call: ceil(5 n^2 ln(n ln T) / (c1 k))."""
    if k <= 0:
        raise ValueError("gap reduction needs a positive smoothing amount")
    rounds = 5 * n * n * log(_guarded_log_argument(n, total)) / (float(c1) * float(k))
    return max(0, ceil(rounds))


def gapless_round_budget(n: int, total: int, c1: Fraction, k: Fraction) -> int:
    """Per-call rounds for the gapless variant: the plain budget times ln n."""
    if k <= 0:
        raise ValueError("gap reduction needs a positive smoothing amount")
    rounds = (
        2 * n * n * log(_guarded_log_argument(n, total)) * log(n)
        / (float(c1) * float(k))
    )
    return max(0, ceil(rounds))


def flood_min_max_round(tables: list[tuple[int, int]], graph: Graph) -> list[tuple[int, int]]:
    """Each node absorbs the (min, max) knowledge of itself and its neighbors."""
    adj = graph.adj
    out = []
    for u in range(graph.n):
        lo, hi = tables[u]
        for v in adj[u]:
            nlo, nhi = tables[v]
            if nlo < lo:
                lo = nlo
            if nhi > hi:
                hi = nhi
        out.append((lo, hi))
    return out


class GapReduce(BalancingAlgorithm):
    name = "gapReduce"
    kind = KIND_MATCHING
    modes = ("integral",)

    PHASE_FLOOD = "flood"
    PHASE_MAIN = "main"
    PHASE_DONE = "done"

    def __init__(self, c1: Fraction = DEFAULT_C1):
        self.c1 = Fraction(c1)
        if self.c1 <= 0:
            raise ValueError("the hitting constant must be positive")

    def start(self, loads: list, mode: str, rng: Random, *, k, tau, n: int) -> None:
        super().start(loads, mode, rng, k=k, tau=tau, n=n)
        self.k = Fraction(k)
        total = sum(loads)
        self._main_budget = gap_reduce_round_budget(n, total, self.c1, self.k)
        # A spread below 2 cannot be narrowed by integral averaging: the
        # whole call is a no-op and is skipped outright.
        if not loads or max(loads) - min(loads) < 2:
            self.phase = self.PHASE_DONE
            self._flood_left = 0
            self._main_left = 0
            return
        self.phase = self.PHASE_FLOOD
        self._flood_left = n
        self._main_left = self._main_budget
        self.tables = [(w, w) for w in loads]
        self.low = None
        self.high = None
        self.psi = None

    def planned_rounds(self):
        return self.n + self._main_budget

    def is_done(self, loads: list) -> bool:
        return self.phase == self.PHASE_DONE

    def _is_light(self, w: int) -> bool:
        return 4 * w < 4 * self.low + self.psi

    def _is_heavy(self, w: int) -> bool:
        return 4 * w > 4 * self.high - self.psi

    def play_round(self, graph: Graph, loads: list) -> RoundOutcome:
        if self.phase == self.PHASE_FLOOD:
            self.tables = flood_min_max_round(self.tables, graph)
            self._flood_left -= 1
            if self._flood_left == 0:
                first = self.tables[0]
                if any(t != first for t in self.tables):
                    raise AssertionError("flooding did not converge on a connected graph")
                self.low, self.high = first
                self.psi = self.high - self.low
                self.phase = self.PHASE_MAIN
                if self._main_left == 0:
                    self.phase = self.PHASE_DONE
            return RoundOutcome(new_loads=list(loads))

        assert self.phase == self.PHASE_MAIN
        adj = graph.adj
        proposals: dict[int, int] = {}
        for u in range(graph.n):
            if adj[u] and self._is_light(loads[u]):
                v = heaviest_neighbor(u, adj[u], loads)
                if self._is_heavy(loads[v]):
                    proposals[u] = v

        incoming: dict[int, list[int]] = {}
        for u, v in proposals.items():
            incoming.setdefault(v, []).append(u)

        new_loads = list(loads)
        matching = []
        transfers = []
        acceptances = []
        for v in sorted(incoming):
            best_u = None
            best_load = None
            for u in incoming[v]:
                if best_u is None or loads[u] < best_load:
                    best_u, best_load = u, loads[u]
            low, high = integral_half_sum(loads[best_u], loads[v])
            acceptances.append((best_u, v))
            matching.append((best_u, v, loads[v] - loads[best_u]))
            transfers.append((best_u, v, low - loads[best_u]))
            new_loads[best_u] = low
            new_loads[v] = high

        self._tick_main()
        return RoundOutcome(
            new_loads=new_loads,
            proposals=proposals,
            acceptances=acceptances,
            matching=matching,
            transfers=transfers,
        )

    def _tick_main(self):
        self._main_left -= 1
        if self._main_left == 0:
            self.phase = self.PHASE_DONE

    def consume_idle_rounds(self, loads: list, budget_left: int) -> int:
        if self.phase != self.PHASE_MAIN:
            return 0
        have_light = any(self._is_light(w) for w in loads)
        have_heavy = any(self._is_heavy(w) for w in loads)
        if have_light and have_heavy:
            return 0
        # With one side empty and thresholds frozen, no future graph can
        # produce a transfer; the rest of the call is provably idle.
        skip = min(self._main_left, budget_left)
        self._main_left -= skip
        if self._main_left == 0:
            self.phase = self.PHASE_DONE
        return skip


class GaplessGapReduce(BalancingAlgorithm):
    name = "gaplessGapReduce"
    kind = KIND_MATCHING
    modes = ("integral",)

    def __init__(self, psi: int, c1: Fraction = DEFAULT_C1):
        if psi < 0:
            raise ValueError("target spread must be non-negative")
        self.psi = psi
        self.c1 = Fraction(c1)
        if self.c1 <= 0:
            raise ValueError("the hitting constant must be positive")

    def start(self, loads: list, mode: str, rng: Random, *, k, tau, n: int) -> None:
        super().start(loads, mode, rng, k=k, tau=tau, n=n)
        self.k = Fraction(k)
        total = sum(loads)
        self._budget = gapless_round_budget(n, total, self.c1, self.k)
        # psi < 2 asks for sub-unit averaging: vacuous on integers.
        self._left = 0 if self.psi < 2 else self._budget

    def planned_rounds(self):
        return self._budget

    def is_done(self, loads: list) -> bool:
        return self._left == 0

    def play_round(self, graph: Graph, loads: list) -> RoundOutcome:
        adj = graph.adj
        psi = self.psi
        proposals: dict[int, int] = {}
        for u in range(graph.n):
            if not adj[u]:
                continue
            v = heaviest_neighbor(u, adj[u], loads)
            if 2 * (loads[v] - loads[u]) >= psi:
                proposals[u] = v

        incoming: dict[int, list[int]] = {}
        for u, v in proposals.items():
            if v not in proposals:  # senders do not also accept
                incoming.setdefault(v, []).append(u)

        new_loads = list(loads)
        matching = []
        transfers = []
        acceptances = []
        for v in sorted(incoming):
            best_u = None
            best_load = None
            for u in incoming[v]:
                if best_u is None or loads[u] < best_load:
                    best_u, best_load = u, loads[u]
            low, high = integral_half_sum(loads[best_u], loads[v])
            acceptances.append((best_u, v))
            matching.append((best_u, v, loads[v] - loads[best_u]))
            transfers.append((best_u, v, low - loads[best_u]))
            new_loads[best_u] = low
            new_loads[v] = high

        self._left -= 1
        return RoundOutcome(
            new_loads=new_loads,
            proposals=proposals,
            acceptances=acceptances,
            matching=matching,
            transfers=transfers,
        )

    def consume_idle_rounds(self, loads: list, budget_left: int) -> int:
        if self._left == 0 or not loads:
            return 0
        spread = max(loads) - min(loads)
        if 2 * spread >= self.psi and spread >= 2:
            return 0
        # Either no pair is psi/2 apart (nothing proposes) or every gap is
        # at most 1 (pairs may connect but floor/ceil moves nothing), and
        # loads are frozen either way: the rest of the call is idle.
        skip = min(self._left, budget_left)
        self._left -= skip
        return skip
