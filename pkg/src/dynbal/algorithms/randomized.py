"""The randomized max-gap baseline: coin-flip roles, one partner per node.

Every node flips a fair coin to send or receive.  A sender proposes to the
neighbor with the largest absolute load gap (lowest id on ties); a receiver
with proposals accepts the largest-gap proposer (lowest id on ties).  A
proposal to another sender dies, so each node exchanges with at most one
partner: the algorithm is matching-based.  Continuous transfers average the
pair exactly; integral transfers give the lighter node the floor.
"""

from __future__ import annotations

from ..dyadic import half_sum, integral_half_sum
from ..graphs import Graph
from ..loads import MODE_INTEGRAL
from ..records import RoundOutcome
from .base import KIND_MATCHING, BalancingAlgorithm, heaviest_gap_neighbor


class RandMaxNeighbor(BalancingAlgorithm):
    name = "randMaxNeighbor"
    kind = KIND_MATCHING
    modes = ("integral", "continuous")

    def play_round(self, graph: Graph, loads: list) -> RoundOutcome:
        n = graph.n
        adj = graph.adj
        coin = self.rng.getrandbits(n)

        proposals: dict[int, int] = {}
        for u in range(n):
            if (coin >> u) & 1 and adj[u]:
                target, _ = heaviest_gap_neighbor(u, adj[u], loads)
                proposals[u] = target

        incoming: dict[int, list[int]] = {}
        for u, v in proposals.items():
            if not (coin >> v) & 1:
                incoming.setdefault(v, []).append(u)

        new_loads = list(loads)
        matching = []
        transfers = []
        acceptances = []
        integral = self.mode == MODE_INTEGRAL
        for v in sorted(incoming):
            best_u = None
            best_gap = None
            for u in incoming[v]:
                gap = abs(loads[u] - loads[v])
                if best_u is None or gap > best_gap:
                    best_u, best_gap = u, gap
            acceptances.append((best_u, v))
            matching.append((best_u, v, best_gap))
            w_u, w_v = loads[best_u], loads[v]
            if integral:
                low, high = integral_half_sum(w_u, w_v)
                if w_u <= w_v:
                    new_loads[best_u], new_loads[v] = low, high
                else:
                    new_loads[best_u], new_loads[v] = high, low
                transfers.append((best_u, v, abs(new_loads[best_u] - w_u)))
            else:
                meet = half_sum(w_u, w_v)
                new_loads[best_u] = meet
                new_loads[v] = meet
                transfers.append((best_u, v, abs(meet - w_u)))

        return RoundOutcome(
            new_loads=new_loads,
            proposals=proposals,
            acceptances=acceptances,
            matching=matching,
            transfers=transfers,
        )
