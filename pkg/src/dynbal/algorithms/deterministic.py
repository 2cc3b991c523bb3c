"""The two-sided deterministic max-gap algorithm (continuous loads).

Each node v is split into a sender half v_s and an answerer half v_a, each
holding w(v)/2.  A round has two stages:

* interactive balancing: every node whose largest neighbor gap is strictly
  positive proposes from its sender half to that neighbor (lowest id on
  ties); every node with incoming proposals accepts the largest-gap one
  (again lowest id on ties) with its answerer half, and each accepted pair
  of halves averages exactly.
* internal balancing: each node's two halves re-equalise.

Because the internal stage leaves both halves at w(v)/2, consecutive
rounds can re-derive the split from the real loads; the stages are still
exposed separately for direct testing.
"""

from __future__ import annotations

from ..dyadic import Dyadic, as_dyadic, half_sum
from ..graphs import Graph
from ..records import RoundOutcome
from .base import KIND_TWO_SIDED, BalancingAlgorithm, heaviest_gap_neighbor

DetState = list  # list of (sender_half, answerer_half) Dyadic pairs


def split_evenly(loads) -> DetState:
    """Fresh half-pairs: both halves of node v hold w(v)/2."""
    state = []
    for w in loads:
        h = as_dyadic(w).half()
        state.append((h, h))
    return state


def internal_round(state: DetState) -> DetState:
    """Each node's halves meet at their average."""
    out = []
    for s, a in state:
        h = half_sum(s, a)
        out.append((h, h))
    return out


def interactive_round(state: DetState, graph: Graph):
    """One interactive stage; returns (new_state, outcome).

    Proposal targets are chosen by real (whole-node) load gaps, and the
    matching records those real gaps.  Transfers average the sender half of
    the proposer with the answerer half of the acceptor; each half joins at
    most one connection, so a node can exchange with up to two neighbors.
    """
    n = graph.n
    adj = graph.adj
    real = [s + a for s, a in state]

    proposals: dict[int, int] = {}
    for u in range(n):
        target, gap = heaviest_gap_neighbor(u, adj[u], real)
        if target is not None and gap > 0:
            proposals[u] = target

    incoming: dict[int, list[int]] = {}
    for u, v in proposals.items():
        incoming.setdefault(v, []).append(u)

    acceptances: list[tuple[int, int]] = []
    for v in sorted(incoming):
        best_u = None
        best_gap = None
        for u in incoming[v]:
            gap = abs(real[u] - real[v])
            if best_u is None or gap > best_gap:
                best_u, best_gap = u, gap
        acceptances.append((best_u, v))

    senders = [s for s, _ in state]
    answerers = [a for _, a in state]
    matching: list[tuple[int, int, Dyadic]] = []
    transfers: list[tuple[int, int, Dyadic]] = []
    for u, v in acceptances:
        meet = half_sum(senders[u], answerers[v])
        moved = abs(meet - senders[u])
        senders[u] = meet
        answerers[v] = meet
        matching.append((u, v, abs(real[u] - real[v])))
        transfers.append((u, v, moved))

    new_state = list(zip(senders, answerers))
    outcome = RoundOutcome(
        new_loads=[s + a for s, a in new_state],
        proposals=proposals,
        acceptances=acceptances,
        matching=matching,
        transfers=transfers,
    )
    return new_state, outcome


class TwoSidedDeterministic(BalancingAlgorithm):
    name = "deterministic"
    kind = KIND_TWO_SIDED
    modes = ("continuous",)

    def play_round(self, graph: Graph, loads: list) -> RoundOutcome:
        state = split_evenly(loads)
        new_state, outcome = interactive_round(state, graph)
        # The internal stage happens implicitly: the next round re-splits
        # each node's total evenly, which is exactly the halves averaging.
        return outcome
