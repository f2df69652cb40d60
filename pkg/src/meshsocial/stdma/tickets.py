"""Hash-lottery slot elections.

Every ticket is a public function of (owner, slot, index), so any node can
recompute the tickets of its whole 2-hop neighbourhood and all nodes in a
contention domain agree on the winner without exchanging messages.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from meshsocial.graph import Graph, GraphError, k_hop_neighborhood
from meshsocial.rng import GOLDEN_GAMMA, MASK64, derive_seed, mix64

NODE_MULT = 0x9E3779B97F4A7C15
SLOT_MULT = 0xC2B2AE3D27D4EB4F
INDEX_MULT = 0xD6E8FEB86659FD93


class StaleViewError(GraphError):
    """A 2-hop contender has no known closeness value."""


def form_slot_id(frame_count: int, j: int, frame_size: int) -> int:
    """Global slot id of position ``j`` (1-based) in frame ``frame_count``."""
    if not 1 <= j <= frame_size:
        raise ValueError(f"slot position {j} outside 1..{frame_size}")
    return frame_count * frame_size + (j - 1)


def ticket_count(closeness: float, scale: int) -> int:
    """Tickets held for one slot: closeness * scale rounded half-up, at least 1."""
    if not 0.0 <= closeness <= 1.0:
        raise ValueError(f"closeness {closeness} outside [0, 1]")
    if scale < 1:
        raise ValueError("ticket scale must be a positive integer")
    return max(1, math.floor(closeness * scale + 0.5))


def draw_ticket(node: int, slot: int, index: int) -> int:
    x = (
        ((node * NODE_MULT) & MASK64)
        ^ ((slot * SLOT_MULT) & MASK64)
        ^ ((index * INDEX_MULT) & MASK64)
    )
    return mix64(x)


def draw_tickets(node: int, slots: np.ndarray, count: int) -> np.ndarray:
    """Vectorized :func:`draw_ticket`: shape ``(len(slots), count)`` uint64."""
    s = np.asarray(slots, dtype=np.uint64)[:, None]
    idx = np.arange(count, dtype=np.uint64)[None, :]
    with np.errstate(over="ignore"):
        x = (
            np.uint64((node * NODE_MULT) & MASK64)
            ^ (s * np.uint64(SLOT_MULT))
            ^ (idx * np.uint64(INDEX_MULT))
        )
        x ^= x >> np.uint64(30)
        x *= np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    return x


def random_ticket_count(seed: int, node: int, slot: int, scale: int) -> int:
    """Baseline ticket count: uniform in [1, scale] per (node, slot)."""
    return 1 + derive_seed(seed, node, slot) % scale


def random_ticket_counts(seed: int, node: int, slots: np.ndarray, scale: int) -> np.ndarray:
    """Vectorized :func:`random_ticket_count`."""
    base = np.uint64(derive_seed(seed, node))
    s = np.asarray(slots, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = base ^ _mix64_array(s + np.uint64(GOLDEN_GAMMA))
        x = _mix64_array(x)
    return (np.uint64(1) + x % np.uint64(scale)).astype(np.int64)


def _mix64_array(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        x = x ^ (x >> np.uint64(30))
        x = x * np.uint64(0xBF58476D1CE4E5B9)
        x = x ^ (x >> np.uint64(27))
        x = x * np.uint64(0x94D049BB133111EB)
        return x ^ (x >> np.uint64(31))


@functools.total_ordering
@dataclass(frozen=True)
class Ticket:
    """Lottery ticket; the larger ticket wins.

    Equal values favour the lower owner id, then the lower index.
    """

    value: int
    owner: int
    index: int

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.value, -self.owner, -self.index)

    def __lt__(self, other: Ticket) -> bool:
        return self.key < other.key


@dataclass(frozen=True)
class TwoHopView:
    """What a node knows when it runs the election: itself plus 2-hop contenders."""

    node: int
    contenders: Mapping[int, float]


def two_hop_view(g: Graph, node: int, closeness: Mapping[int, float]) -> TwoHopView:
    members = k_hop_neighborhood(g, node, 2) | {node}
    missing = sorted(v for v in members if v not in closeness)
    if missing:
        raise StaleViewError(f"node {node} has no closeness for contenders {missing}")
    return TwoHopView(node, {v: closeness[v] for v in sorted(members)})


def slot_tickets(node: int, slot: int, count: int) -> list[Ticket]:
    return [Ticket(draw_ticket(node, slot, k), node, k) for k in range(count)]


def build_schedule(
    node: int,
    frame_count: int,
    view: TwoHopView,
    frame_size: int = 20,
    ticket_scale: int = 10,
    held: Callable[[int, int], int] | None = None,
) -> set[int]:
    """Slot positions (1-based) of frame ``frame_count`` won by ``node``.

    ``held(owner, slot)`` overrides the closeness-derived ticket counts
    (the random baseline passes its per-slot draw here). A slot is won when
    the maximum ticket among all contenders belongs to ``node``.
    """
    if node != view.node:
        raise ValueError("view belongs to a different node")
    if held is None:
        fixed = {v: ticket_count(c, ticket_scale) for v, c in view.contenders.items()}
        held = lambda owner, slot: fixed[owner]  # noqa: E731
    won = set()
    for j in range(1, frame_size + 1):
        slot = form_slot_id(frame_count, j, frame_size)
        local = slot_tickets(node, slot, held(node, slot))
        contenders = list(local)
        for v in view.contenders:
            if v != node:
                contenders.extend(slot_tickets(v, slot, held(v, slot)))
        winner = max(contenders)
        if winner.owner == node:
            won.add(j)
    return won
