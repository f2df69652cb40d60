"""Slot-synchronous multi-hop simulation of lottery-scheduled STDMA.

Each slot, every node runs the same hash-lottery election over its 2-hop
contention domain; a winner sends the head packet of its FIFO queue one hop
along a precomputed shortest path. Sources inject constant-bit-rate
packets. Elections are evaluated in vectorized blocks of whole frames,
which is equivalent to every node running :func:`build_schedule` at each
frame boundary.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from meshsocial.centrality import closeness_centrality
from meshsocial.graph import Graph, GraphError, bfs_distances, k_hop_neighborhood
from meshsocial.rng import SplitMix64, derive_seed
from meshsocial.stdma.tickets import draw_tickets, random_ticket_counts, ticket_count

# OLSR HELLO period; closeness dissemination is not simulated, so unused here.
HELLO_INTERVAL = 0.002
_FRAMES_PER_BLOCK = 64
_PHASE_SALT = 0xCB


class Mode(str, enum.Enum):
    SOCIAL = "social"
    RANDOM = "random"


class ScheduleConflictError(RuntimeError):
    """Two nodes within two hops won the same slot."""

    def __init__(self, slot: int, pairs: int) -> None:
        super().__init__(f"slot {slot}: {pairs} conflicting winner pair(s) within 2 hops")
        self.slot = slot
        self.pairs = pairs


@dataclass(frozen=True)
class Flow:
    src: int
    dst: int
    rate: float  # bits/s


@dataclass(frozen=True)
class StdmaConfig:
    graph: Graph
    flows: tuple[Flow, ...] = ()
    mode: Mode = Mode.SOCIAL
    frame_size: int = 20
    ticket_scale: int = 10
    packet_size: int = 500
    slot_duration: float = 0.005
    sim_duration: float = 10.0
    seed: int = 0
    drain: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "flows", tuple(self.flows))
        if self.frame_size < 1:
            raise ValueError("frame_size must be at least 1")
        if self.ticket_scale < 1:
            raise ValueError("ticket_scale must be a positive integer")
        if self.packet_size <= 0 or self.slot_duration <= 0 or self.sim_duration < 0:
            raise ValueError("packet size, slot duration and duration must be positive")
        if self.drain < 0:
            raise ValueError("drain must be non-negative")
        for f in self.flows:
            if f.src not in self.graph or f.dst not in self.graph:
                raise GraphError(f"flow {f.src}->{f.dst} has an endpoint outside the graph")
            if f.src == f.dst:
                raise ValueError(f"flow {f.src}->{f.dst} loops on itself")
            if not f.rate > 0:
                raise ValueError(f"flow {f.src}->{f.dst} needs a positive rate")

    @property
    def n_slots(self) -> int:
        return math.ceil(round((self.sim_duration + self.drain) / self.slot_duration, 9))


@dataclass
class StdmaResult:
    mode: Mode
    generated: int
    delivered: int
    throughput_bps: float
    mean_delay: float | None
    median_delay: float | None
    p95_delay: float | None
    per_flow_goodput: dict[tuple[int, int], float]
    slot_utilization: float
    conflict_violations: int
    slots_won: dict[int, int]
    n_slots: int
    delays: list[float] = field(default_factory=list, repr=False)

    @property
    def delivery_ratio(self) -> float | None:
        return self.delivered / self.generated if self.generated else None


def all_pairs_flows(g: Graph, rate: float) -> tuple[Flow, ...]:
    """One CBR flow from every node to every other node."""
    return tuple(Flow(s, d, rate) for s in g.nodes for d in g.nodes if s != d)


def next_hop_table(g: Graph, destinations: Iterable[int]) -> dict[int, dict[int, int]]:
    """``table[dst][u]``: neighbour of ``u`` one hop closer to ``dst``, lowest id first."""
    table = {}
    for dst in set(destinations):
        dist = bfs_distances(g, dst)
        table[dst] = {
            u: min(w for w in g.neighbors(u) if dist.get(w) == du - 1)
            for u, du in dist.items()
            if du > 0
        }
    return table


class Elections:
    """Winners of every slot for a fixed topology and ticket policy."""

    def __init__(
        self,
        g: Graph,
        mode: Mode = Mode.SOCIAL,
        closeness: Mapping[int, float] | None = None,
        ticket_scale: int = 10,
        seed: int = 0,
    ) -> None:
        self.graph = g
        self.mode = Mode(mode)
        self.scale = ticket_scale
        self.seed = seed
        self.nodes = g.nodes
        if self.mode is Mode.SOCIAL:
            if closeness is None:
                closeness = closeness_centrality(g).scores
            # small components can score above 1; they get the full allotment
            self.counts = [ticket_count(min(1.0, closeness[v]), ticket_scale) for v in self.nodes]
        else:
            self.counts = None
        self.domains = [
            np.array(sorted(g.index(w) for w in k_hop_neighborhood(g, v, 2)), dtype=np.int64)
            for v in self.nodes
        ]
        n = len(self.nodes)
        self.two_hop = np.zeros((n, n), dtype=np.int64)
        for i, dom in enumerate(self.domains):
            self.two_hop[i, dom] = 1

    def best_tickets(self, slots: np.ndarray) -> np.ndarray:
        """Highest ticket of every node per slot, shape ``(len(slots), n)``."""
        out = np.empty((len(slots), len(self.nodes)), dtype=np.uint64)
        for k, v in enumerate(self.nodes):
            if self.counts is not None:
                out[:, k] = draw_tickets(v, slots, self.counts[k]).max(axis=1)
            else:
                tickets = draw_tickets(v, slots, self.scale)
                held = random_ticket_counts(self.seed, v, slots, self.scale)
                mask = np.arange(self.scale)[None, :] < held[:, None]
                out[:, k] = np.where(mask, tickets, np.uint64(0)).max(axis=1)
        return out

    def winners(self, first_slot: int, count: int) -> np.ndarray:
        """Boolean ``(count, n)`` matrix: node k won slot ``first_slot + row``.

        A node wins when its best ticket beats every 2-hop contender's;
        equal tickets go to the lower node id.
        """
        slots = np.arange(first_slot, first_slot + count, dtype=np.uint64)
        best = self.best_tickets(slots)
        won = np.ones(best.shape, dtype=bool)
        for i, dom in enumerate(self.domains):
            if dom.size == 0:
                continue
            mine = best[:, i : i + 1]
            theirs = best[:, dom]
            beats = (mine > theirs) | ((mine == theirs) & (i < dom)[None, :])
            won[:, i] = beats.all(axis=1)
        return won

    def conflicts(self, won: np.ndarray) -> np.ndarray:
        """Per-slot count of winner pairs that lie within 2 hops of each other."""
        w = won.astype(np.int64)
        return ((w @ self.two_hop) * w).sum(axis=1) // 2


def _cbr_arrivals(cfg: StdmaConfig) -> dict[int, list[tuple[float, int]]]:
    # slot index -> [(generation time, flow index)] for packets that become
    # sendable at the start of that slot
    rng = SplitMix64(derive_seed(cfg.seed, _PHASE_SALT))
    arrivals: dict[int, list[tuple[float, int]]] = {}
    for fi, f in enumerate(cfg.flows):
        interval = cfg.packet_size / f.rate
        phase = rng.random() * interval
        k = 0
        while (t := phase + k * interval) < cfg.sim_duration:
            slot = math.ceil(round(t / cfg.slot_duration, 9))
            arrivals.setdefault(slot, []).append((t, fi))
            k += 1
    for lst in arrivals.values():
        lst.sort()
    return arrivals


def simulate(cfg: StdmaConfig, closeness: Mapping[int, float] | None = None) -> StdmaResult:
    """Run one STDMA simulation.

    ``closeness`` defaults to the closeness centrality of the full graph,
    computed once (topologies are static). Raises
    :class:`ScheduleConflictError` if any slot elects two winners within two
    hops of each other.
    """
    g = cfg.graph
    elections = Elections(g, cfg.mode, closeness, cfg.ticket_scale, cfg.seed)
    table = next_hop_table(g, {f.dst for f in cfg.flows})
    for f in cfg.flows:
        if f.src not in table[f.dst]:
            raise GraphError(f"flow {f.src}->{f.dst}: destination unreachable")

    arrivals = _cbr_arrivals(cfg)
    generated = sum(len(v) for v in arrivals.values())
    queues: list[deque] = [deque() for _ in g.nodes]
    nodes = g.nodes
    sd = cfg.slot_duration
    n_slots = cfg.n_slots
    wins = np.zeros(len(nodes), dtype=np.int64)
    delays: list[float] = []
    flow_bits = [0] * len(cfg.flows)
    sent = 0

    block = cfg.frame_size * _FRAMES_PER_BLOCK
    for start in range(0, n_slots, block):
        count = min(block, n_slots - start)
        won = elections.winners(start, count)
        bad = elections.conflicts(won)
        if bad.any():
            first = int(np.flatnonzero(bad)[0])
            raise ScheduleConflictError(start + first, int(bad[first]))
        wins += won.sum(axis=0)
        for row in range(count):
            slot = start + row
            for t, fi in arrivals.get(slot, ()):
                f = cfg.flows[fi]
                queues[g.index(f.src)].append((fi, t))
            moves = []
            for k in np.flatnonzero(won[row]):
                if queues[k]:
                    moves.append((nodes[k], queues[k].popleft()))
            for u, (fi, t) in moves:
                sent += 1
                dst = cfg.flows[fi].dst
                nh = table[dst][u]
                if nh == dst:
                    delays.append((slot + 1) * sd - t)
                    flow_bits[fi] += cfg.packet_size
                else:
                    queues[g.index(nh)].append((fi, t))

    delivered = len(delays)
    total_wins = int(wins.sum())
    duration = cfg.sim_duration if cfg.sim_duration > 0 else 1.0
    goodput: dict[tuple[int, int], float] = {}
    for fi, f in enumerate(cfg.flows):
        key = (f.src, f.dst)
        goodput[key] = goodput.get(key, 0.0) + flow_bits[fi] / duration
    arr = np.array(delays)
    return StdmaResult(
        mode=cfg.mode,
        generated=generated,
        delivered=delivered,
        throughput_bps=delivered * cfg.packet_size / duration,
        mean_delay=float(arr.mean()) if delivered else None,
        median_delay=float(np.median(arr)) if delivered else None,
        p95_delay=float(np.percentile(arr, 95)) if delivered else None,
        per_flow_goodput=goodput,
        slot_utilization=sent / total_wins if total_wins else 0.0,
        conflict_violations=0,
        slots_won={v: int(wins[k]) for k, v in enumerate(nodes)},
        n_slots=n_slots,
        delays=delays,
    )


@dataclass(frozen=True)
class SweepRow:
    mode: Mode
    rate: float
    throughput_bps: float
    mean_delay_s: float | None
    p95_delay_s: float | None
    delivered: float
    generated: float
    runs: int


def sweep(
    graphs: Sequence[Graph],
    rates: Sequence[float],
    seeds: Sequence[int],
    modes: Sequence[Mode] = (Mode.SOCIAL, Mode.RANDOM),
    **cfg_kwargs,
) -> list[SweepRow]:
    """Delay-vs-throughput table averaged over seeds.

    ``graphs[k]`` is the topology used with ``seeds[k]``; every run carries
    all-pairs flows at the given per-flow rate.
    """
    if len(graphs) != len(seeds):
        raise ValueError("need one topology per seed")
    rows = []
    for mode in modes:
        for rate in rates:
            res = [
                simulate(StdmaConfig(g, all_pairs_flows(g, rate), mode, seed=s, **cfg_kwargs))
                for g, s in zip(graphs, seeds)
            ]
            rows.append(_average(mode, rate, res))
    return rows


def _average(mode: Mode, rate: float, res: list[StdmaResult]) -> SweepRow:
    def mean_of(xs):
        xs = [x for x in xs if x is not None]
        return float(np.mean(xs)) if xs else None

    return SweepRow(
        mode=mode,
        rate=rate,
        throughput_bps=float(np.mean([r.throughput_bps for r in res])),
        mean_delay_s=mean_of(r.mean_delay for r in res),
        p95_delay_s=mean_of(r.p95_delay for r in res),
        delivered=float(np.mean([r.delivered for r in res])),
        generated=float(np.mean([r.generated for r in res])),
        runs=len(res),
    )
