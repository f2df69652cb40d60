"""Coordinated-attack reliability experiments.

Failing nodes are removed from the routing topology. With all-pairs CBR
traffic and shortest-hop routing, the average hop count of delivered
packets equals the mean shortest-path length over the surviving pairs that
are still connected; pairs split apart are counted separately.
"""

from __future__ import annotations

import enum
import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from meshsocial.centrality import Metric, compute, rank_nodes
from meshsocial.graph import Graph, GraphError, all_pairs_distances, remove_nodes
from meshsocial.rng import SplitMix64

RANDOM = "random"


class RecomputeMode(str, enum.Enum):
    STATIC = "static"
    RECOMPUTE = "recompute"


@dataclass(frozen=True)
class HopCurvePoint:
    """One measurement on a removal curve.

    ``avg_hops`` is None when no surviving pair is connected. Baseline
    points carry trial means, so their pair counts may be fractional.
    """

    removed: int
    avg_hops: float | None
    connected_pair_count: float
    disconnected_pair_count: float
    stddev: float | None = None
    undefined_trials: int = 0


@dataclass(frozen=True)
class AttackConfig:
    graph: Graph
    metrics: tuple[Metric, ...] = (Metric.BETWEENNESS, Metric.CLOSENESS, Metric.DEGREE)
    max_removals: int = 5
    random_trials: int = 10
    seed: int = 0
    recompute_mode: RecomputeMode = RecomputeMode.STATIC

    def __post_init__(self) -> None:
        if not 0 <= self.max_removals < len(self.graph):
            raise ValueError(
                f"max_removals must be in [0, {len(self.graph) - 1}], got {self.max_removals}"
            )
        if self.random_trials < 1:
            raise ValueError("random_trials must be at least 1")
        object.__setattr__(self, "metrics", tuple(Metric(m) for m in self.metrics))


@dataclass
class AttackResult:
    per_metric: dict[Metric, list[HopCurvePoint]]
    random_baseline: list[HopCurvePoint]
    removal_orders: dict[Metric, list[int]] = field(default_factory=dict)

    def rows(self) -> list[dict]:
        """Flat records for the attack CSV (``metric`` is the metric tag or 'random')."""
        out = []
        for metric, curve in self.per_metric.items():
            for p in curve:
                out.append(_row(metric.value, p))
        for p in self.random_baseline:
            out.append(_row(RANDOM, p))
        return out


def _row(name: str, p: HopCurvePoint) -> dict:
    return {
        "metric": name,
        "removed": p.removed,
        "avg_hops": p.avg_hops,
        "connected_pairs": p.connected_pair_count,
        "disconnected_pairs": p.disconnected_pair_count,
        "stddev": p.stddev,
    }


def average_hop_count(g: Graph) -> tuple[float | None, int, int]:
    """Mean hop count over connected unordered pairs.

    Returns ``(avg_hops, connected, disconnected)``; ``avg_hops`` is None
    when no pair is connected.
    """
    n = len(g)
    if n < 2:
        raise GraphError("average hop count needs at least 2 nodes")
    d = all_pairs_distances(g).array
    upper = d[np.triu_indices(n, k=1)]
    reach = upper[upper > 0]
    connected = int(reach.size)
    disconnected = n * (n - 1) // 2 - connected
    if connected == 0:
        return None, 0, disconnected
    return int(reach.sum()) / connected, connected, disconnected


def _measure(g: Graph, removed: int) -> HopCurvePoint:
    if len(g) < 2:
        return HopCurvePoint(removed, None, 0, 0)
    avg, conn, disc = average_hop_count(g)
    return HopCurvePoint(removed, avg, conn, disc)


def _removal_curve(g: Graph, order: Sequence[int]) -> list[HopCurvePoint]:
    curve = [_measure(g, 0)]
    current = g
    for k, victim in enumerate(order, start=1):
        current = remove_nodes(current, {victim})
        curve.append(_measure(current, k))
    return curve


def targeted_order(cfg: AttackConfig, metric: Metric) -> list[int]:
    """Nodes to fail, in removal order, for a centrality-targeted attack."""
    if cfg.recompute_mode is RecomputeMode.STATIC:
        return rank_nodes(compute(cfg.graph, metric), cfg.max_removals).nodes
    order: list[int] = []
    current = cfg.graph
    for _ in range(cfg.max_removals):
        if metric is Metric.BETWEENNESS and len(current) < 3:
            # no node can lie between two others: every score is zero
            victim = current.nodes[0]
        else:
            victim = rank_nodes(compute(current, metric), 1).nodes[0]
        order.append(victim)
        current = remove_nodes(current, {victim})
    return order


def run_targeted_attack(cfg: AttackConfig, metric: Metric) -> list[HopCurvePoint]:
    """Cumulatively fail the top-ranked nodes and measure after each removal."""
    metric = Metric(metric)
    if metric not in cfg.metrics:
        raise ValueError(f"{metric.value} is not among the configured metrics")
    if cfg.max_removals >= len(cfg.graph):
        raise GraphError("attack would remove every node")
    return _removal_curve(cfg.graph, targeted_order(cfg, metric))


def random_order(g: Graph, count: int, seed: int) -> list[int]:
    nodes = list(g.nodes)
    SplitMix64(seed).shuffle(nodes)
    return nodes[:count]


def _mean_points(curves: list[list[HopCurvePoint]]) -> list[HopCurvePoint]:
    out = []
    for k in range(len(curves[0])):
        pts = [c[k] for c in curves]
        hops = [p.avg_hops for p in pts if p.avg_hops is not None]
        undefined = len(pts) - len(hops)
        avg = _stable_mean(hops) if hops else None
        std = statistics.pstdev(hops) if hops else None
        conn = _stable_mean([p.connected_pair_count for p in pts])
        disc = _stable_mean([p.disconnected_pair_count for p in pts])
        out.append(HopCurvePoint(k, avg, conn, disc, std, undefined))
    return out


def _stable_mean(xs: Sequence[float]) -> float:
    # exactly-rounded sum; identical inputs give back the input value
    if all(x == xs[0] for x in xs):
        return xs[0]
    return statistics.fmean(xs)


def run_random_baseline(cfg: AttackConfig) -> list[HopCurvePoint]:
    """Pointwise mean over ``random_trials`` uniformly random removal orders.

    Trial ``t`` shuffles with seed ``cfg.seed + t``. Points with no
    connected pair are left out of the mean and counted in
    ``undefined_trials``; ``stddev`` is the population deviation across
    the remaining trials.
    """
    curves = [
        _removal_curve(cfg.graph, random_order(cfg.graph, cfg.max_removals, cfg.seed + t))
        for t in range(cfg.random_trials)
    ]
    return _mean_points(curves)


def run_attack_experiment(cfg: AttackConfig) -> AttackResult:
    per_metric = {}
    orders = {}
    for metric in cfg.metrics:
        orders[metric] = targeted_order(cfg, metric)
        per_metric[metric] = _removal_curve(cfg.graph, orders[metric])
    return AttackResult(per_metric, run_random_baseline(cfg), orders)


def default_max_removals(n: int) -> int:
    """5 on small networks, 20% of the nodes on large ones."""
    if n <= 25:
        return min(5, n - 1)
    return max(1, math.floor(0.2 * n))


def parse_metrics(items: Iterable[str] | str) -> tuple[Metric, ...]:
    if isinstance(items, str):
        items = items.split(",")
    names = [s for s in (x.strip() for x in items) if s]
    if names == ["all"]:
        return tuple(Metric)
    return tuple(dict.fromkeys(Metric.parse(s) for s in names))
