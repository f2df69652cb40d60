"""Social centrality metrics over mesh topologies.

All four metrics return :class:`CentralityScores` keyed by node id. Degree,
closeness and betweenness use the usual social-network normalizations so
values on a connected graph fall in [0, 1]; eigenvector scores are the
unit-norm principal eigenvector.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from meshsocial.graph import Graph, GraphError, all_pairs_distances


TIE_DECIMALS = 12


class Metric(str, enum.Enum):
    DEGREE = "degree"
    CLOSENESS = "closeness"
    BETWEENNESS = "betweenness"
    EIGENVECTOR = "eigenvector"

    @classmethod
    def parse(cls, text: str) -> Metric:
        try:
            return cls(text.strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown metric {text!r}; expected one of {names}") from None


class ConvergenceError(RuntimeError):
    """Power iteration hit its iteration cap; ``last`` holds the final iterate."""

    def __init__(self, message: str, last: dict[int, float]) -> None:
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class CentralityScores:
    metric: Metric
    scores: Mapping[int, float]

    def __getitem__(self, v: int) -> float:
        return self.scores[v]

    def __len__(self) -> int:
        return len(self.scores)


@dataclass(frozen=True)
class RankedNodes:
    metric: Metric
    order: tuple[tuple[int, float], ...]

    @property
    def nodes(self) -> list[int]:
        return [v for v, _ in self.order]


def degree_centrality(g: Graph) -> CentralityScores:
    n = len(g)
    if n < 2:
        raise GraphError("degree centrality needs at least 2 nodes")
    return CentralityScores(Metric.DEGREE, {v: g.degree(v) / (n - 1) for v in g.nodes})


def closeness_centrality(g: Graph) -> CentralityScores:
    """(n - 1) divided by the sum of hop counts to reachable nodes.

    Unreachable nodes are left out of the sum but the numerator stays
    n - 1, so on a disconnected graph small components can score above 1.
    Isolated nodes score 0.
    """
    n = len(g)
    if n < 2:
        raise GraphError("closeness centrality needs at least 2 nodes")
    d = all_pairs_distances(g).array
    totals = np.where(d > 0, d, 0).sum(axis=1)
    scores = {
        v: (n - 1) / int(totals[k]) if totals[k] > 0 else 0.0
        for k, v in enumerate(g.nodes)
    }
    return CentralityScores(Metric.CLOSENESS, scores)


def _brandes_dependencies(g: Graph, source: int) -> dict[int, float]:
    # single-source BFS DAG followed by reverse-order dependency accumulation
    sigma = {source: 1}
    dist = {source: 0}
    preds: dict[int, list[int]] = {source: []}
    order = []
    queue = deque([source])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0
                preds[w] = []
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    delta = dict.fromkeys(order, 0.0)
    for w in reversed(order):
        coeff = (1.0 + delta[w]) / sigma[w]
        for v in preds[w]:
            delta[v] += sigma[v] * coeff
    delta[source] = 0.0
    return delta


def betweenness_centrality(g: Graph) -> CentralityScores:
    """Share of shortest paths through each node, over unordered pairs.

    Raw pair-dependency sums are divided by (n - 1)(n - 2) / 2, the number
    of unordered pairs not involving the node.
    """
    n = len(g)
    if n < 3:
        raise GraphError("betweenness centrality needs at least 3 nodes")
    raw = dict.fromkeys(g.nodes, 0.0)
    for s in g.nodes:
        for v, dep in _brandes_dependencies(g, s).items():
            raw[v] += dep
    # every unordered pair was visited from both ends
    norm = (n - 1) * (n - 2)
    return CentralityScores(Metric.BETWEENNESS, {v: raw[v] / norm for v in g.nodes})


def eigenvector_centrality(
    g: Graph, tol: float = 1e-10, max_iter: int = 10_000
) -> CentralityScores:
    """Principal adjacency eigenvector by power iteration.

    Iterates x <- (A + I) x from the uniform vector with Euclidean
    normalization. The identity shift keeps the eigenvectors of A but
    removes the -lambda mirror eigenvalue, so bipartite graphs (stars,
    paths) converge instead of oscillating. Stops once the largest per-node
    change drops below ``tol / (1 + lambda)``, which bounds the fixed-point
    residual of A itself by roughly ``tol``.
    """
    n = len(g)
    if n == 0:
        raise GraphError("empty graph")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not g.is_connected():
        raise GraphError("eigenvector centrality needs a connected graph")
    a = g.adjacency_matrix().astype(float)
    x = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(max_iter):
        ax = a @ x
        lam = float(x @ ax)
        nxt = ax + x
        nxt /= np.linalg.norm(nxt)
        change = float(np.max(np.abs(nxt - x)))
        x = nxt
        if change < tol / (1.0 + abs(lam)):
            return CentralityScores(
                Metric.EIGENVECTOR, {v: float(x[k]) for k, v in enumerate(g.nodes)}
            )
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps",
        {v: float(x[k]) for k, v in enumerate(g.nodes)},
    )


def compute(g: Graph, metric: Metric) -> CentralityScores:
    if metric is Metric.DEGREE:
        return degree_centrality(g)
    if metric is Metric.CLOSENESS:
        return closeness_centrality(g)
    if metric is Metric.BETWEENNESS:
        return betweenness_centrality(g)
    return eigenvector_centrality(g)


def rank_nodes(s: CentralityScores, k: int | None = None) -> RankedNodes:
    """Top-``k`` nodes by descending score; equal scores go to the lower id.

    Scores agreeing to 12 decimal places count as equal, so accumulated
    float error cannot reorder symmetric nodes.
    """
    if k is None:
        k = len(s.scores)
    if k < 0 or k > len(s.scores):
        raise ValueError(f"k={k} out of range for {len(s.scores)} nodes")
    order = sorted(s.scores.items(), key=lambda kv: (-round(kv[1], TIE_DECIMALS), kv[0]))
    return RankedNodes(s.metric, tuple(order[:k]))


def rayleigh_quotient(g: Graph, s: CentralityScores) -> float:
    x = np.array([s.scores[v] for v in g.nodes])
    return float(x @ (g.adjacency_matrix() @ x) / (x @ x))
