"""Undirected, unweighted mesh topologies and hop-count machinery."""

from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Iterator, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from meshsocial.rng import SplitMix64, derive_seed

MAX_CONNECT_RETRIES = 1000


class GraphError(ValueError):
    """Invalid topology input or an operation on an unknown node."""


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class Graph:
    """Immutable undirected simple graph over non-negative integer node ids.

    Nodes are kept in ascending id order; that order is the tie-break used
    throughout the package. ``labels`` maps ids to their original text
    labels (e.g. IP addresses) when the graph came from a file.
    """

    __slots__ = ("_nodes", "_adj", "_labels", "_index")

    def __init__(
        self,
        nodes: Iterable[int],
        edges: Iterable[tuple[int, int]] = (),
        labels: Mapping[int, str] | None = None,
    ) -> None:
        node_list = sorted(set(nodes))
        for v in node_list:
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise GraphError(f"node ids must be non-negative integers, got {v!r}")
        adj: dict[int, set[int]] = {int(v): set() for v in node_list}
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if u not in adj or v not in adj:
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside the node set")
            adj[u].add(v)
            adj[v].add(u)
        self._nodes = tuple(int(v) for v in node_list)
        self._adj = {v: frozenset(nb) for v, nb in adj.items()}
        self._labels = {v: labels[v] for v in self._nodes if labels and v in labels}
        self._index = {v: i for i, v in enumerate(self._nodes)}

    @property
    def nodes(self) -> tuple[int, ...]:
        return self._nodes

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (u, v) for u in self._nodes for v in sorted(self._adj[u]) if u < v
        )

    @property
    def labels(self) -> Mapping[int, str]:
        return dict(self._labels)

    def label(self, v: int) -> str:
        return self._labels.get(v, str(v))

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"unknown node {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def index(self, v: int) -> int:
        """Position of ``v`` in ascending id order."""
        return self._index[v]

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[int]:
        return iter(self._nodes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._adj == other._adj
            and self._labels == other._labels
        )

    def __hash__(self) -> int:
        return hash((self._nodes, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={len(self)}, m={self.n_edges})"

    def relabel(self, mapping: Mapping[int, int]) -> Graph:
        """Return the graph with node ids renamed through ``mapping``."""
        return Graph(
            (mapping[v] for v in self._nodes),
            ((mapping[u], mapping[v]) for u, v in self.edges),
            {mapping[v]: s for v, s in self._labels.items()},
        )

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 matrix in ascending id order."""
        n = len(self._nodes)
        a = np.zeros((n, n), dtype=np.int8)
        for u, v in self.edges:
            i, j = self._index[u], self._index[v]
            a[i, j] = a[j, i] = 1
        return a

    def is_connected(self) -> bool:
        if not self._nodes:
            return True
        return len(bfs_distances(self, self._nodes[0])) == len(self._nodes)


def bfs_distances(g: Graph, source: int) -> dict[int, int]:
    """Hop counts from ``source`` to every node reachable from it."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.neighbors(u):
            if w not in dist:
                dist[w] = du
                queue.append(w)
    return dist


class DistanceMatrix:
    """All-pairs hop counts; ``None`` marks an unreachable pair.

    ``array`` holds the same data in ascending node-id order with -1 for
    unreachable pairs.
    """

    UNREACHABLE = -1

    def __init__(self, nodes: tuple[int, ...], array: np.ndarray) -> None:
        self.nodes = nodes
        self.array = array
        self.array.setflags(write=False)
        self._index = {v: i for i, v in enumerate(nodes)}

    def __getitem__(self, pair: tuple[int, int]) -> int | None:
        i, j = pair
        d = int(self.array[self._index[i], self._index[j]])
        return None if d < 0 else d

    def row(self, v: int) -> dict[int, int]:
        """Reachable targets of ``v`` (including ``v`` itself) with hop counts."""
        r = self.array[self._index[v]]
        return {w: int(r[k]) for k, w in enumerate(self.nodes) if r[k] >= 0}


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    """Exact unweighted shortest-path hop counts between every node pair."""
    n = len(g)
    if n == 0:
        return DistanceMatrix((), np.zeros((0, 0), dtype=np.int64))
    a = g.adjacency_matrix()
    d = shortest_path(csr_matrix(a), method="D", directed=False, unweighted=True)
    out = np.full((n, n), DistanceMatrix.UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(d)
    out[finite] = d[finite].astype(np.int64)
    return DistanceMatrix(g.nodes, out)


def k_hop_neighborhood(g: Graph, i: int, k: int) -> set[int]:
    """Nodes within 1..k hops of ``i``, excluding ``i`` itself."""
    if i not in g:
        raise GraphError(f"unknown node {i}")
    if k not in (1, 2):
        raise GraphError(f"k must be 1 or 2, got {k}")
    out = set(g.neighbors(i))
    if k == 2:
        for v in list(out):
            out |= g.neighbors(v)
    out.discard(i)
    return out


def remove_nodes(g: Graph, victims: Iterable[int]) -> Graph:
    """Copy of ``g`` without ``victims`` and their incident edges."""
    victims = set(victims)
    missing = sorted(v for v in victims if v not in g)
    if missing:
        raise GraphError(f"cannot remove unknown nodes {missing}")
    keep = [v for v in g.nodes if v not in victims]
    edges = [(u, v) for u, v in g.edges if u not in victims and v not in victims]
    return Graph(keep, edges, g.labels)


def connected_pairs(g: Graph) -> int:
    """Number of unordered node pairs joined by some path."""
    seen: set[int] = set()
    total = 0
    for v in g.nodes:
        if v in seen:
            continue
        comp = bfs_distances(g, v)
        seen.update(comp)
        c = len(comp)
        total += c * (c - 1) // 2
    return total


def load_edge_list(text: str) -> Graph:
    """Parse an edge-list document into a Graph.

    Each non-blank line that does not start with ``#`` holds two
    whitespace-separated labels. Ids are assigned in order of first
    appearance; duplicate and reversed lines collapse into one edge.
    """
    ids: dict[str, int] = {}
    edges: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(lineno, f"expected two labels, got {len(parts)}")
        a, b = parts
        if a == b:
            raise EdgeListParseError(lineno, f"self-loop on {a!r}")
        for lab in (a, b):
            if lab not in ids:
                ids[lab] = len(ids)
        u, v = ids[a], ids[b]
        edges.add((min(u, v), max(u, v)))
    return Graph(ids.values(), edges, {v: lab for lab, v in ids.items()})


def format_edge_list(g: Graph) -> str:
    """Serialize ``g`` in the edge-list format (isolated nodes are lost)."""
    lines = [f"# nodes={len(g)} edges={g.n_edges}"]
    lines += [f"{g.label(u)} {g.label(v)}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def random_geometric_graph(n: int, target_mean_degree: float, seed: int) -> Graph:
    """Connected unit-square random geometric graph.

    Points are uniform in [0, 1)^2; nodes are linked when their Euclidean
    distance is at most sqrt(d / (pi * (n - 1))), which gives expected mean
    degree ``d`` ignoring border effects. Disconnected draws are retried
    up to 1000 times; attempt ``k`` draws from the stream keyed by
    ``(seed, k)`` so that distinct seeds never share a retry sequence.
    """
    if n < 2:
        raise GraphError("need at least 2 nodes")
    if not target_mean_degree > 0:
        raise GraphError("target mean degree must be positive")
    radius = math.sqrt(target_mean_degree / (math.pi * (n - 1)))
    for attempt in range(MAX_CONNECT_RETRIES + 1):
        rng = SplitMix64(derive_seed(seed, attempt))
        pts = np.array([(rng.random(), rng.random()) for _ in range(n)])
        diff = pts[:, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        iu, ju = np.nonzero(np.triu(d2 <= radius * radius, k=1))
        g = Graph(range(n), zip(iu.tolist(), ju.tolist()))
        if g.is_connected():
            return g
    raise GraphError(
        f"no connected graph for n={n}, degree={target_mean_degree} "
        f"after {MAX_CONNECT_RETRIES} retries"
    )
