"""Independent brute-force references used by the test suite.

Nothing here imports the code under test beyond the Graph container.
"""

from __future__ import annotations

import itertools
import math


def simple_paths(g, s, t):
    """Every simple path from s to t, by depth-first enumeration."""
    out = []

    def walk(path):
        u = path[-1]
        if u == t:
            out.append(tuple(path))
            return
        for w in sorted(g.neighbors(u)):
            if w not in path:
                path.append(w)
                walk(path)
                path.pop()

    walk([s])
    return out


def brute_distance(g, s, t):
    paths = simple_paths(g, s, t)
    return min(len(p) - 1 for p in paths) if paths else None


def brute_betweenness(g):
    """Count every shortest path explicitly, normalise by (n-1)(n-2)/2."""
    n = len(g)
    raw = dict.fromkeys(g.nodes, 0.0)
    for s, t in itertools.combinations(g.nodes, 2):
        paths = simple_paths(g, s, t)
        if not paths:
            continue
        best = min(len(p) for p in paths)
        shortest = [p for p in paths if len(p) == best]
        for v in g.nodes:
            if v in (s, t):
                continue
            raw[v] += sum(v in p for p in shortest) / len(shortest)
    norm = (n - 1) * (n - 2) / 2
    return {v: raw[v] / norm for v in g.nodes}


def brute_avg_hops(g):
    """(mean hop count over connected pairs or None, connected, disconnected)."""
    total = conn = disc = 0
    for s, t in itertools.combinations(g.nodes, 2):
        d = brute_distance(g, s, t)
        if d is None:
            disc += 1
        else:
            conn += 1
            total += d
    return (total / conn if conn else None), conn, disc


def dense_eigenvector(g):
    """Principal eigenvector via LAPACK, sign-fixed to be non-negative."""
    import numpy as np

    w, v = np.linalg.eigh(g.adjacency_matrix().astype(float))
    x = v[:, int(np.argmax(w))]
    x = x if x.sum() >= 0 else -x
    return {node: float(x[k]) for k, node in enumerate(g.nodes)}, float(w.max())


def finalizer_by_hand(x):
    """Textbook SplitMix64 finalizer written independently of the package."""
    m = 2**64
    x %= m
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) % m
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) % m
    x ^= x >> 31
    return x


def win_probability(counts, i):
    """Chance that i holds the maximum of sum(counts) iid continuous draws."""
    return counts[i] / sum(counts)


def binomial_se(p, trials):
    return math.sqrt(p * (1 - p) / trials)
