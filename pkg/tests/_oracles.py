"""Independent oracles used to freeze expected values.

Deliberately implemented with different algorithms than the package:
distances by Floyd-Warshall instead of BFS, tree checking by union-find.
"""

from __future__ import annotations

import random

INF = 10**9


def floyd_warshall(n: int, edges) -> list[list[int]]:
    dist = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    for u, v in edges:
        dist[u][v] = dist[v][u] = 1
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik == INF:
                continue
            row_k = dist[k]
            row_i = dist[i]
            for j in range(n):
                alt = dik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    return dist


def area_oracle(n: int, edges, root: int, byz) -> tuple[set, set, set]:
    """near / strictly_near / frontier straight from the distance formulas."""
    dist = floyd_warshall(n, edges)
    near, strict = set(), set()
    for v in range(n):
        if v == root or v in byz:
            continue
        if not byz:
            continue
        d_b = min(dist[v][b] for b in byz)
        if d_b <= dist[v][root]:
            near.add(v)
        if d_b < dist[v][root]:
            strict.add(v)
    return near, strict, near - strict


def is_parent_spanning_tree(n: int, edges, root: int, parents) -> bool:
    """Union-find check that the parent pointers form a spanning tree."""
    edge_set = {(min(u, v), max(u, v)) for u, v in edges}
    uf = list(range(n))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    count = 0
    for v in range(n):
        if v == root:
            if parents[v] is not None:
                return False
            continue
        p = parents[v]
        if p is None or (min(v, p), max(v, p)) not in edge_set:
            return False
        ru, rv = find(v), find(p)
        if ru == rv:
            return False
        uf[ru] = rv
        count += 1
    return count == n - 1


def component_of(n: int, edges, start: int, removed) -> set:
    """Vertices reachable from start after deleting ``removed``."""
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in removed and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def random_connected_edges(rng: random.Random, n: int, extra_prob: float = 0.3):
    """Random spanning tree plus extra edges; always connected."""
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    present = {(min(u, v), max(u, v)) for u, v in edges}
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in present and rng.random() < extra_prob:
                edges.append((u, v))
                present.add((u, v))
    return edges
