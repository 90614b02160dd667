"""Directed acyclic graphs, bidirectional graphs, and the d-separation oracle.

The Dag class is the ground-truth object for benchmarks and for oracle-mode
independence testing; BiGraph backs the per-node candidate-parent machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CycleDetected,
    DuplicateEdge,
    InfeasibleEdgeCount,
    NodeOutOfRange,
    UnknownNode,
)


@dataclass(frozen=True)
class Dag:
    """Immutable DAG over named nodes, edges stored as (parent, child) index pairs."""

    names: tuple
    edges: frozenset
    parents: tuple = field(repr=False)
    children: tuple = field(repr=False)

    @property
    def d(self) -> int:
        return len(self.names)

    @staticmethod
    def from_edges(names, edges) -> "Dag":
        """Build a validated Dag from node names and (parent_name, child_name) pairs."""
        names = tuple(names)
        index = {n: i for i, n in enumerate(names)}
        if len(index) != len(names):
            raise UnknownNode("duplicate node names")
        idx_edges = []
        for a, b in edges:
            if a not in index or b not in index:
                raise UnknownNode(f"edge ({a}, {b}) references undeclared node")
            idx_edges.append((index[a], index[b]))
        return Dag.from_index_edges(names, idx_edges)

    @staticmethod
    def from_index_edges(names, edges) -> "Dag":
        names = tuple(str(n) for n in names)
        d = len(names)
        seen = set()
        for a, b in edges:
            if not (0 <= a < d and 0 <= b < d):
                raise NodeOutOfRange(f"edge ({a}, {b}) out of range for {d} nodes")
            if a == b:
                raise CycleDetected(f"self-loop on node {a}")
            if (a, b) in seen:
                raise DuplicateEdge(f"edge ({a}, {b}) listed twice")
            seen.add((a, b))
        parents = [[] for _ in range(d)]
        children = [[] for _ in range(d)]
        for a, b in seen:
            parents[b].append(a)
            children[a].append(b)
        dag = Dag(
            names=names,
            edges=frozenset(seen),
            parents=tuple(tuple(sorted(p)) for p in parents),
            children=tuple(tuple(sorted(c)) for c in children),
        )
        dag.topological_order()  # raises CycleDetected on failure
        return dag

    def topological_order(self):
        """Kahn's algorithm; raises CycleDetected if no full ordering exists."""
        indeg = [len(p) for p in self.parents]
        queue = [i for i in range(self.d) if indeg[i] == 0]
        order = []
        while queue:
            v = queue.pop()
            order.append(v)
            for c in self.children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != self.d:
            raise CycleDetected("graph contains a directed cycle")
        return order

    def sources(self) -> set:
        return {i for i in range(self.d) if not self.parents[i]}

    def descendants(self, x: int) -> set:
        self._check(x)
        out, stack = set(), [x]
        while stack:
            v = stack.pop()
            for c in self.children[v]:
                if c not in out:
                    out.add(c)
                    stack.append(c)
        return out

    def spouses(self, x: int) -> set:
        """Other parents of x's children."""
        self._check(x)
        sp = set()
        for c in self.children[x]:
            sp.update(self.parents[c])
        sp.discard(x)
        return sp

    def markov_blanket(self, x: int) -> set:
        self._check(x)
        return set(self.parents[x]) | set(self.children[x]) | self.spouses(x)

    def d_separated(self, x: int, y: int, z) -> bool:
        """Active-trail reachability (ball algorithm); True iff no active path x..y given z."""
        self._check(x)
        self._check(y)
        z = set(z)
        for v in z:
            self._check(v)
        if x == y:
            raise NodeOutOfRange("x and y must differ")
        if x in z or y in z:
            raise NodeOutOfRange("x and y must not be in the conditioning set")

        # ancestors of z (inclusive), for collider activation
        anz = set(z)
        stack = list(z)
        while stack:
            v = stack.pop()
            for p in self.parents[v]:
                if p not in anz:
                    anz.add(p)
                    stack.append(p)

        UP, DOWN = 0, 1  # direction the trail entered the node from
        visited = set()
        stack = [(x, UP)]
        while stack:
            v, dr = stack.pop()
            if (v, dr) in visited:
                continue
            visited.add((v, dr))
            if v == y:
                return False
            if dr == UP and v not in z:
                for p in self.parents[v]:
                    stack.append((p, UP))
                for c in self.children[v]:
                    stack.append((c, DOWN))
            elif dr == DOWN:
                if v not in z:
                    for c in self.children[v]:
                        stack.append((c, DOWN))
                if v in anz:
                    for p in self.parents[v]:
                        stack.append((p, UP))
        return True

    def _check(self, v: int):
        if not (0 <= v < self.d):
            raise NodeOutOfRange(f"node {v} out of range for {self.d} nodes")

    def save(self, path):
        """Edge-list format: one header line with node names, then parent<TAB>child lines."""
        lines = ["# nodes: " + ",".join(self.names)]
        for a, b in sorted(self.edges):
            lines.append(f"{self.names[a]}\t{self.names[b]}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @staticmethod
    def load(path) -> "Dag":
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("# nodes:"):
                raise UnknownNode(f"{path}: missing '# nodes:' header")
            names = [n for n in header[len("# nodes:"):].strip().split(",") if n]
            edges = []
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                a, b = line.split("\t")
                edges.append((a, b))
        return Dag.from_edges(names, edges)


def dag_from_edges(names, edges) -> Dag:
    return Dag.from_edges(names, edges)


def sources(dag: Dag) -> set:
    return dag.sources()


def d_separated(dag: Dag, x: int, y: int, z) -> bool:
    return dag.d_separated(x, y, z)


def true_markov_blanket(dag: Dag, x: int) -> set:
    return dag.markov_blanket(x)


class BiGraph:
    """Undirected graph over integer node ids; adjacency kept as neighbor sets."""

    def __init__(self, node_ids, edges=()):
        self.node_ids = list(node_ids)
        self.adj = {v: set() for v in self.node_ids}
        for u, v in edges:
            self.add_edge(u, v)

    def add_edge(self, u, v):
        if u == v:
            raise NodeOutOfRange("self-loop in BiGraph")
        if u not in self.adj or v not in self.adj:
            raise UnknownNode(f"edge ({u}, {v}) references unknown node")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def neighbors(self, v):
        return self.adj[v]

    @property
    def n(self):
        return len(self.node_ids)

    def edge_count(self):
        return sum(len(s) for s in self.adj.values()) // 2


def degeneracy(g: BiGraph):
    """Smallest p such that every subgraph has a node of degree <= p.

    Returns (p, ordering) where ordering is the min-degree removal order that
    certifies p.
    """
    deg = {v: len(g.adj[v]) for v in g.node_ids}
    alive = set(g.node_ids)
    ordering = []
    p = 0
    while alive:
        v = min(alive, key=lambda u: (deg[u], u))
        p = max(p, deg[v])
        ordering.append(v)
        alive.remove(v)
        for u in g.adj[v]:
            if u in alive:
                deg[u] -= 1
    return p, ordering


def gen_random_dag(kind, d, e, seed, bipartite_split=None) -> Dag:
    """Random DAG with exactly e edges; deterministic under seed.

    kinds: 'erdos_renyi' (uniform pairs, oriented by a random permutation),
    'scale_free' (preferential attachment), 'bipartite' (two layers, edges
    layer1 -> layer2 only; split defaults to ceil(d/2)/floor(d/2)).
    """
    if d < 1 or e < 0:
        raise InfeasibleEdgeCount(f"d={d}, e={e}")
    rng = np.random.default_rng(seed)
    names = [f"X{i}" for i in range(d)]
    max_pairs = d * (d - 1) // 2

    if kind == "erdos_renyi":
        if e > max_pairs:
            raise InfeasibleEdgeCount(f"e={e} exceeds {max_pairs} pairs for d={d}")
        pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
        chosen = rng.choice(len(pairs), size=e, replace=False) if e else []
        perm = rng.permutation(d)
        edges = [(int(perm[pairs[k][0]]), int(perm[pairs[k][1]])) for k in chosen]
    elif kind == "scale_free":
        if e > max_pairs:
            raise InfeasibleEdgeCount(f"e={e} exceeds {max_pairs} pairs for d={d}")
        # quota per arriving node, capped by the number of earlier nodes
        quota = np.zeros(d, dtype=int)
        remaining = e
        level = 0
        while remaining > 0:
            for v in range(1, d):
                if remaining == 0:
                    break
                if quota[v] < v and quota[v] <= level:
                    quota[v] += 1
                    remaining -= 1
            level += 1
        degree = np.zeros(d)
        edges = []
        for v in range(1, d):
            k = int(quota[v])
            if k == 0:
                continue
            w = degree[:v] + 1.0
            targets = rng.choice(v, size=k, replace=False, p=w / w.sum())
            for t in targets:
                edges.append((int(t), v))
                degree[t] += 1
                degree[v] += 1
    elif kind == "bipartite":
        if bipartite_split is None:
            n1 = (d + 1) // 2
        else:
            n1 = int(bipartite_split)
            if not (0 < n1 < d):
                raise InfeasibleEdgeCount(f"bad bipartite split {n1} for d={d}")
        n2 = d - n1
        if e > n1 * n2:
            raise InfeasibleEdgeCount(f"e={e} exceeds {n1 * n2} cross pairs for split {n1}/{n2}")
        perm = rng.permutation(d)
        layer1, layer2 = perm[:n1], perm[n1:]
        pairs = [(int(a), int(b)) for a in layer1 for b in layer2]
        chosen = rng.choice(len(pairs), size=e, replace=False) if e else []
        edges = [pairs[k] for k in chosen]
    else:
        raise ValueError(f"unknown graph kind: {kind}")
    return Dag.from_index_edges(names, edges)


def gen_random_bigraph(n, e, seed) -> BiGraph:
    """Uniform random undirected graph with exactly e edges."""
    max_pairs = n * (n - 1) // 2
    if e > max_pairs:
        raise InfeasibleEdgeCount(f"e={e} exceeds {max_pairs} pairs for n={n}")
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = rng.choice(max_pairs, size=e, replace=False) if e else []
    return BiGraph(range(n), [pairs[k] for k in chosen])
