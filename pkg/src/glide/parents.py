"""Candidate parent sets from Markov-blanket cores.

The candidate parents of x are the maximal cliques of the mutual-blanket graph
G'(x) over the spouse-free core M*(x), plus the empty set. Enumeration uses a
virtual-root DFS with leaf-containment pruning; a classical Bron-Kerbosch with
pivoting is kept as a reference implementation for cross-checking.
"""

from __future__ import annotations

from .blanket import BlanketMap
from .errors import CandidateExplosion
from .graphs import BiGraph

DEFAULT_MAX_CANDIDATES = 10_000


def build_bigraph(x, core, blankets: BlanketMap) -> BiGraph:
    """G'(x): nodes are M*(x), an edge joins U, V iff each is in the other's
    blanket."""
    core = sorted(core)
    g = BiGraph(core)
    for i, u in enumerate(core):
        for v in core[i + 1:]:
            if v in blankets.blankets[u] and u in blankets.blankets[v]:
                g.add_edge(u, v)
    return g


def maximal_cliques(g: BiGraph, limit=None) -> list:
    """All maximal cliques via DFS from a virtual root connected to every node.

    Cliques grow in ascending vertex order so each is visited once; `common`
    tracks every vertex adjacent to the whole path, and a path is a maximal
    clique exactly when that set is empty. A branch is pruned when its path
    plus remaining reach is contained in an already-recorded clique (everything
    below it would be a non-maximal subset of that clique).
    """
    leaves = []

    def dfs(path, common):
        if not common:
            leaves.append(frozenset(path))
            if limit is not None and len(leaves) > limit:
                raise CandidateExplosion(f"more than {limit} maximal cliques")
            return
        last = max(path) if path else -1
        for v in sorted(common):
            if v <= last:
                continue
            new_path = path | {v}
            new_common = common & g.adj[v]
            if any(new_path | new_common <= leaf for leaf in leaves):
                continue
            dfs(new_path, new_common)

    dfs(frozenset(), set(g.node_ids))
    # ascending growth can reach a non-maximal dead end (all extensions are
    # smaller-indexed); keep only the maximal ones
    out = [c for c in set(leaves)
           if not any(c < other for other in leaves if other is not c)]
    return sorted(out, key=lambda c: (-len(c), sorted(c)))


def plausible_parent_sets(blankets: BlanketMap, d,
                          max_candidates=DEFAULT_MAX_CANDIDATES) -> dict:
    """Per-variable candidate lists: maximal cliques of G'(x) plus the empty
    set, sorted by size descending then lexicographically."""
    out = {}
    for x in range(d):
        g = build_bigraph(x, blankets.cores.get(x, frozenset()), blankets)
        try:
            cliques = maximal_cliques(g, limit=max_candidates)
        except CandidateExplosion as exc:
            raise CandidateExplosion(
                f"variable {x}: {exc}; the mutual-blanket graph is too dense "
                "(high degeneracy)") from exc
        cands = [tuple(sorted(c)) for c in cliques if c]
        cands.append(())
        out[x] = cands
    return out


def bron_kerbosch_reference(g: BiGraph) -> list:
    """Classical Bron-Kerbosch with pivoting; reference oracle for
    maximal_cliques."""
    out = []

    def bk(r, p, x):
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: (len(g.adj[u] & p), -u))
        for v in sorted(p - g.adj[pivot]):
            bk(r | {v}, p & g.adj[v], x & g.adj[v])
            p = p - {v}
            x = x | {v}

    bk(frozenset(), set(g.node_ids), set())
    return sorted(out, key=lambda c: (-len(c), sorted(c)))
