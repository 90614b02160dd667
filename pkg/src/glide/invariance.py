"""Invariance scoring, minimum-variance parent selection, and the full pipeline.

The driving fact: when the priors of the basis variables are re-weighted across
environments, the conditional P_i(X | Z) stays constant exactly when Z blocks
every path from the basis to X — in the faithful case, when Z is Pa[X]. Data
mode measures the variance of the empirical conditionals across downsampled
environments; oracle mode decides the same zero/nonzero question directly by
d-separation (variance of P_i(X|Z) is zero iff X is d-separated from the
unconditioned basis variables given Z).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .augment import EnvironmentSet, make_environments
from .basis import dependence_matrix, find_basis
from .blanket import blanket_map
from .data import Dataset
from .errors import GlideError
from .graphs import Dag
from .indep import DataSource, OracleSource
from .parents import plausible_parent_sets

SUBSET_REFINEMENT_CAP = 12  # only refine cliques with <= 2^12 subsets


@dataclass
class InvarianceScore:
    candidate: tuple
    variance: float
    coverage: float = 1.0
    per_env_tables: object = None


@dataclass
class GlideConfig:
    m: int = 30
    gamma_o: float = 0.5
    epsilon: float = 1e-3
    ci_alpha: float = 0.05
    bins: int = 4
    laplace_alpha: float = 1.0
    pool: int = 10_000
    seed: int = 0
    min_rows: int = 100
    cap_k: int = 4
    max_candidates: int = 10_000
    min_env_fraction: float = 0.2

    def __post_init__(self):
        if not (2 <= self.m):
            raise ValueError("m must be >= 2")
        if not (0.0 < self.gamma_o < 1.0):
            raise ValueError("gamma_o must be in (0, 1)")
        if self.epsilon <= 0 or not (0.0 < self.ci_alpha < 1.0):
            raise ValueError("bad threshold configuration")


def _conditional_tables(env: Dataset, x, z):
    """(config codes, count matrix) of x within each observed z-configuration."""
    cx = env.cards[x]
    zcode = np.zeros(env.n, dtype=np.int64)
    for v in z:
        zcode = zcode * env.cards[v] + env.col(v)
    configs, inv = np.unique(zcode, return_inverse=True)
    counts = np.zeros((len(configs), cx))
    np.add.at(counts, (inv, env.col(x)), 1.0)
    return configs, counts


def invariance_score(envs: EnvironmentSet, x, z, cfg: GlideConfig) -> InvarianceScore:
    """Variance of the empirical conditionals P_i(x | z) across environments.

    Conditionals are aligned on the z-configurations observed in every
    environment; the squared distance to the cell-wise mean is weighted by the
    pooled configuration frequency, so rare strata cannot dominate. No common
    configuration yields an infinite (disqualifying) variance.
    """
    z = tuple(sorted(z))
    if x in z:
        raise ValueError("x must not be in the conditioning set")
    alpha = cfg.laplace_alpha
    per_env = [_conditional_tables(e, x, z) for e in envs.environments]

    common = per_env[0][0]
    union = set(per_env[0][0].tolist())
    for configs, _ in per_env[1:]:
        common = np.intersect1d(common, configs, assume_unique=True)
        union.update(configs.tolist())
    if len(common) == 0:
        return InvarianceScore(z, float("inf"), 0.0)
    coverage = len(common) / len(union)

    cx = envs.environments[0].cards[x]
    tables = np.empty((envs.m, len(common), cx))
    pooled = np.zeros(len(common))
    for i, (configs, counts) in enumerate(per_env):
        idx = np.searchsorted(configs, common)
        sub = counts[idx]
        support = sub.sum(axis=1)
        pooled += support
        tables[i] = (sub + alpha) / (support[:, None] + alpha * cx)
    weights = pooled / pooled.sum()
    mean = tables.mean(axis=0)
    sq = ((tables - mean) ** 2).sum(axis=2)          # (m, configs)
    variance = float((sq @ weights).mean())
    return InvarianceScore(z, variance, coverage)


def oracle_invariance_score(dag: Dag, basis, x, z) -> InvarianceScore:
    """Exact zero/positive decision: the variance is zero iff x is d-separated
    from every basis variable outside z, given z."""
    z = tuple(sorted(z))
    invariant = all(
        b == x or dag.d_separated(x, b, z) for b in basis if b not in z)
    return InvarianceScore(z, 0.0 if invariant else 1.0)


def select_parents(envs, x, candidates, cfg: GlideConfig, score_fn=None):
    """Minimum-variance parent choice over clique candidates plus all subsets
    of the best-scoring clique.

    Returns (parents, info) where info holds the winning variance, the margin
    to the runner-up, and a below_confidence flag set when nothing beats the
    epsilon threshold. Ties go to the smaller, lexicographically first set.
    """
    if score_fn is None:
        score_fn = lambda zz: invariance_score(envs, x, zz, cfg)
    scores = {}

    def score(zz):
        zz = tuple(sorted(zz))
        if zz not in scores:
            scores[zz] = score_fn(zz)
        return scores[zz]

    for cand in candidates:
        score(cand)
    key = lambda zz: (scores[zz].variance, len(zz), zz)
    # Refine with subsets: the true parent set is contained in some clique but
    # need not be a maximal clique itself. All cliques are expanded while the
    # total subset budget lasts; past the budget only the best-scoring clique is.
    budget = 1 << SUBSET_REFINEMENT_CAP
    for cand in sorted(candidates, key=key):
        if not (0 < len(cand) <= SUBSET_REFINEMENT_CAP):
            continue
        if (1 << len(cand)) > budget:
            break
        budget -= 1 << len(cand)
        members = list(cand)
        for mask in range(1 << len(members)):
            score(tuple(members[i] for i in range(len(members)) if mask >> i & 1))

    finite = [zz for zz in scores if np.isfinite(scores[zz].variance)]
    if not finite:
        return (), {"variance": float("inf"), "margin": 0.0,
                    "below_confidence": True, "scores": scores}
    ranked = sorted(finite, key=key)
    winner = ranked[0]
    wvar = scores[winner].variance
    margin = scores[ranked[1]].variance - wvar if len(ranked) > 1 else float("inf")
    return winner, {
        "variance": wvar,
        "margin": margin,
        "below_confidence": bool(wvar >= cfg.epsilon),
        "scores": scores,
    }


def glide(ds, cfg: GlideConfig, oracle_dag: Dag = None):
    """Full pipeline: basis search, environments, blankets, candidate cliques,
    per-node minimum-variance selection, cycle repair.

    With oracle_dag set, independence tests and invariance decisions come from
    d-separation on the given graph (ds may be None); otherwise both are
    estimated from ds. Returns (Dag, report dict).
    """
    t0 = time.time()
    if oracle_dag is not None:
        d = oracle_dag.d
        names = oracle_dag.names
        src = OracleSource(oracle_dag)
    else:
        if ds is None:
            raise ValueError("need a dataset or an oracle graph")
        d = ds.d
        names = ds.names
        src = DataSource(ds, alpha=cfg.ci_alpha)
    timings = {}

    t = time.time()
    phi = dependence_matrix(src, d)
    basis = find_basis(phi)
    timings["basis"] = time.time() - t

    t = time.time()
    bm = blanket_map(src, d, cap_k=cfg.cap_k)
    timings["blankets"] = time.time() - t

    t = time.time()
    candidates = plausible_parent_sets(bm, d, max_candidates=cfg.max_candidates)
    timings["candidates"] = time.time() - t

    non_basis = [x for x in range(d) if x not in set(basis)]
    envs = None
    if oracle_dag is None and non_basis:
        t = time.time()
        envs = make_environments(
            ds, basis, cfg.m, cfg.gamma_o, pool=cfg.pool, seed=cfg.seed,
            min_rows=cfg.min_rows, min_env_fraction=cfg.min_env_fraction)
        timings["environments"] = time.time() - t

    t = time.time()
    parent_sets = {x: () for x in basis}
    node_info = {}
    for x in non_basis:
        if oracle_dag is not None:
            fn = lambda zz, x=x: oracle_invariance_score(oracle_dag, basis, x, zz)
        else:
            fn = None
        pa, info = select_parents(envs, x, candidates[x], cfg, score_fn=fn)
        parent_sets[x] = pa
        node_info[x] = info
    timings["selection"] = time.time() - t

    edges = {(p, x) for x, pa in parent_sets.items() for p in pa}
    margins = {x: node_info.get(x, {}).get("margin", float("inf"))
               for x in range(d)}
    edges, repairs = _repair_cycles(d, edges, margins)
    pred = Dag.from_index_edges(names, sorted(edges))

    report = {
        "config": asdict(cfg),
        "mode": "oracle" if oracle_dag is not None else "data",
        "basis": list(basis),
        "blankets": {x: sorted(bm.blankets[x]) for x in range(d)},
        "cores": {x: sorted(bm.cores[x]) for x in range(d)},
        "candidate_counts": {x: len(candidates[x]) for x in range(d)},
        "nodes": {
            x: {
                "parents": list(parent_sets[x]),
                "variance": node_info.get(x, {}).get("variance", 0.0),
                "margin": node_info.get(x, {}).get("margin", float("inf")),
                "below_confidence": node_info.get(x, {}).get(
                    "below_confidence", False),
            }
            for x in range(d)
        },
        "edges": sorted([p, c] for p, c in pred.edges),
        "cycle_repairs": repairs,
        "environment_sizes": [e.n for e in envs.environments] if envs else [],
        "timings": timings,
        "total_seconds": time.time() - t0,
    }
    if oracle_dag is not None:
        report["qualifying_nodes"] = sorted(
            theorem_qualifying_nodes(oracle_dag, basis))
    return pred, report


def theorem_qualifying_nodes(dag: Dag, basis) -> set:
    """Non-basis nodes where zero variance across environments identifies
    Pa[X] uniquely.

    Requires the disjointness assumptions (parents vs spouses, spouses vs
    basis) plus the conditions they leave implicit when the basis is a proxy
    for the source set: no basis member among the node's descendants, and no
    conditioning set preferred by the tie-break (smaller, then
    lexicographically first) that also blocks every path from the basis.
    """
    bset = set(basis)
    out = set()
    for x in range(dag.d):
        if x in bset:
            continue
        pa = set(dag.parents[x])
        sp = dag.spouses(x)
        if (pa & sp) or (sp & bset) or (dag.descendants(x) & bset):
            continue
        core = (dag.markov_blanket(x) - sp) | pa
        if _has_smaller_invariant_set(dag, bset, x, pa, core):
            continue
        out.add(x)
    return out


def _has_smaller_invariant_set(dag, bset, x, pa, core):
    """True when some Z over the blanket core beats Pa[x] under the selection
    tie-break while still d-separating x from every unconditioned basis node."""
    from itertools import combinations

    pa_key = (len(pa), tuple(sorted(pa)))
    members = sorted(core)
    for k in range(len(pa) + 1):
        for zz in combinations(members, k):
            if (k, zz) >= pa_key:
                break
            if all(b == x or dag.d_separated(x, b, zz)
                   for b in bset if b not in zz):
                return True
    return False


def _repair_cycles(d, edges, margins):
    """Remove the weakest edge (smallest selection margin at its head) from
    each directed cycle until none remain."""
    edges = set(edges)
    repairs = 0
    while True:
        cycle = _find_cycle(d, edges)
        if cycle is None:
            return edges, repairs
        worst = min(cycle, key=lambda e: (margins.get(e[1], float("inf")), e))
        edges.discard(worst)
        repairs += 1


def _find_cycle(d, edges):
    """One directed cycle as a list of edges, or None."""
    children = {v: [] for v in range(d)}
    for a, b in edges:
        children[a].append(b)
    color = [0] * d  # 0 unvisited, 1 on stack, 2 done
    parent = {}
    for start in range(d):
        if color[start]:
            continue
        stack = [(start, iter(children[start]))]
        color[start] = 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for c in it:
                if color[c] == 0:
                    color[c] = 1
                    parent[c] = v
                    stack.append((c, iter(children[c])))
                    advanced = True
                    break
                if color[c] == 1:
                    cyc = [(v, c)]
                    node = v
                    while node != c:
                        cyc.append((parent[node], node))
                        node = parent[node]
                    return cyc
            if not advanced:
                color[v] = 2
                stack.pop()
    return None
