"""Markov blanket recovery (grow-shrink) and spouse removal."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations

from .indep import IndependenceSource

DEFAULT_CAP_K = 4
BLANKET_GUARD = 25
FALLBACK_CAP_K = 2


@dataclass
class BlanketMap:
    """Per-variable blanket M(x) and spouse-free core M*(x)."""

    blankets: dict   # x -> frozenset M(x)
    cores: dict      # x -> frozenset M*(x)
    spouses: dict    # x -> frozenset of removed members


def grow_shrink_mb(src: IndependenceSource, x, d) -> set:
    """Grow-shrink Markov blanket of x with a fixed ascending scan order."""
    mb = set()
    changed = True
    while changed:
        changed = False
        for y in range(d):
            if y == x or y in mb:
                continue
            if not src.cond_independent(x, y, sorted(mb)):
                mb.add(y)
                changed = True
    changed = True
    while changed:
        changed = False
        for y in sorted(mb):
            if src.cond_independent(x, y, sorted(mb - {y})):
                mb.remove(y)
                changed = True
    return mb


def all_markov_blankets(src: IndependenceSource, d) -> BlanketMap:
    """Grow-shrink for every variable, then AND-rule symmetrization: y stays
    in M(x) only if x is also in M(y)."""
    raw = {x: grow_shrink_mb(src, x, d) for x in range(d)}
    blankets = {x: frozenset(y for y in raw[x] if x in raw[y]) for x in range(d)}
    return BlanketMap(blankets=blankets, cores={}, spouses={})


def remove_spouses(src: IndependenceSource, x, blanket, cap_k=DEFAULT_CAP_K) -> set:
    """Drop every blanket member separable from x by some small conditioning
    subset of the remaining blanket.

    Parents and children of x are never separable by any subset of the blanket,
    spouses are (a subset containing the parents blocks the collider-free
    paths); subsets are tried in increasing size up to cap_k.
    """
    blanket = set(blanket)
    if len(blanket) > BLANKET_GUARD:
        warnings.warn(
            f"blanket of {x} has {len(blanket)} members; "
            f"capping spouse-search subsets at {FALLBACK_CAP_K}")
        cap_k = FALLBACK_CAP_K
    core = set(blanket)
    for y in sorted(blanket):
        rest = sorted(blanket - {y})
        separated = False
        for k in range(min(cap_k, len(rest)) + 1):
            for s in combinations(rest, k):
                if src.cond_independent(x, y, s):
                    separated = True
                    break
            if separated:
                break
        if separated:
            core.discard(y)
    return core


def blanket_map(src: IndependenceSource, d, cap_k=DEFAULT_CAP_K) -> BlanketMap:
    """Full pipeline step: symmetrized blankets plus spouse-free cores."""
    bm = all_markov_blankets(src, d)
    for x in range(d):
        core = remove_spouses(src, x, bm.blankets[x], cap_k=cap_k)
        bm.cores[x] = frozenset(core)
        bm.spouses[x] = bm.blankets[x] - core
    return bm
