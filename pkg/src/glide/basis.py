"""Dependence matrix and greedy basis search.

A basis is a small set of variables whose dependence neighborhoods jointly
cover every variable; with a perfect dependence oracle on a connected-component
level it recovers exactly the source nodes of the generating DAG.
"""

from __future__ import annotations

import numpy as np

from .indep import IndependenceSource


def dependence_matrix(source: IndependenceSource, d: int) -> np.ndarray:
    """Symmetric 0/1 matrix of pairwise (unconditional) dependence.

    The diagonal is forced to 1: every variable trivially depends on itself.
    """
    phi = np.eye(d, dtype=np.int8)
    for i in range(d):
        for j in range(i + 1, d):
            if source.dependent(i, j):
                phi[i, j] = phi[j, i] = 1
    return phi


def find_basis(phi: np.ndarray) -> list:
    """Greedy minimum-coverage basis over the dependence matrix.

    Repeatedly picks the variable whose dependence neighborhood overlaps the
    uncovered pool the least (ties broken by lowest index), then removes that
    overlap from the pool. Returns the chosen indices in selection order.
    """
    phi = np.asarray(phi)
    d = phi.shape[0]
    if phi.shape != (d, d):
        raise ValueError("dependence matrix must be square")
    pool = set(range(d))
    basis = []
    while pool:
        best, best_cover = None, None
        for x in sorted(pool):
            cover = {j for j in pool if phi[x, j]}
            if best_cover is None or len(cover) < len(best_cover):
                best, best_cover = x, cover
        basis.append(best)
        pool -= best_cover
    return basis
