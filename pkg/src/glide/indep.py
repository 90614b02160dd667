"""Pairwise and conditional independence testing.

Two interchangeable backends share one interface: OracleSource answers from a
known DAG via d-separation, DataSource answers from a categorical dataset via
stratified G-tests (likelihood-ratio chi-square). Both memoize answers keyed by
(x, y, sorted(z)) and are safe to share across threads.
"""

from __future__ import annotations

import threading
import warnings

import numpy as np
from scipy.stats import chi2

from .data import Dataset
from .graphs import Dag

MIN_STRATUM_SUPPORT = 5


class IndependenceSource:
    """Shared memoization for the dependent / cond_independent interface."""

    def __init__(self):
        self._cache = {}
        self._lock = threading.Lock()

    def dependent(self, x, y) -> bool:
        return not self.cond_independent(x, y, ())

    def cond_independent(self, x, y, z) -> bool:
        if x == y:
            raise ValueError("x and y must differ")
        key = (min(x, y), max(x, y), tuple(sorted(z)))
        if x in key[2] or y in key[2]:
            raise ValueError("x and y must not appear in the conditioning set")
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        out = self._decide(x, y, key[2])
        with self._lock:
            self._cache[key] = out
        return out

    def _decide(self, x, y, z):  # pragma: no cover - abstract
        raise NotImplementedError


class OracleSource(IndependenceSource):
    """Ground-truth answers from d-separation in a known DAG."""

    def __init__(self, dag: Dag):
        super().__init__()
        self.dag = dag

    def _decide(self, x, y, z):
        return self.dag.d_separated(x, y, z)


class DataSource(IndependenceSource):
    """G-test answers from a categorical dataset.

    The test stratifies on the conditioning configuration, skips strata with
    fewer than MIN_STRATUM_SUPPORT rows, and pools G statistics and degrees of
    freedom across the remaining strata. A table with no usable strata (or zero
    pooled dof) cannot reject, so it is reported as independent with a warning.
    """

    def __init__(self, ds: Dataset, alpha=0.05):
        super().__init__()
        self.ds = ds
        self.alpha = alpha
        self._zcache = {}         # z tuple -> (stratum index array, count)
        self._crit = {}           # dof -> chi2 critical value

    def _decide(self, x, y, z):
        g, dof = self._g_statistic(x, y, z)
        if dof == 0:
            warnings.warn(
                f"degenerate contingency table for ({x}, {y} | {z}); "
                "treating as independent")
            return True
        if dof not in self._crit:
            self._crit[dof] = chi2.ppf(1.0 - self.alpha, dof)
        return g <= self._crit[dof]

    def _strata(self, z):
        """Dense stratum index per row for the conditioning set z (cached)."""
        if z not in self._zcache:
            ds = self.ds
            zcode = np.zeros(ds.n, dtype=np.int64)
            for v in z:
                zcode = zcode * ds.cards[v] + ds.col(v)
            _, inv = np.unique(zcode, return_inverse=True)
            k = int(inv.max()) + 1 if ds.n else 0
            if len(self._zcache) > 256:
                self._zcache.clear()
            self._zcache[z] = (inv.astype(np.int64), k)
        return self._zcache[z]

    def _g_statistic(self, x, y, z):
        ds = self.ds
        cx, cy = ds.cards[x], ds.cards[y]
        inv, k = self._strata(z)
        flat = (inv * cx + ds.col(x)) * cy + ds.col(y)
        counts = np.bincount(flat, minlength=k * cx * cy) \
            .reshape(k, cx, cy).astype(float)
        n_k = counts.sum(axis=(1, 2))
        rows = counts.sum(axis=2)
        cols = counts.sum(axis=1)
        dof_k = (np.count_nonzero(rows, axis=1) - 1) \
            * (np.count_nonzero(cols, axis=1) - 1)
        use = (n_k >= MIN_STRATUM_SUPPORT) & (dof_k > 0)
        if not use.any():
            return 0.0, 0
        with np.errstate(divide="ignore", invalid="ignore"):
            expected = rows[:, :, None] * cols[:, None, :] / n_k[:, None, None]
            terms = np.where(counts > 0,
                             counts * np.log(counts / expected), 0.0)
        g = 2.0 * terms[use].sum()
        return float(g), int(dof_k[use].sum())
