"""Observational datasets: synthetic simulators, discretization, empirical estimates.

Categorical codes are small non-negative integers stored column-wise in one
int32 matrix. Continuous simulators return plain float matrices; they enter the
discovery pipeline only through discretize().
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset, NonFiniteValue
from .graphs import Dag


@dataclass(frozen=True)
class Dataset:
    """Column-oriented table of category codes."""

    codes: np.ndarray          # (n, d) int32
    cards: tuple               # per-variable number of categories
    names: tuple
    row_ids: np.ndarray = None  # provenance indices into the originating dataset

    def __post_init__(self):
        if self.codes.ndim != 2:
            raise ValueError("codes must be 2-dimensional")
        for j, c in enumerate(self.cards):
            if self.n and self.codes[:, j].max(initial=0) >= c:
                raise ValueError(f"column {j} has codes >= cardinality {c}")

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def d(self) -> int:
        return self.codes.shape[1]

    def col(self, j) -> np.ndarray:
        return self.codes[:, j]

    def take(self, rows) -> "Dataset":
        """Row subset; provenance ids track back to the base dataset."""
        rows = np.asarray(rows, dtype=np.int64)
        base = self.row_ids if self.row_ids is not None else np.arange(self.n)
        return Dataset(self.codes[rows], self.cards, self.names, row_ids=base[rows])

    @staticmethod
    def from_columns(columns, names=None, cards=None):
        cols = [np.asarray(c, dtype=np.int32) for c in columns]
        codes = np.column_stack(cols) if cols else np.zeros((0, 0), np.int32)
        if cards is None:
            cards = tuple(int(c.max(initial=-1)) + 1 if len(c) else 1 for c in cols)
        if names is None:
            names = tuple(f"X{i}" for i in range(len(cols)))
        return Dataset(codes, tuple(cards), tuple(names))


@dataclass
class Cpt:
    """Empirical conditional table P(x | z) over observed z-configurations."""

    conditioning_domain: list      # z-configurations (tuples), observed only
    table: np.ndarray              # (len(domain), card_x), rows sum to 1
    support: np.ndarray            # raw row count per configuration


# ---------------------------------------------------------------------------
# simulators

def _rand_weight(rng, low, high):
    w = rng.uniform(low, high)
    return w if rng.random() < 0.5 else -w


def simulate_linear_gaussian(dag: Dag, n, weight_low=0.5, weight_high=2.0,
                             noise_sd=1.0, seed=0, weights=None):
    """Ancestral linear-Gaussian simulation; `weights` is a test hook mapping
    (parent, child) -> fixed coefficient."""
    rng = np.random.default_rng(seed)
    w = {}
    for a, b in sorted(dag.edges):
        w[(a, b)] = weights[(a, b)] if weights else _rand_weight(rng, weight_low, weight_high)
    table = np.empty((n, dag.d))
    for v in dag.topological_order():
        val = rng.normal(0.0, noise_sd, size=n)
        for p in dag.parents[v]:
            val += w[(p, v)] * table[:, p]
        table[:, v] = val
    return table


def simulate_nonlinear(dag: Dag, n, seed=0):
    """Each node is tanh of a random affine combination of its parents plus
    uniform[-1, 1] noise; non-linear and non-Gaussian by construction."""
    rng = np.random.default_rng(seed)
    coef = {e: rng.uniform(0.5, 2.0) * (1 if rng.random() < 0.5 else -1)
            for e in sorted(dag.edges)}
    bias = rng.uniform(-0.5, 0.5, size=dag.d)
    table = np.empty((n, dag.d))
    for v in dag.topological_order():
        noise = rng.uniform(-1.0, 1.0, size=n)
        if dag.parents[v]:
            aff = bias[v] + sum(coef[(p, v)] * table[:, p] for p in dag.parents[v])
            table[:, v] = np.tanh(aff) + noise
        else:
            table[:, v] = noise
    return table


class CategoricalModel:
    """A DAG plus per-node cardinalities and conditional probability tables.

    CPT rows are indexed by the mixed-radix code of the parent configuration
    (parents in ascending index order).
    """

    def __init__(self, dag: Dag, cards, cpts):
        self.dag = dag
        self.cards = tuple(cards)
        self.cpts = cpts  # node -> (num_parent_configs, card) array

    @staticmethod
    def random(dag: Dag, min_cats=2, max_cats=5, seed=0, concentration=1.0,
               min_parent_effect=0.0):
        """Random model: cardinalities uniform in [min_cats, max_cats], CPT rows
        Dirichlet(concentration).

        min_parent_effect > 0 resamples each CPT until changing any single
        parent's value moves the child conditional by at least that much in
        total variation (strong-mechanism fixtures for calibration tests).
        """
        if not (2 <= min_cats <= max_cats):
            raise ValueError("need 2 <= min_cats <= max_cats")
        rng = np.random.default_rng(seed)
        cards = rng.integers(min_cats, max_cats + 1, size=dag.d)
        cpts = {}
        for v in range(dag.d):
            pa = dag.parents[v]
            pa_cards = [int(cards[p]) for p in pa]
            rows = int(np.prod(pa_cards)) if pa else 1
            for _ in range(200):
                t = rng.dirichlet(np.full(int(cards[v]), concentration), size=rows)
                if not pa or min_parent_effect <= 0 or \
                        _min_single_parent_tv(t, pa_cards) >= min_parent_effect:
                    break
            cpts[v] = t
        return CategoricalModel(dag, [int(c) for c in cards], cpts)

    def parent_config_index(self, v, codes):
        """Mixed-radix row index of each sample's parent configuration."""
        pa = self.dag.parents[v]
        if not pa:
            return np.zeros(codes.shape[0], dtype=np.int64)
        idx = np.zeros(codes.shape[0], dtype=np.int64)
        for p in pa:
            idx = idx * self.cards[p] + codes[:, p]
        return idx

    def sample(self, n, seed=0) -> Dataset:
        """Exact ancestral sampling in topological order."""
        rng = np.random.default_rng(seed)
        codes = np.zeros((n, self.dag.d), dtype=np.int32)
        for v in self.dag.topological_order():
            rows = self.parent_config_index(v, codes)
            u = rng.random(n)
            cdf = np.cumsum(self.cpts[v], axis=1)
            codes[:, v] = (u[:, None] > cdf[rows]).sum(axis=1)
        return Dataset(codes, self.cards, self.dag.names)

    def exact_joint(self):
        """Full joint as an array over all configurations (small graphs only)."""
        shape = self.cards
        total = int(np.prod(shape))
        if total > 2_000_000:
            raise MemoryError("joint too large to enumerate")
        grid = np.indices(shape).reshape(len(shape), total)
        joint = np.ones(total)
        for v in range(self.dag.d):
            rows = np.zeros(total, dtype=np.int64)
            for p in self.dag.parents[v]:
                rows = rows * self.cards[p] + grid[p]
            joint *= self.cpts[v][rows, grid[v]]
        return joint.reshape(shape)


def _min_single_parent_tv(table, pa_cards):
    """Smallest TV distance between CPT rows that differ in exactly one parent value."""
    shape = tuple(pa_cards) + (table.shape[1],)
    t = table.reshape(shape)
    best = np.inf
    for axis in range(len(pa_cards)):
        moved = np.moveaxis(t, axis, 0)
        for a in range(pa_cards[axis]):
            for b in range(a + 1, pa_cards[axis]):
                tv = 0.5 * np.abs(moved[a] - moved[b]).sum(axis=-1)
                best = min(best, float(tv.min()))
    return best


def simulate_categorical(dag: Dag, n, min_cats=2, max_cats=5, seed=0,
                         concentration=1.0, min_parent_effect=0.0):
    """Convenience wrapper: random model + sample. Returns (Dataset, model)."""
    ss = np.random.SeedSequence(seed).spawn(2)
    model = CategoricalModel.random(dag, min_cats, max_cats,
                                    seed=ss[0], concentration=concentration,
                                    min_parent_effect=min_parent_effect)
    return model.sample(n, seed=ss[1]), model


# ---------------------------------------------------------------------------
# discretization and empirical estimates

def discretize(table, bins=4, names=None) -> Dataset:
    """Equal-width binning per column over [min, max]; constant columns collapse
    to a single category."""
    table = np.asarray(table, dtype=float)
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if not np.isfinite(table).all():
        raise NonFiniteValue("non-finite value in continuous table")
    n, d = table.shape
    codes = np.zeros((n, d), dtype=np.int32)
    cards = []
    for j in range(d):
        col = table[:, j]
        lo, hi = col.min(), col.max()
        if hi == lo:
            cards.append(1)
            continue
        c = np.floor((col - lo) / (hi - lo) * bins).astype(np.int32)
        codes[:, j] = np.minimum(c, bins - 1)
        cards.append(bins)
    if names is None:
        names = tuple(f"X{i}" for i in range(d))
    return Dataset(codes, tuple(cards), tuple(names))


def empirical_marginal(ds: Dataset, var) -> np.ndarray:
    if ds.n == 0:
        raise EmptyDataset("cannot take a marginal of an empty dataset")
    counts = np.bincount(ds.col(var), minlength=ds.cards[var])
    return counts / ds.n


def empirical_conditional(ds: Dataset, x, z, laplace_alpha=1.0) -> Cpt:
    """Add-alpha smoothed P(x | z) over z-configurations present in ds."""
    if ds.n == 0:
        raise EmptyDataset("cannot estimate a conditional from an empty dataset")
    z = sorted(z)
    if x in z:
        raise ValueError("x must not be in the conditioning set")
    cx = ds.cards[x]
    zcode = np.zeros(ds.n, dtype=np.int64)
    for v in z:
        zcode = zcode * ds.cards[v] + ds.col(v)
    configs, inv = np.unique(zcode, return_inverse=True)
    counts = np.zeros((len(configs), cx))
    np.add.at(counts, (inv, ds.col(x)), 1.0)
    support = counts.sum(axis=1)
    table = (counts + laplace_alpha) / (support[:, None] + laplace_alpha * cx)
    domain = [_decode_config(c, [ds.cards[v] for v in z]) for c in configs]
    return Cpt(domain, table, support.astype(np.int64))


def _decode_config(code, radices):
    out = []
    for r in reversed(radices):
        out.append(int(code % r))
        code //= r
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# CSV ingestion / emission

def save_csv(path, table_or_ds, names=None):
    if isinstance(table_or_ds, Dataset):
        names = table_or_ds.names
        body = table_or_ds.codes
        fmt = "%d"
    else:
        body = np.asarray(table_or_ds)
        if names is None:
            names = [f"X{i}" for i in range(body.shape[1])]
        fmt = "%.10g"
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        np.savetxt(fh, body, delimiter=",", fmt=fmt)


def load_csv(path, mode):
    """mode 'cat' parses integer codes into a Dataset; mode 'cont' parses reals
    and returns (matrix, names)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise EmptyDataset(f"{path}: empty file")
        names = tuple(header.split(","))
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    if body.size == 0:
        raise EmptyDataset(f"{path}: no data rows")
    if body.shape[1] != len(names):
        raise ValueError(f"{path}: header/body column mismatch")
    if mode == "cont":
        return body, names
    if mode != "cat":
        raise ValueError(f"unknown mode {mode!r}")
    codes = body.astype(np.int32)
    if not np.allclose(codes, body):
        raise ValueError(f"{path}: non-integer codes in categorical mode")
    if codes.min() < 0:
        raise ValueError(f"{path}: negative category code")
    cards = tuple(int(codes[:, j].max()) + 1 for j in range(codes.shape[1]))
    return Dataset(codes, cards, names)
