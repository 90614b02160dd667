"""Prior construction and environment generation.

An environment is a downsampled view of the base dataset in which the marginals
of the basis variables have been pushed toward freshly drawn priors. Priors are
drawn from the convex hull of boundary priors that all achieve at least the
configured inverse downsampling rate gamma_o, then reduced to m representatives
with K-means.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, empirical_marginal
from .errors import DegenerateCategory, EnvironmentTooSmall, LengthMismatch
from .graphs import Dag  # noqa: F401  (re-exported type context)

DEFAULT_POOL = 10_000
DEFAULT_MIN_ROWS = 100
# Sequential per-variable downsampling can shrink an environment geometrically
# when the basis is large; steps that would drop an environment below this
# fraction of the base dataset are skipped (each environment starts its pass at
# a different basis offset, so every basis variable is still perturbed in most
# environments).
DEFAULT_MIN_ENV_FRACTION = 0.2


@dataclass(frozen=True)
class Prior:
    """Target marginal for one variable plus its inverse downsampling rate."""

    variable: int
    probs: np.ndarray
    gamma: float

    def __post_init__(self):
        s = float(np.sum(self.probs))
        if abs(s - 1.0) > 1e-9:
            raise ValueError(f"prior does not sum to 1 (sum={s})")


@dataclass
class EnvironmentSet:
    """m downsampled datasets plus the priors that produced each of them."""

    m: int
    environments: list
    priors: list = field(default_factory=list)  # per environment: list of Prior


def gamma_of(p, pi) -> float:
    """Largest fraction of the dataset that can realize target marginal pi.

    gamma = min over categories b with pi(b) > 0 of p(b) / pi(b).
    """
    p = np.asarray(p, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if p.shape != pi.shape:
        raise LengthMismatch(f"length {p.shape} vs {pi.shape}")
    mask = pi > 0
    if not mask.any():
        raise ValueError("target prior is all zero")
    return float(np.min(p[mask] / pi[mask]))


def boundary_priors(p, gamma_o, variable=0) -> list:
    """Extreme points of the gamma >= gamma_o region: one prior per category,
    each the mixture alpha_k * p + (1 - alpha_k) * delta_k that achieves
    gamma exactly gamma_o.

    alpha_k = (1 - q_k / gamma_o) / (1 - q_k) with q_k = p(k). Categories with
    q_k = 0 cannot be upweighted within the observed support and are skipped;
    alpha_k < 0 (q_k > gamma_o) is clamped to 0, yielding the point mass with
    gamma = q_k > gamma_o.
    """
    p = np.asarray(p, dtype=float)
    if not (0.0 < gamma_o < 1.0):
        raise ValueError("gamma_o must lie in (0, 1)")
    out = []
    for k, q in enumerate(p):
        if q >= 1.0:
            raise DegenerateCategory(
                f"category {k} carries all the mass; no room to perturb")
        if q == 0.0:
            warnings.warn(f"category {k} unobserved; boundary prior skipped")
            continue
        alpha = (1.0 - q / gamma_o) / (1.0 - q)
        if alpha < 0.0:
            warnings.warn(
                f"ClampedAlpha: category {k} has mass {q} > gamma_o={gamma_o}; "
                "using the point mass")
            alpha = 0.0
        probs = alpha * p
        probs[k] += 1.0 - alpha
        out.append(Prior(variable, probs, gamma_of(p, probs)))
    return out


def sample_priors(p, gamma_o, count, seed, variable=0) -> list:
    """count random priors from the convex hull of the boundary priors.

    Convex weights are Dirichlet(1, ..., 1); every sample inherits
    gamma >= gamma_o by convexity of the feasible region.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    p = np.asarray(p, dtype=float)
    corners = boundary_priors(p, gamma_o, variable)
    mat = np.array([c.probs for c in corners])
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(len(corners)), size=count)
    mixes = weights @ mat
    return [Prior(variable, row, gamma_of(p, row)) for row in mixes]


def select_representative(priors, m, seed, base=None) -> list:
    """m representative priors: K-means centroids over the probability vectors.

    Lloyd's algorithm with k-means++ initialization; at most 100 iterations or
    until the centroid shift drops below 1e-6. Empty clusters are re-seeded
    from the point farthest from its centroid. Centroids are renormalized and
    their gamma recomputed against `base` (defaults to the pool's first prior's
    implied base being unavailable, so gamma falls back to the nearest member's).
    """
    if m > len(priors):
        raise ValueError(f"m={m} exceeds pool size {len(priors)}")
    pts = np.array([pr.probs for pr in priors])
    var = priors[0].variable
    rng = np.random.default_rng(seed)

    # k-means++ seeding
    centers = [pts[rng.integers(len(pts))]]
    for _ in range(1, m):
        d2 = np.min([((pts - c) ** 2).sum(axis=1) for c in centers], axis=0)
        if d2.sum() <= 0:
            centers.append(pts[rng.integers(len(pts))])
            continue
        centers.append(pts[rng.choice(len(pts), p=d2 / d2.sum())])
    centers = np.array(centers)

    for _ in range(100):
        d2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        new = np.empty_like(centers)
        for k in range(m):
            members = pts[assign == k]
            if len(members) == 0:
                worst = int(d2[np.arange(len(pts)), assign].argmax())
                new[k] = pts[worst]
                assign[worst] = k
            else:
                new[k] = members.mean(axis=0)
        shift = float(np.abs(new - centers).max())
        centers = new
        if shift < 1e-6:
            break

    out = []
    for c in centers:
        probs = np.clip(c, 0.0, None)
        probs = probs / probs.sum()
        if base is not None:
            g = gamma_of(base, probs)
        else:
            nearest = int(((pts - probs) ** 2).sum(axis=1).argmin())
            g = priors[nearest].gamma
        out.append(Prior(var, probs, g))
    return out


def downsample_once(ds: Dataset, variable, prior: Prior, seed) -> Dataset:
    """One without-replacement downsampling step toward the prior's marginal.

    For each category b the target count is floor(prior(b) * |ds| * gamma);
    that many distinct rows with value b are kept, uniformly at random.
    """
    rng = np.random.default_rng(seed)
    col = ds.col(variable)
    keep = []
    for b, pb in enumerate(prior.probs):
        rows = np.flatnonzero(col == b)
        t = int(np.floor(pb * ds.n * prior.gamma))
        if t > len(rows):
            warnings.warn(
                f"target {t} exceeds {len(rows)} rows for category {b}; clamped")
            t = len(rows)
        if t:
            keep.append(rng.choice(rows, size=t, replace=False))
    if not keep:
        return ds.take(np.array([], dtype=int))
    return ds.take(np.sort(np.concatenate(keep)))


def make_environments(ds: Dataset, basis, m, gamma_o, pool=DEFAULT_POOL,
                      seed=0, min_rows=DEFAULT_MIN_ROWS,
                      min_env_fraction=DEFAULT_MIN_ENV_FRACTION) -> EnvironmentSet:
    """m environments: per basis variable, draw m representative priors and
    apply downsampling sequentially per environment.

    Environment i starts its pass through the basis at offset i (rotating),
    and stops early rather than shrink below max(min_rows, min_env_fraction *
    |ds|); with a large basis this keeps environments usable while still
    perturbing every basis variable across the ensemble. Gammas are recomputed
    against the current (already downsampled) marginal at each step.
    """
    if m < 2:
        raise ValueError("need at least 2 environments")
    basis = list(basis)
    if not basis:
        raise ValueError("basis must be non-empty")

    reps = {}
    for j in basis:
        marg = empirical_marginal(ds, j)
        pr = sample_priors(marg, gamma_o, pool,
                           seed=np.random.SeedSequence([seed, 1, j]), variable=j)
        reps[j] = select_representative(
            pr, m, seed=np.random.SeedSequence([seed, 2, j]), base=marg)

    floor_rows = max(min_rows, int(min_env_fraction * ds.n))
    envs, applied = [], []
    for i in range(m):
        cur = ds
        used = []
        offset = i % len(basis)
        for step in range(len(basis)):
            j = basis[(offset + step) % len(basis)]
            target = reps[j][i]
            marg_cur = empirical_marginal(cur, j)
            g = gamma_of(marg_cur, target.probs)
            if step > 0 and cur.n * g < floor_rows:
                continue  # later steps may not shrink below the volume floor
            local = Prior(j, target.probs, g)
            cur = downsample_once(
                cur, j, local, seed=np.random.SeedSequence([seed, 3, i, j]))
            used.append(local)
        if cur.n < min_rows:
            raise EnvironmentTooSmall(
                f"environment {i} has {cur.n} rows < min_rows={min_rows}")
        envs.append(cur)
        applied.append(used)
    return EnvironmentSet(m=m, environments=envs, priors=applied)
