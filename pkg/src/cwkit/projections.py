"""Projection of d-dimensional measures to 1-D laws, and exact distances.

All 1-D laws are finite atomic measures. Values closer than MERGE_TOL are
considered the same atom; that tolerance is the single equality notion for
1-D laws package-wide. Distances are computed exactly on the merged atom
grid, with no binning.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .directions import _freeze
from .errors import DimensionMismatch

MERGE_TOL = 1e-12
MASS_TOL = 1e-12

METRICS = ("ks", "w1")


@dataclass(frozen=True, eq=False)
class SampleSet:
    """An n x d point cloud treated as the empirical measure (weights 1/n)."""

    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] < 1:
            raise ValueError("points must be a nonempty n x d array")
        if not np.all(np.isfinite(p)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", _freeze(p))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def digest(self):
        h = hashlib.sha256()
        h.update(str(self.points.shape).encode())
        h.update(self.points.tobytes())
        h.update(self.label.encode())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Weighted atoms in R^d: positive weights summing to 1, distinct points."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] < 1:
            raise ValueError("points must be a nonempty k x d array")
        if w.shape != (p.shape[0],):
            raise ValueError("need one weight per atom")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(w))):
            raise ValueError("atoms must be finite")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1 within {MASS_TOL}")
        if np.unique(p, axis=0).shape[0] != p.shape[0]:
            raise ValueError("atoms must be pairwise distinct")
        object.__setattr__(self, "points", _freeze(p))
        object.__setattr__(self, "weights", _freeze(w))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    @classmethod
    def from_points(cls, points, weights):
        """Build a measure from raw atoms: merges exact duplicate points,
        drops zero net weights, and normalizes to total mass 1."""
        p = np.asarray(points, dtype=np.float64)
        w = np.asarray(weights, dtype=np.float64)
        uniq, inverse = np.unique(p, axis=0, return_inverse=True)
        acc = np.zeros(uniq.shape[0])
        np.add.at(acc, inverse, w)
        keep = acc > 0.0
        total = acc[keep].sum()
        return cls(uniq[keep], acc[keep] / total)

    def digest(self):
        h = hashlib.sha256()
        h.update(str(self.points.shape).encode())
        h.update(self.points.tobytes())
        h.update(self.weights.tobytes())
        return h.hexdigest()


def _merge_sorted(values, weights, tol=MERGE_TOL):
    # group consecutive sorted values whose gap is <= tol; representative is
    # the weighted mean, so representatives stay strictly increasing
    starts = np.flatnonzero(np.concatenate(([True], np.diff(values) > tol)))
    wsum = np.add.reduceat(weights, starts)
    vsum = np.add.reduceat(values * weights, starts)
    return vsum / wsum, wsum


@dataclass(frozen=True, eq=False)
class Projected1D:
    """A 1-D atomic law: strictly increasing values, positive weights, mass 1."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if v.ndim != 1 or v.shape != w.shape or v.size < 1:
            raise ValueError("values and weights must be matching 1-D arrays")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(w))):
            raise ValueError("atoms must be finite")
        if np.any(np.diff(v) <= 0.0):
            raise ValueError("values must be strictly increasing")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1 within {MASS_TOL}")
        object.__setattr__(self, "values", _freeze(v))
        object.__setattr__(self, "weights", _freeze(w))

    @property
    def n_atoms(self):
        return self.values.size

    @classmethod
    def from_raw(cls, values, weights):
        values = np.asarray(values, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        order = np.argsort(values, kind="stable")
        v, w = _merge_sorted(values[order], weights[order])
        return cls(v, w)


def project(source, u):
    """Push a SampleSet or AtomicMeasure forward under x -> <u, x>."""
    if source.dim != u.dim:
        raise DimensionMismatch(f"source dim {source.dim} != direction dim {u.dim}")
    vals = source.points @ u.coords
    if isinstance(source, AtomicMeasure):
        weights = source.weights
    else:
        weights = np.full(source.n, 1.0 / source.n)
    return Projected1D.from_raw(vals, weights)


def _merged_cdfs(a, b):
    # pooled atom grid (merged within MERGE_TOL) with both cumulative masses
    values = np.concatenate([a.values, b.values])
    wa = np.concatenate([a.weights, np.zeros(b.n_atoms)])
    wb = np.concatenate([np.zeros(a.n_atoms), b.weights])
    order = np.argsort(values, kind="stable")
    values, wa, wb = values[order], wa[order], wb[order]
    starts = np.flatnonzero(np.concatenate(([True], np.diff(values) > MERGE_TOL)))
    grid = np.add.reduceat(values, starts) / np.diff(np.append(starts, values.size))
    cum_a = np.cumsum(np.add.reduceat(wa, starts))
    cum_b = np.cumsum(np.add.reduceat(wb, starts))
    return grid, cum_a, cum_b


def ks_distance(a, b):
    """Exact sup distance between the two right-continuous CDFs; in [0, 1]."""
    _, cum_a, cum_b = _merged_cdfs(a, b)
    # cumulative weights may end at 1 +- a few ulp; the sup of a CDF gap
    # cannot exceed 1
    return float(min(1.0, np.max(np.abs(cum_a - cum_b))))


def wasserstein1(a, b):
    """Exact 1-Wasserstein distance: integral of |F_a - F_b| over the grid."""
    grid, cum_a, cum_b = _merged_cdfs(a, b)
    if grid.size == 1:
        return 0.0
    return float(np.sum(np.abs(cum_a[:-1] - cum_b[:-1]) * np.diff(grid)))


_METRIC_FNS = {"ks": ks_distance, "w1": wasserstein1}


@dataclass(frozen=True, eq=False)
class DistanceTrace:
    """Distances of projected sequence elements to a projected target."""

    direction: object
    metric: str
    indices: np.ndarray
    sizes: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        sz = np.asarray(self.sizes, dtype=np.int64)
        dist = np.asarray(self.distances, dtype=np.float64)
        if not (idx.shape == sz.shape == dist.shape) or idx.ndim != 1 or idx.size < 1:
            raise ValueError("indices, sizes and distances must be matching 1-D arrays")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if np.any(dist < 0.0):
            raise ValueError("distances must be nonnegative")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        object.__setattr__(self, "indices", _freeze(idx).astype(np.int64))
        object.__setattr__(self, "sizes", _freeze(sz).astype(np.int64))
        object.__setattr__(self, "distances", _freeze(dist))

    @property
    def entries(self):
        return list(zip(self.indices.tolist(), self.sizes.tolist(), self.distances.tolist()))


def distance_trace(sequence, target, u, metric="ks"):
    """Distance of each projected sequence element to the projected target."""
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    fn = _METRIC_FNS[metric]
    proj_target = project(target, u)
    sizes = []
    dists = []
    for elem in sequence:
        dists.append(fn(project(elem, u), proj_target))
        sizes.append(elem.n)
    return DistanceTrace(
        direction=u,
        metric=metric,
        indices=np.arange(1, len(sequence) + 1),
        sizes=np.asarray(sizes),
        distances=np.asarray(dists),
    )
