"""Unit-sphere geometry: direction sampling, regions, frames.

Directions are unit vectors in R^d (d >= 2). A Region is a subset of the
sphere from which directions are drawn; caps and unions of caps have
positive surface measure, finite sets have measure zero and exist only to
demonstrate what goes wrong without positive measure. A Frame is a set of
d directions whose stacked rows form an invertible matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, InsufficientRank
from .rng import STREAM_MEASURE, STREAM_SPHERE, substream

UNIT_NORM_TOL = 1e-12
DEFAULT_FRAME_TAU = 1e-6


def _freeze(a):
    # always copy: freezing a view of the caller's array would lock it too
    a = np.array(a, dtype=np.float64, order="C")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Direction:
    """A unit vector on S^{d-1}, d >= 2. Euclidean norm 1 within 1e-12."""

    coords: np.ndarray

    def __post_init__(self):
        c = _freeze(self.coords)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("a direction needs at least 2 coordinates")
        if not np.all(np.isfinite(c)):
            raise ValueError("direction coordinates must be finite")
        if abs(np.linalg.norm(c) - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"norm {np.linalg.norm(c)!r} is not 1 within {UNIT_NORM_TOL}")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self):
        return self.coords.size

    @classmethod
    def from_vector(cls, v):
        """Normalize an arbitrary nonzero vector into a Direction."""
        v = np.asarray(v, dtype=np.float64)
        n = np.linalg.norm(v)
        if n == 0.0 or not np.isfinite(n):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(v / n)

    def __repr__(self):
        return f"Direction({np.array2string(self.coords, separator=', ')})"


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FullSphere:
    """The whole sphere S^{d-1}; surface measure 1."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")

    has_positive_measure = True

    def contains(self, points):
        points = np.asarray(points, dtype=np.float64)
        return np.ones(points.shape[0], dtype=bool)

    def describe(self):
        return f"full:{self.dim}"


@dataclass(frozen=True, eq=False)
class Cap:
    """Spherical cap {u : <axis, u> >= cos(half_angle)}, half_angle in (0, pi]."""

    axis: Direction
    half_angle: float

    def __post_init__(self):
        if not (0.0 < self.half_angle <= np.pi):
            raise ValueError("half_angle must lie in (0, pi]")

    has_positive_measure = True

    @property
    def dim(self):
        return self.axis.dim

    def contains(self, points):
        if self.half_angle >= np.pi:
            # full sphere; avoid rejecting dot products that round below -1
            return np.ones(np.asarray(points).shape[0], dtype=bool)
        return np.asarray(points, dtype=np.float64) @ self.axis.coords >= np.cos(self.half_angle)

    def describe(self):
        ax = ",".join(f"{x:.17g}" for x in self.axis.coords)
        return f"cap:{ax}:{self.half_angle:.17g}"


@dataclass(frozen=True, eq=False)
class UnionOfCaps:
    """Union of finitely many caps; positive measure."""

    caps: tuple

    def __post_init__(self):
        caps = tuple(self.caps)
        if not caps:
            raise ValueError("need at least one cap")
        dims = {c.dim for c in caps}
        if len(dims) != 1:
            raise ValueError("caps live in different dimensions")
        object.__setattr__(self, "caps", caps)

    has_positive_measure = True

    @property
    def dim(self):
        return self.caps[0].dim

    def contains(self, points):
        points = np.asarray(points, dtype=np.float64)
        hit = np.zeros(points.shape[0], dtype=bool)
        for cap in self.caps:
            hit |= cap.contains(points)
        return hit

    def describe(self):
        return "union:" + ";".join(c.describe()[4:] for c in self.caps)


@dataclass(frozen=True, eq=False)
class FiniteSet:
    """A finite direction set. Surface measure zero: counterexample fuel only."""

    directions: tuple

    def __post_init__(self):
        dirs = tuple(self.directions)
        if not dirs:
            raise ValueError("finite set must be nonempty")
        dims = {d.dim for d in dirs}
        if len(dims) != 1:
            raise ValueError("directions live in different dimensions")
        object.__setattr__(self, "directions", dirs)

    has_positive_measure = False

    @property
    def dim(self):
        return self.directions[0].dim

    def contains(self, points):
        points = np.asarray(points, dtype=np.float64)
        member = np.zeros(points.shape[0], dtype=bool)
        for d in self.directions:
            member |= np.all(points == d.coords, axis=1)
        return member

    def describe(self):
        vecs = ";".join(",".join(f"{x:.17g}" for x in d.coords) for d in self.directions)
        return f"finite:{vecs}"


# ---------------------------------------------------------------------------
# Frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Frame:
    """d unit directions stacked as the rows of an invertible d x d matrix."""

    directions: tuple
    matrix: np.ndarray
    min_singular_value: float

    def __post_init__(self):
        m = _freeze(self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "directions", tuple(self.directions))
        d = len(self.directions)
        if m.shape != (d, d):
            raise ValueError("matrix must be d x d with one row per direction")
        for j, u in enumerate(self.directions):
            if m[j].tobytes() != u.coords.tobytes():
                raise ValueError(f"row {j} does not match its direction bit-for-bit")
        smin = float(np.linalg.svd(m, compute_uv=False)[-1])
        if self.min_singular_value <= 0.0:
            raise ValueError("min_singular_value must be positive")
        if abs(self.min_singular_value - smin) > 1e-10:
            raise ValueError("stored min_singular_value disagrees with the matrix")

    @property
    def dim(self):
        return len(self.directions)

    @classmethod
    def from_directions(cls, directions):
        directions = tuple(directions)
        m = np.vstack([u.coords for u in directions])
        smin = float(np.linalg.svd(m, compute_uv=False)[-1])
        if smin <= 0.0:
            raise InsufficientRank("directions are linearly dependent")
        return cls(directions=directions, matrix=m, min_singular_value=smin)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def _draw_unit_rows(rng, n, d):
    # normalized standard normals are uniform on the sphere
    rows = rng.standard_normal((n, d))
    norms = np.linalg.norm(rows, axis=1)
    while np.any(norms < 1e-100):  # probability-zero guard: redraw degenerate rows
        bad = norms < 1e-100
        rows[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(rows, axis=1)
    return rows / norms[:, None]


def sample_uniform(d, count, seed):
    """Draw `count` directions uniformly on S^{d-1}, deterministically in seed."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = substream(seed, STREAM_SPHERE)
    rows = _draw_unit_rows(rng, count, d)
    return [Direction(r) for r in rows]


def sample_in_region(region, count, seed, max_draw_budget=None):
    """Rejection-sample `count` directions from a positive-measure region.

    Uses the same underlying stream as sample_uniform, so a region covering
    the whole sphere reproduces sample_uniform bit for bit. Raises
    BudgetExhausted when fewer than `count` draws are accepted within
    `max_draw_budget` proposals (default 10_000 * count).
    """
    if not region.has_positive_measure:
        raise ValueError("region has surface measure zero; cannot rejection-sample")
    if count < 1:
        raise ValueError("count must be >= 1")
    budget = int(max_draw_budget) if max_draw_budget is not None else 10_000 * count
    rng = substream(seed, STREAM_SPHERE)
    d = region.dim
    chunk = max(count, 1024)
    accepted = []
    used = 0
    while len(accepted) < count and used < budget:
        take = min(chunk, budget - used)
        rows = _draw_unit_rows(rng, take, d)
        used += take
        hits = rows[region.contains(rows)]
        accepted.extend(hits[: count - len(accepted)])
    if len(accepted) < count:
        raise BudgetExhausted(
            f"accepted {len(accepted)}/{count} directions in {used} draws; "
            "the region is too small for rejection sampling at this budget",
            accepted=len(accepted),
            budget=budget,
        )
    return [Direction(r) for r in accepted]


def region_measure_estimate(region, n, seed):
    """Monte-Carlo estimate of the region's normalized surface measure."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = substream(seed, STREAM_MEASURE)
    rows = _draw_unit_rows(rng, n, region.dim)
    return float(np.mean(region.contains(rows)))


def extract_frame(candidates, tau=DEFAULT_FRAME_TAU):
    """Greedily pick d directions whose stacked rows stay well-conditioned.

    Scans candidates in order and accepts one when the smallest singular
    value of the accepted rows remains >= tau. Raises InsufficientRank if
    fewer than d are accepted, i.e. the candidates are numerically contained
    near a proper subspace.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidates must be nonempty")
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    d = candidates[0].dim
    rows = []
    accepted = []
    for cand in candidates:
        trial = np.vstack(rows + [cand.coords])
        if float(np.linalg.svd(trial, compute_uv=False)[-1]) >= tau:
            rows.append(cand.coords)
            accepted.append(cand)
            if len(accepted) == d:
                return Frame.from_directions(accepted)
    raise InsufficientRank(
        f"only {len(accepted)} of {d} directions accepted at tau={tau}; "
        "candidates look confined near a proper subspace"
    )


def frame_constant(frame):
    """Constant C with ||x||_2 <= C * sum_j |<u_j, x>| for all x.

    C is the spectral norm of T^{-1} where T stacks the frame rows: the l1
    norm of Tx dominates its l2 norm, and ||x|| <= ||T^{-1}||_op ||Tx||_2.
    """
    return 1.0 / frame.min_singular_value
