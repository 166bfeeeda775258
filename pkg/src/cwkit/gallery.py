"""Generators with ground truth.

Three analytic families with exact moment oracles (Gaussian, product
lognormal, finite atomic), plus the switching construction: a pair of
distinct atomic measures whose 1-D projections agree exactly along a
prescribed finite set of directions. The Gaussian has a moment generating
function near 0 and moment-determinate projections; the lognormal does not,
which is what makes it the canonical Carleman failure case.
"""

import math
from dataclasses import dataclass
from itertools import combinations, product

import mpmath
import numpy as np
from scipy.special import gammaln, logsumexp

from .directions import Direction, _freeze
from .errors import DegenerateKernel, OrderExceeded
from .moments import MomentSequence, multi_indices, multinomial
from .projections import AtomicMeasure, SampleSet
from .rng import STREAM_GALLERY, substream

GAUSSIAN_MOMENT_CAP = 8  # pairing enumeration grows as (2m-1)!!


def _log_double_factorial_odd(j):
    # log (j-1)!! for even j >= 0, via (j-1)!! = j! / (2^{j/2} (j/2)!)
    if j == 0:
        return 0.0
    h = j // 2
    return gammaln(j + 1) - h * math.log(2.0) - gammaln(h + 1)


@dataclass(frozen=True, eq=False)
class Gaussian:
    """N(mean, cov) with symmetric positive definite covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _freeze(self.mean)
        cov = _freeze(self.cov)
        d = mean.size
        if cov.shape != (d, d):
            raise ValueError("cov must be d x d")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("cov must be symmetric")
        if float(np.linalg.eigvalsh(cov)[0]) <= 1e-10:
            raise ValueError("cov must be positive definite (min eigenvalue > 1e-10)")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self):
        return self.mean.size

    @classmethod
    def standard(cls, d):
        return cls(np.zeros(d), np.eye(d))

    def directional_moment(self, u, m):
        """Exact raw moment of the 1-D projection N(<u,mean>, u'cov u)."""
        a = float(u.coords @ self.mean)
        s = math.sqrt(float(u.coords @ self.cov @ u.coords))
        total = 0.0
        for j in range(0, m + 1, 2):
            total += (math.comb(m, j) * math.exp(_log_double_factorial_odd(j))
                      * s**j * a ** (m - j))
        return total

    def projected_even_moments(self, u, max_order):
        """MomentSequence of the projection up to max_order, with exact logs
        at even orders (all terms of the even-order expansion are >= 0)."""
        a = float(u.coords @ self.mean)
        s = math.sqrt(float(u.coords @ self.cov @ u.coords))
        vals = np.empty(max_order + 1)
        logs = np.full(max_order + 1, np.nan)
        vals[0], logs[0] = 1.0, 0.0
        log_s = math.log(s)
        log_a = math.log(abs(a)) if a != 0.0 else -np.inf
        for k in range(1, max_order + 1):
            vals[k] = self.directional_moment(u, k)
            if k % 2 == 0:
                parts = []
                for j in range(0, k + 1, 2):
                    if a == 0.0 and j < k:
                        continue
                    mean_part = (k - j) * log_a if j < k else 0.0
                    parts.append(math.log(math.comb(k, j)) + _log_double_factorial_odd(j)
                                 + j * log_s + mean_part)
                logs[k] = float(logsumexp(parts))
        return MomentSequence(values=vals, kind="raw", log_values=logs)

    def mixed_moment(self, alpha):
        """E[prod x_i^{alpha_i}] by summing over partial pairings (Isserlis
        extended to nonzero mean). Capped at |alpha| = 8."""
        alpha = tuple(int(a) for a in alpha)
        order = sum(alpha)
        if order > GAUSSIAN_MOMENT_CAP:
            raise OrderExceeded(
                f"Gaussian mixed moments capped at order {GAUSSIAN_MOMENT_CAP}, got {order}")
        idx = [i for i, a in enumerate(alpha) for _ in range(a)]
        return self._pairing_sum(tuple(idx))

    def _pairing_sum(self, idx):
        if not idx:
            return 1.0
        i, rest = idx[0], idx[1:]
        total = self.mean[i] * self._pairing_sum(rest)
        for pos, j in enumerate(rest):
            total += self.cov[i, j] * self._pairing_sum(rest[:pos] + rest[pos + 1:])
        return float(total)


@dataclass(frozen=True, eq=False)
class ProductLognormal:
    """Independent coordinates X_i = exp(mu_i + sigma_i Z_i), sigma_i > 0."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = _freeze(self.mu)
        sigma = _freeze(self.sigma)
        if mu.shape != sigma.shape or mu.ndim != 1:
            raise ValueError("mu and sigma must be matching 1-D arrays")
        if np.any(sigma <= 0.0):
            raise ValueError("sigma must be positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self):
        return self.mu.size

    @classmethod
    def standard(cls, d):
        return cls(np.zeros(d), np.ones(d))

    def mixed_moment(self, alpha):
        """Closed form: prod_i exp(alpha_i mu_i + alpha_i^2 sigma_i^2 / 2)."""
        alpha = np.asarray(alpha, dtype=np.float64)
        return float(np.exp(np.sum(alpha * self.mu + 0.5 * alpha**2 * self.sigma**2)))

    def _log_mixed_moment(self, alpha):
        alpha = np.asarray(alpha, dtype=np.float64)
        return float(np.sum(alpha * self.mu + 0.5 * alpha**2 * self.sigma**2))

    def directional_moment(self, u, m):
        """E[<u, X>^m] by the multinomial theorem over coordinate moments.

        Computed in arbitrary precision: the coordinate moments grow like
        exp(alpha^2 sigma^2 / 2) and overflow float64 long before the orders
        a Carleman scan needs. May return inf if the exact value itself
        exceeds float range.
        """
        sign, log_abs = self._signed_log_directional_moment(u, m)
        if log_abs == -math.inf:
            return 0.0
        if log_abs > 709.0:  # exp overflow threshold
            return math.inf if sign > 0 else -math.inf
        return sign * math.exp(log_abs)

    def _signed_log_directional_moment(self, u, m):
        # exact signed sum via mpmath; dps sized to the largest term
        if m == 0:
            return 1.0, 0.0
        alphas = multi_indices(self.dim, m)
        peak = max(self._log_mixed_moment(a) for a in alphas)
        digits = 30 + int((peak + m * math.log(self.dim + 1) + m) / math.log(10.0)) + m
        with mpmath.workdps(max(30, digits)):
            total = mpmath.mpf(0)
            for a in alphas:
                coeff = multinomial(m, a)
                term = mpmath.mpf(coeff) * mpmath.exp(mpmath.mpf(self._log_mixed_moment(a)))
                for uj, aj in zip(u.coords, a):
                    if aj:
                        term *= mpmath.mpf(uj) ** aj
                total += term
            if total == 0:
                return 0.0, -math.inf
            sign = 1.0 if total > 0 else -1.0
            return sign, float(mpmath.log(abs(total)))

    def projected_even_moments(self, u, max_order):
        """MomentSequence of the projection with exact log even moments."""
        vals = np.empty(max_order + 1)
        logs = np.full(max_order + 1, np.nan)
        vals[0], logs[0] = 1.0, 0.0
        for k in range(1, max_order + 1):
            sign, log_abs = self._signed_log_directional_moment(u, k)
            vals[k] = 0.0 if log_abs == -math.inf else (
                sign * math.exp(log_abs) if log_abs <= 709.0 else sign * math.inf)
            if k % 2 == 0:
                # even moments of a projection are strictly positive
                logs[k] = log_abs
        return MomentSequence(values=vals, kind="raw", log_values=logs)


@dataclass(frozen=True, eq=False)
class Atomic:
    """A finite atomic measure wrapped as an analytic law (exact oracles)."""

    measure: AtomicMeasure

    @property
    def dim(self):
        return self.measure.dim

    def directional_moment(self, u, m):
        return float(self.measure.weights @ (self.measure.points @ u.coords) ** m)

    def projected_even_moments(self, u, max_order):
        v = self.measure.points @ u.coords
        vals = np.empty(max_order + 1)
        vals[0] = 1.0
        power = np.ones_like(v)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(1, max_order + 1):
                power = power * v
                vals[k] = float(self.measure.weights @ power)
        return MomentSequence(values=vals, kind="raw")

    def mixed_moment(self, alpha):
        mono = np.ones(self.measure.n)
        for j, a in enumerate(alpha):
            if a:
                mono = mono * self.measure.points[:, j] ** int(a)
        return float(self.measure.weights @ mono)


def sample(dist, n, seed):
    """Draw n i.i.d. points from an analytic distribution, seeded."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = substream(seed, STREAM_GALLERY)
    if isinstance(dist, Gaussian):
        z = rng.standard_normal((n, dist.dim))
        pts = dist.mean + z @ np.linalg.cholesky(dist.cov).T
        label = f"gaussian-n{n}-seed{seed}"
    elif isinstance(dist, ProductLognormal):
        z = rng.standard_normal((n, dist.dim))
        pts = np.exp(dist.mu + dist.sigma * z)
        label = f"lognormal-n{n}-seed{seed}"
    elif isinstance(dist, Atomic):
        idx = rng.choice(dist.measure.n, size=n, p=dist.measure.weights)
        pts = dist.measure.points[idx]
        label = f"atomic-n{n}-seed{seed}"
    else:
        raise TypeError(f"not an analytic distribution: {type(dist).__name__}")
    return SampleSet(points=pts, label=label)


def mixed_moment_oracle(dist, alpha):
    """Exact mixed moment E[x^alpha] of an analytic distribution."""
    return dist.mixed_moment(alpha)


def mixed_moments_of(dist, max_order):
    """Complete exact MixedMoments table of an analytic distribution."""
    from .moments import MixedMoments, multi_indices_upto

    table = {a: dist.mixed_moment(a) for a in multi_indices_upto(dist.dim, max_order)}
    return MixedMoments(dim=dist.dim, max_order=max_order, table=table)


def _orthogonal_unit(v):
    # deterministic unit vector exactly orthogonal to an integer vector
    v = np.asarray(v, dtype=np.float64)
    if v.size == 2:
        w = np.array([-v[1], v[0]]) + 0.0  # integer entries: dot is exactly 0
        return Direction(w / np.linalg.norm(w))
    i = int(np.argmin(np.abs(v)))
    e = np.zeros(v.size)
    e[i] = 1.0
    w = e - (v @ e) / (v @ v) * v
    return Direction.from_vector(w)


def _pairwise_parallel(v, w):
    # integer test: all 2x2 minors vanish
    return all(v[p] * w[q] == v[q] * w[p] for p, q in combinations(range(len(v)), 2))


def switching_pair(lattice_directions):
    """Two distinct atomic measures with identical projections along
    certified directions.

    Expands the signed convolution of kernels (delta_0 - delta_{v_j}) over
    the given nonzero, pairwise non-parallel integer vectors; the positive
    part normalizes to P, the negative part to Q. For each v_j, projecting
    along any direction orthogonal to v_j maps the pair S <-> S u {j} of
    subset-sum atoms to equal values with opposite parity, so the projected
    laws coincide exactly. Returns (P, Q, certified unit directions, one
    per kernel vector).

    P and Q have disjoint supports (each surviving atom has a definite net
    sign), hence total variation distance 1.
    """
    vs = [np.asarray(v, dtype=np.int64) for v in lattice_directions]
    if not vs:
        raise ValueError("need at least one lattice direction")
    if len(vs) > 20:
        raise ValueError("more than 20 kernel vectors: expansion too large")
    d = vs[0].size
    if d < 2:
        raise ValueError("lattice directions must have dim >= 2")
    for v in vs:
        if v.shape != (d,):
            raise ValueError("lattice directions must share one dimension")
        if not np.any(v):
            raise ValueError("lattice directions must be nonzero")
    for v, w in combinations(vs, 2):
        if _pairwise_parallel(v, w):
            raise ValueError(f"parallel kernel vectors {v.tolist()} and {w.tolist()}")

    net = {}
    for picks in product((0, 1), repeat=len(vs)):
        atom = np.zeros(d, dtype=np.int64)
        for p, v in zip(picks, vs):
            if p:
                atom = atom + v
        key = tuple(atom.tolist())
        net[key] = net.get(key, 0) + (1 if sum(picks) % 2 == 0 else -1)

    pos = [(a, c) for a, c in net.items() if c > 0]
    neg = [(a, -c) for a, c in net.items() if c < 0]
    if not pos or not neg:
        raise DegenerateKernel("kernel expansion collapsed to a single sign")

    def build(atoms):
        pts = np.array([a for a, _ in atoms], dtype=np.float64)
        w = np.array([c for _, c in atoms], dtype=np.float64)
        return AtomicMeasure(pts, w / w.sum())

    p, q = build(pos), build(neg)
    certified = [_orthogonal_unit(v) for v in vs]
    return p, q, certified


def empirical_mgf(sample_set, u, t_grid):
    """Empirical moment generating function of the projection at each t.

    Returns (t, value, unstable) triples; unstable means the largest 1% of
    the points carries more than half of the sum, the signature of an MGF
    that does not exist at that t.
    """
    proj = sample_set.points @ u.coords
    n = proj.size
    k = max(1, math.ceil(0.01 * n))
    out = []
    with np.errstate(over="ignore", invalid="ignore"):
        for t in t_grid:
            terms = np.exp(float(t) * proj)
            total = float(terms.sum())
            top = float(np.sort(terms)[-k:].sum())
            if not math.isfinite(total):
                unstable = True
            else:
                unstable = top > 0.5 * total
            out.append((float(t), total / n, unstable))
    return out
