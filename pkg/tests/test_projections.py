import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwkit.directions import Direction
from cwkit.errors import DimensionMismatch
from cwkit.projections import (AtomicMeasure, Projected1D, SampleSet, distance_trace,
                               ks_distance, project, wasserstein1)

SQ2 = np.sqrt(2.0) / 2.0


def delta(*coords):
    return AtomicMeasure(np.array([coords], dtype=float), np.array([1.0]))


def law(values, weights=None):
    values = np.asarray(values, dtype=float)
    if weights is None:
        weights = np.full(values.size, 1.0 / values.size)
    return Projected1D.from_raw(values, np.asarray(weights, dtype=float))


class TestProject:
    def test_coordinate_projection(self):
        s = SampleSet(np.array([[1.0, 2.0], [3.0, 4.0]]))
        p = project(s, Direction(np.array([1.0, 0.0])))
        assert p.values.tolist() == [1.0, 3.0]
        assert p.weights.tolist() == [0.5, 0.5]

    def test_diagonal_projection(self):
        m = AtomicMeasure(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0.5, 0.5]))
        p = project(m, Direction(np.array([SQ2, SQ2])))
        assert p.values == pytest.approx([0.0, np.sqrt(2.0)], abs=1e-15)
        assert p.weights.tolist() == [0.5, 0.5]

    def test_atoms_merging_to_one(self):
        m = AtomicMeasure(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0.5, 0.5]))
        p = project(m, Direction(np.array([SQ2, SQ2])))
        assert p.n_atoms == 1
        assert p.values[0] == pytest.approx(SQ2, abs=1e-15)
        assert p.weights[0] == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            project(SampleSet(np.zeros((2, 3))), Direction(np.array([1.0, 0.0])))

    def test_translation_by_direction(self):
        rng = np.random.default_rng(1)
        pts = rng.standard_normal((50, 3))
        u = Direction.from_vector(rng.standard_normal(3))
        c = 2.75
        a = project(SampleSet(pts + c * u.coords), u)
        b = project(SampleSet(pts), u)
        assert np.allclose(a.values, b.values + c, atol=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**6))
    def test_mass_preserved(self, seed):
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((rng.integers(1, 40), 2))
        u = Direction.from_vector(rng.standard_normal(2))
        p = project(SampleSet(pts), u)
        assert abs(p.weights.sum() - 1.0) <= 1e-12


class TestKS:
    def test_identical_zero(self):
        a = law([0.0, 1.0, 2.0])
        assert ks_distance(a, a) == 0.0

    def test_disjoint_point_masses(self):
        assert ks_distance(law([0.0]), law([1.0])) == 1.0

    def test_shifted_uniform_atoms(self):
        # oracle: evaluate both CDFs on a fine grid and take the sup
        a_vals = np.arange(10) / 10.0
        b_vals = a_vals + 0.05
        grid = np.linspace(-0.5, 1.5, 4001)
        cdf = lambda vals, xs: np.array([(vals <= x).mean() for x in xs])
        oracle = np.max(np.abs(cdf(a_vals, grid) - cdf(b_vals, grid)))
        assert oracle == pytest.approx(0.1, abs=1e-12)
        assert ks_distance(law(a_vals), law(b_vals)) == pytest.approx(0.1, abs=1e-12)

    def test_bounded_by_one(self):
        a = law([0.0, 5.0], [0.9, 0.1])
        b = law([-3.0, 0.0, 2.0])
        assert 0.0 <= ks_distance(a, b) <= 1.0


class TestW1:
    def test_identical_zero(self):
        a = law([0.5, 2.0], [0.25, 0.75])
        assert wasserstein1(a, a) == 0.0

    def test_unit_transport(self):
        assert wasserstein1(law([0.0]), law([1.0])) == 1.0

    def test_half_mass_moved(self):
        a = law([0.0, 1.0])
        b = law([0.0, 2.0])
        assert wasserstein1(a, b) == pytest.approx(0.5, abs=1e-15)

    def test_matches_scipy_on_samples(self):
        from scipy.stats import wasserstein_distance

        rng = np.random.default_rng(3)
        x, y = rng.standard_normal(200), rng.standard_normal(300) + 0.3
        ours = wasserstein1(law(x), law(y))
        assert ours == pytest.approx(wasserstein_distance(x, y), abs=1e-10)


@st.composite
def small_laws(draw):
    # values on a 1/128 lattice: inter-atom gaps are far above the merge
    # tolerance, so cross-law merges happen only at exact equality
    k = draw(st.integers(1, 6))
    ticks = draw(st.lists(st.integers(-640, 640), min_size=k, max_size=k, unique=True))
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    w = np.asarray(raw)
    return law(np.asarray(ticks) / 128.0, w / w.sum())


@settings(max_examples=80, deadline=None)
@given(small_laws(), small_laws(), small_laws())
def test_metric_axioms(a, b, c):
    for dist in (ks_distance, wasserstein1):
        dab, dba = dist(a, b), dist(b, a)
        assert dab >= 0.0
        assert dab == pytest.approx(dba, abs=1e-14)
        assert dist(a, c) <= dab + dist(b, c) + 1e-10
    assert ks_distance(a, b) <= 1.0


@settings(max_examples=40, deadline=None)
@given(small_laws(), small_laws())
def test_zero_iff_equal_after_merge(a, b):
    assert ks_distance(a, a) == 0.0
    if ks_distance(a, b) == 0.0:
        assert a.n_atoms == b.n_atoms
        assert np.allclose(a.values, b.values, atol=3e-12)
        assert np.allclose(a.weights, b.weights, atol=1e-12)


class TestDistanceTrace:
    def test_constant_target_sequence(self):
        t = SampleSet(np.array([[0.0, 1.0], [2.0, -1.0]]))
        tr = distance_trace([t, t, t], t, Direction(np.array([1.0, 0.0])), "ks")
        assert tr.distances.tolist() == [0.0, 0.0, 0.0]
        assert tr.indices.tolist() == [1, 2, 3]
        assert tr.sizes.tolist() == [2, 2, 2]

    def test_gaussian_ks_decreases_below_dkw(self):
        # DKW: one-sample KS against the truth is < sqrt(ln(2/delta)/(2n))
        # w.p. 1-delta; with n=1e4 and a 1e5 reference this is well under 0.05
        rng = np.random.default_rng(42)
        seq = [SampleSet(rng.standard_normal((n, 2))) for n in (100, 1000, 10000)]
        ref = SampleSet(rng.standard_normal((10**5, 2)))
        tr = distance_trace(seq, ref, Direction(np.array([0.0, 1.0])), "ks")
        assert tr.distances[-1] < 0.05
        assert tr.distances[0] >= tr.distances[-1]
        dkw = np.sqrt(np.log(2 / 0.001) / (2 * 10**4)) + np.sqrt(np.log(2 / 0.001) / (2 * 10**5))
        assert tr.distances[-1] < dkw

    def test_shrinking_atoms_w1_exact(self):
        target = delta(0.0, 0.0)
        seq = [delta(1.0 / n, 0.0) for n in (1, 2, 4, 8)]
        tr = distance_trace(seq, target, Direction(np.array([1.0, 0.0])), "w1")
        assert tr.distances.tolist() == [1.0, 0.5, 0.25, 0.125]

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            distance_trace([SampleSet(np.zeros((1, 3)))], delta(0.0, 0.0),
                           Direction(np.array([1.0, 0.0])), "ks")
