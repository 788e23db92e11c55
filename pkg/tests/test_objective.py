import numpy as np
import pytest

from squant import (
    Codebook,
    DimensionMismatchError,
    FeatureSet,
    ProjectionRegion,
    UnboundedRegionError,
    assign,
    distance,
    empirical_objective,
    interchange_lower_bound,
    nearest,
    partition,
)

from oracles import brute_nearest


class TestDistance:
    def test_identity(self):
        x = np.array([1.0, -2.0, 3.0])
        assert distance(x, x, 2.0) == 0.0

    def test_three_four_five(self):
        assert distance(np.array([0.0, 0.0]), np.array([3.0, 4.0]), 2.0) == 5.0

    def test_taxicab(self):
        assert distance(np.array([0.0, 0.0]), np.array([3.0, 4.0]), 1.0) == 7.0

    def test_general_order(self):
        # p=3: (1 + 8)^(1/3)
        got = distance(np.array([0.0, 0.0]), np.array([1.0, 2.0]), 3.0)
        assert got == pytest.approx(9.0 ** (1 / 3), rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            distance(np.zeros(2), np.zeros(3))

    def test_order_below_one_rejected(self):
        with pytest.raises(ValueError):
            distance(np.zeros(2), np.ones(2), 0.5)


class TestNearest:
    def test_single_winner(self):
        book = Codebook(np.array([[1.0, 0.0], [5.0, 0.0]]))
        k, d, ties = nearest(np.array([0.0, 0.0]), book)
        assert (k, d, ties) == (0, 1.0, (0,))

    def test_midpoint_tie_canonical_low_index(self):
        book = Codebook(np.array([[1.0, 0.0], [5.0, 0.0]]))
        k, d, ties = nearest(np.array([3.0, 0.0]), book)
        assert ties == (0, 1)
        assert k == 0
        assert d == 2.0

    def test_three_center_instance(self):
        # distances: 0.9055, 0.1414, 1.2728 -> center 1
        book = Codebook(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        k, _, _ = nearest(np.array([0.9, 0.1]), book)
        assert k == 1

    def test_assign_matches_brute_force(self):
        rng = np.random.default_rng(3)
        points = rng.uniform(-1, 1, size=(40, 3))
        centers = rng.uniform(-1, 1, size=(5, 3))
        got = assign(FeatureSet(points), Codebook(centers))
        want_idx, want_d = brute_nearest(points, centers)
        assert (got.nearest_index == want_idx).all()
        assert np.allclose(got.nearest_distance, want_d, atol=1e-12)

    def test_assign_distance_is_minimum(self, random_instance):
        data, book = random_instance(5)
        result = assign(data, book)
        for i in range(data.count):
            d_all = [distance(data.points[i], c) for c in book.centers]
            assert result.nearest_distance[i] == pytest.approx(min(d_all), abs=1e-12)


class TestEmpiricalObjective:
    def test_symmetric_pair_variance(self):
        data = FeatureSet(np.array([[0.0, 0.0], [2.0, 0.0]]))
        book = Codebook(np.array([[1.0, 0.0]]), rank=2.0)
        assert empirical_objective(data, book) == pytest.approx(1.0)

    def test_perfect_quantization(self, random_instance):
        data, _ = random_instance(9, count=6, n_centers=6)
        book = Codebook(data.points.copy(), rank=2.0)
        assert empirical_objective(data, book) == 0.0

    def test_hand_enumeration_line(self, line_points):
        book = Codebook(np.array([[0.5], [10.0]]), rank=2.0)
        assert empirical_objective(line_points, book) == pytest.approx(1.0 / 6.0)

    def test_weighted_generalizes_uniform(self):
        points = np.array([[0.0], [2.0]])
        book = Codebook(np.array([[0.0]]), rank=2.0)
        skewed = FeatureSet(points, weights=np.array([0.75, 0.25]))
        assert empirical_objective(skewed, book) == pytest.approx(0.25 * 4.0)

    def test_permutation_invariance(self, random_instance):
        data, book = random_instance(13, n_centers=4)
        value = empirical_objective(data, book)
        perm = Codebook(book.centers[::-1].copy(), rank=book.rank)
        assert empirical_objective(data, perm) == pytest.approx(value, rel=1e-14)

    def test_appending_center_never_increases(self, random_instance):
        data, book = random_instance(17, n_centers=2)
        value = empirical_objective(data, book)
        rng = np.random.default_rng(18)
        for _ in range(10):
            extra = np.vstack([book.centers, rng.uniform(-1, 1, size=(1, 2))])
            assert empirical_objective(data, Codebook(extra, rank=book.rank)) <= value + 1e-15

    def test_high_rank_no_overflow(self):
        data = FeatureSet(np.array([[0.0], [1e3]]))
        book = Codebook(np.array([[0.0]]), rank=100.0)
        assert np.isfinite(empirical_objective(data, book))


class TestPartition:
    def test_all_points_one_group(self):
        data = FeatureSet(np.array([[0.0], [0.1], [0.2], [0.3]]))
        book = Codebook(np.array([[0.0], [50.0]]))
        groups = partition(data, book)
        assert len(groups[0]) == 4 and len(groups[1]) == 0

    def test_strictly_farther_center_gets_empty_group(self):
        data = FeatureSet(np.array([[0.0, 0.0], [2.0, 0.0]]))
        book = Codebook(np.array([[1.0, 0.0], [5.0, 5.0]]))
        groups = partition(data, book)
        assert len(groups[1]) == 0

    def test_matches_brute_force_and_is_exhaustive(self, random_instance):
        data, book = random_instance(23)
        groups = partition(data, book)
        want_idx, _ = brute_nearest(data.points, book.centers.copy())
        seen = np.full(data.count, -1)
        for k, members in enumerate(groups):
            for i in members:
                assert seen[i] == -1  # exclusive
                seen[i] = k
        assert (seen >= 0).all()  # exhaustive
        assert (seen == want_idx).all()

    def test_objective_recomposes_from_partition(self, random_instance):
        data, book = random_instance(29, rank=3.0)
        groups = partition(data, book)
        total = 0.0
        for k, members in enumerate(groups):
            for i in members:
                d = distance(data.points[i], book.centers[k])
                total += data.weights[i] * d**book.rank
        assert total == pytest.approx(empirical_objective(data, book), abs=1e-10)


class TestInterchangeLowerBound:
    def test_all_containing_regions_give_zero(self, random_instance):
        data, _ = random_instance(31)
        big = ProjectionRegion.box([-2.0, -2.0], [2.0, 2.0])
        assert interchange_lower_bound(data, [big, big], rank=2.0) == 0.0

    def test_single_far_region_clamp_value(self, line_points):
        region = ProjectionRegion.box([100.0], [101.0])
        # every point clamps to 100: mean of (100^2, 99^2, 90^2)
        want = (100.0**2 + 99.0**2 + 90.0**2) / 3.0
        got = interchange_lower_bound(line_points, [region], rank=2.0)
        assert got == pytest.approx(want, rel=1e-12)

    def test_unbounded_region_rejected(self, line_points):
        with pytest.raises(UnboundedRegionError):
            interchange_lower_bound(line_points, [ProjectionRegion.unbounded()], rank=2.0)

    def test_bounds_objective_on_random_instances(self):
        rng = np.random.default_rng(37)
        for trial in range(100):
            count = int(rng.integers(3, 12))
            n_centers = int(rng.integers(1, 4))
            dim = int(rng.integers(1, 4))
            rank = float(rng.choice([1.0, 2.0, 3.0]))
            data = FeatureSet(rng.uniform(-1, 1, size=(count, dim)))
            regions, centers = [], []
            for _ in range(n_centers):
                lo = rng.uniform(-1.5, 0.5, size=dim)
                hi = lo + rng.uniform(0.1, 1.5, size=dim)
                regions.append(ProjectionRegion.box(lo, hi))
                centers.append(rng.uniform(lo, hi))
            bound = interchange_lower_bound(data, regions, rank=rank)
            objective = empirical_objective(data, Codebook(np.array(centers), rank=rank))
            assert bound <= objective + 1e-12
