import numpy as np
import pytest

from squant import (
    DivergenceError,
    FeatureSet,
    InvalidConfigError,
    LearningSchedule,
    SQConfig,
    cesaro_average,
    empirical_objective,
    initialize,
    run_multistart,
    run_sq,
)
from squant.driver import EPOCH_SHUFFLE, _draw_indices
from squant.synthetic import MixtureSpec, generate

from oracles import enumerate_optimum

COMPLIANT = LearningSchedule.polynomial(0.3, 0.75)


def mixture(seed=5, count=150):
    spec = MixtureSpec(
        means=np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]]),
        scales=np.array([0.05, 0.05, 0.05]),
        weights=np.array([1 / 3, 1 / 3, 1 / 3]),
        count=count,
        seed=seed,
    )
    return generate(spec)


class TestRunSq:
    def test_single_center_converges_to_weighted_mean(self):
        rng = np.random.default_rng(0)
        points = rng.uniform(0, 1, size=(50, 2))
        weights = rng.uniform(0.5, 1.5, size=50)
        weights /= weights.sum()
        data = FeatureSet(points, weights=weights)
        cfg = SQConfig(
            n_centers=1, rank=2.0,
            schedule=LearningSchedule.polynomial(0.5, 0.75),
            iterations=20000, seed=3,
        )
        book, _ = run_sq(data, cfg)
        assert np.linalg.norm(book.centers[0] - weights @ points) <= 1e-2

    @pytest.mark.parametrize(
        "variant,rate",
        [("sgd", 0.3), ("momentum", 0.3), ("nag", 0.3), ("adagrad", 1.0),
         ("rmsprop", 0.3), ("adam", 0.3)],
    )
    def test_two_cluster_optimum_all_variants(self, two_pairs, variant, rate):
        fstar = enumerate_optimum(two_pairs.points.copy(), two_pairs.weights.copy(), 2)
        cfg = SQConfig(
            n_centers=2, rank=2.0, variant=variant,
            schedule=LearningSchedule.polynomial(rate, 0.75),
            iterations=8000, seed=11, restarts=5,
        )
        result = run_multistart(two_pairs, cfg)
        final = empirical_objective(two_pairs, result.codebook)
        assert final <= fstar * 1.05

    def test_zero_iterations_returns_initial(self):
        data = mixture()
        cfg = SQConfig(n_centers=3, iterations=0, seed=9, schedule=COMPLIANT)
        book, trace = run_sq(data, cfg)
        start = initialize(data, cfg, seed=np.random.SeedSequence(9).spawn(2)[0])
        assert (book.centers == start.centers).all()
        assert len(trace) == 1
        assert trace.iterations[0] == 0

    def test_reproducibility_bit_exact(self):
        data = mixture()
        cfg = SQConfig(n_centers=3, iterations=800, seed=21, schedule=COMPLIANT,
                       variant="adam")
        book_a, trace_a = run_sq(data, cfg)
        book_b, trace_b = run_sq(data, cfg)
        assert (book_a.centers == book_b.centers).all()
        assert (trace_a.objectives == trace_b.objectives).all()
        assert (trace_a.iterations == trace_b.iterations).all()

    def test_one_center_locality_per_iteration(self):
        data = mixture(count=40)
        cfg = SQConfig(n_centers=3, iterations=60, seed=2, schedule=COMPLIANT,
                       variant="momentum")
        snapshots = []
        run_sq(data, cfg, on_step=lambda t, k, centers: snapshots.append((k, centers)))
        for (k, after), (_, before) in zip(snapshots[1:], snapshots[:-1]):
            changed = np.flatnonzero(np.any(after != before, axis=1))
            assert set(changed) <= {k}

    def test_projection_keeps_iterates_in_box(self):
        data = mixture()
        box = data.bounding_box()
        cfg = SQConfig(n_centers=3, iterations=500, seed=4, schedule=COMPLIANT, region=box)
        book, _ = run_sq(data, cfg)
        for center in book.centers:
            assert box.contains(center)

    def test_divergence_raises_with_trace(self):
        data = FeatureSet(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]]))
        cfg = SQConfig(n_centers=2, rank=3.0, schedule=LearningSchedule.constant(1e5),
                       iterations=500, seed=1, eval_stride=10)
        with pytest.raises(DivergenceError) as err:
            with np.errstate(over="ignore"):
                run_sq(data, cfg)
        assert err.value.trace is not None
        assert len(err.value.trace) >= 1

    def test_non_euclidean_norm_warns(self):
        data = mixture(count=20)
        cfg = SQConfig(n_centers=2, iterations=5, seed=1, schedule=COMPLIANT,
                       norm_order=1.0)
        with pytest.warns(UserWarning):
            run_sq(data, cfg)

    def test_epoch_shuffle_visits_each_point_once_per_epoch(self):
        data = mixture(count=30)
        cfg = SQConfig(n_centers=3, iterations=90, seed=7, schedule=COMPLIANT,
                       sampling=EPOCH_SHUFFLE)
        order = _draw_indices(data, cfg, np.random.default_rng(7))
        for epoch in range(3):
            block = order[epoch * 30 : (epoch + 1) * 30]
            assert sorted(block.tolist()) == list(range(30))

    def test_final_objective_not_above_initial_on_many_seeds(self):
        data = mixture()
        box = data.bounding_box()
        increases = 0
        for seed in range(30):
            cfg = SQConfig(n_centers=3, iterations=1000, seed=seed,
                           schedule=LearningSchedule.polynomial(0.2, 0.75), region=box)
            book, trace = run_sq(data, cfg)
            if empirical_objective(data, book) > trace.initial_objective:
                increases += 1
        assert increases <= 1  # >= 95% non-increasing

    def test_unbounded_run_stays_near_data_hull(self):
        data = mixture()
        lo, hi = data.points.min(axis=0), data.points.max(axis=0)
        margin = 0.01 * (hi - lo)
        for seed in range(10):
            cfg = SQConfig(n_centers=3, iterations=1200, seed=seed,
                           schedule=LearningSchedule.polynomial(0.2, 0.75))
            book, _ = run_sq(data, cfg)
            assert (book.centers >= lo - margin).all()
            assert (book.centers <= hi + margin).all()


class TestCesaroAverage:
    def test_constant_rate_is_arithmetic_mean(self):
        iterates = [np.array([float(v)]) for v in (1, 2, 3, 4)]
        got = cesaro_average(iterates, LearningSchedule.constant(0.7))
        assert got[0] == pytest.approx(2.5, abs=1e-15)

    def test_single_iterate_identity(self):
        got = cesaro_average([np.array([3.0, -1.0])], LearningSchedule.constant(1.0))
        assert got.tolist() == [3.0, -1.0]

    def test_harmonic_rates_match_direct_sum(self):
        # rates rho_s = 1/(s+1) for iterates s = 0..4: evaluate the recursion
        # against the explicit normalized weighted sum
        sched = LearningSchedule.polynomial(1.0, 1.0)
        iterates = [np.array([float(v)]) for v in (5, 1, 4, 2, 3)]
        rates = [sched.rate(s) for s in range(5)]
        want = sum(r * y for r, y in zip(rates, iterates)) / sum(rates)
        got = cesaro_average(iterates, sched)
        assert got[0] == pytest.approx(want[0], rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(InvalidConfigError):
            cesaro_average([], LearningSchedule.constant(1.0))

    def test_run_with_averaging_matches_online_recursion(self):
        data = mixture(count=40)
        iterates = []
        cfg = SQConfig(n_centers=2, iterations=25, seed=13, schedule=COMPLIANT)
        run_sq(data, cfg, on_step=lambda t, k, centers: iterates.append(centers))
        averaged_cfg = SQConfig(n_centers=2, iterations=25, seed=13, schedule=COMPLIANT,
                                averaging="cesaro")
        book, _ = run_sq(data, averaged_cfg)
        want = cesaro_average(iterates, COMPLIANT)
        assert np.allclose(book.centers, want, atol=1e-12)


class TestInitialize:
    def test_explicit_passthrough(self):
        data = mixture(count=20)
        centers = np.array([[0.0, 0.0], [1.0, 1.0]])
        cfg = SQConfig(n_centers=2, init="explicit", explicit_centers=centers,
                       schedule=COMPLIANT)
        book = initialize(data, cfg)
        assert (book.centers == centers).all()

    def test_per_label_draws_one_center_per_class(self):
        rng = np.random.default_rng(3)
        points = rng.normal(size=(100, 2))
        labels = np.repeat(np.arange(10), 10)
        data = FeatureSet(points, labels=labels, n_classes=10)
        cfg = SQConfig(n_centers=10, init="per-label-sample", schedule=COMPLIANT)
        book = initialize(data, cfg, seed=5)
        assert book.size == 10
        for label in range(10):
            members = points[labels == label]
            assert any((book.centers[label] == m).all() for m in members)

    def test_per_label_requires_labels(self):
        data = mixture(count=20)
        unlabeled = FeatureSet(data.points.copy())
        cfg = SQConfig(n_centers=3, init="per-label-sample", schedule=COMPLIANT)
        with pytest.raises(InvalidConfigError):
            initialize(unlabeled, cfg)

    def test_sample_mode_reproducible_and_distinct(self):
        data = mixture(count=20)
        cfg = SQConfig(n_centers=5, schedule=COMPLIANT, seed=17)
        a = initialize(data, cfg)
        b = initialize(data, cfg)
        assert (a.centers == b.centers).all()
        assert len({tuple(c) for c in a.centers}) == 5

    def test_more_centers_than_points_rejected(self):
        data = mixture(count=5)
        cfg = SQConfig(n_centers=6, schedule=COMPLIANT)
        with pytest.raises(InvalidConfigError):
            initialize(data, cfg)


class TestMultistart:
    def test_single_restart_identical_to_run_sq(self):
        data = mixture()
        cfg = SQConfig(n_centers=3, iterations=400, seed=19, schedule=COMPLIANT)
        direct_book, direct_trace = run_sq(data, cfg)
        result = run_multistart(data, cfg)
        assert (result.codebook.centers == direct_book.centers).all()
        assert (result.trace.objectives == direct_trace.objectives).all()

    def test_best_of_recovers_optimum_despite_adversarial_starts(self, two_pairs):
        fstar = enumerate_optimum(two_pairs.points.copy(), two_pairs.weights.copy(), 2)
        cfg = SQConfig(n_centers=2, iterations=6000, seed=23,
                       schedule=LearningSchedule.polynomial(0.3, 0.75), restarts=5)
        result = run_multistart(two_pairs, cfg)
        final = empirical_objective(two_pairs, result.codebook)
        assert final <= fstar * 1.05

    def test_objectives_sorted_worst_to_best(self):
        data = mixture()
        cfg = SQConfig(n_centers=3, iterations=300, seed=29, schedule=COMPLIANT, restarts=4)
        result = run_multistart(data, cfg)
        values = list(result.final_objectives)
        assert values == sorted(values, reverse=True)
        assert len(values) == 4

    def test_all_divergent_restarts_propagate(self):
        data = FeatureSet(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]]))
        cfg = SQConfig(n_centers=2, rank=3.0, schedule=LearningSchedule.constant(1e5),
                       iterations=400, seed=1, eval_stride=10, restarts=3)
        with pytest.raises(DivergenceError):
            with np.errstate(over="ignore"):
                run_multistart(data, cfg)
