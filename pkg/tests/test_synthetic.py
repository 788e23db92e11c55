import numpy as np
import pytest

from squant import InvalidConfigError, MixtureSpec, generate, separated_clusters, with_outliers

from oracles import enumerate_optimum


class TestMixture:
    def spec(self, **overrides):
        kw = dict(
            means=np.array([[0.0, 0.0], [5.0, 5.0]]),
            scales=np.array([0.1, 0.1]),
            weights=np.array([0.5, 0.5]),
            count=100,
            seed=3,
        )
        kw.update(overrides)
        return MixtureSpec(**kw)

    def test_zero_scale_puts_points_on_means(self):
        data = generate(self.spec(scales=np.array([0.0, 0.0])))
        for i in range(data.count):
            mean = [0.0, 0.0] if data.labels[i] == 0 else [5.0, 5.0]
            assert data.points[i].tolist() == mean

    def test_seed_reproducibility(self):
        a = generate(self.spec())
        b = generate(self.spec())
        assert (a.points == b.points).all()
        assert (a.labels == b.labels).all()

    def test_labels_record_components(self):
        data = generate(self.spec(scales=np.array([0.01, 0.01])))
        for i in range(data.count):
            near0 = np.linalg.norm(data.points[i]) < 1.0
            assert data.labels[i] == (0 if near0 else 1)

    def test_proportions_close_to_weights(self):
        spec = self.spec(weights=np.array([0.3, 0.7]), count=4000)
        data = generate(spec)
        frac = (data.labels == 0).mean()
        sigma = np.sqrt(0.3 * 0.7 / 4000)
        assert abs(frac - 0.3) <= 5 * sigma

    def test_two_far_components_match_enumeration_optimum(self):
        spec = self.spec(count=8, scales=np.array([0.01, 0.01]))
        data = generate(spec)
        fstar = enumerate_optimum(data.points.copy(), data.weights.copy(), 2)
        by_label = 0.0
        for c in (0, 1):
            members = data.points[data.labels == c]
            by_label += (
                ((members - members.mean(axis=0)) ** 2).sum(axis=1).sum() / data.count
            )
        assert fstar == pytest.approx(by_label, rel=1e-9)

    def test_validation(self):
        with pytest.raises(InvalidConfigError):
            self.spec(weights=np.array([0.4, 0.4]))
        with pytest.raises(InvalidConfigError):
            self.spec(scales=np.array([-0.1, 0.1]))
        with pytest.raises(InvalidConfigError):
            self.spec(count=0)


class TestHelpers:
    def test_separated_clusters_shape_and_labels(self):
        data = separated_clusters(3, 10, dim=4, seed=9)
        assert data.count == 30
        assert data.dim == 4
        assert data.n_classes == 3

    def test_with_outliers_appends(self):
        base = separated_clusters(2, 5, seed=1)
        extended = with_outliers(base, np.array([[99.0, 99.0]]))
        assert extended.count == base.count + 1
        assert (extended.points[-1] == [99.0, 99.0]).all()
        assert abs(extended.weights.sum() - 1.0) <= 1e-9
