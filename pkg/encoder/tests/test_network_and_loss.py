import numpy as np
import pytest
import torch

from triplet_encoder import build_network, mine_semi_hard, triplet_loss


class TestNetwork:
    def test_output_shape_is_batch_by_latent(self):
        net = build_network(seed=0)
        for batch in (1, 7, 32):
            out = net(torch.rand(batch, 28, 28))
            assert tuple(out.shape) == (batch, 3)

    def test_accepts_channel_dimension(self):
        net = build_network(seed=0)
        out = net(torch.rand(5, 1, 28, 28))
        assert tuple(out.shape) == (5, 3)

    def test_deterministic_initialization(self):
        a = build_network(seed=42)
        b = build_network(seed=42)
        for pa, pb in zip(a.parameters(), b.parameters()):
            assert torch.equal(pa, pb)

    def test_different_seeds_differ(self):
        a = build_network(seed=1)
        b = build_network(seed=2)
        assert any(not torch.equal(pa, pb) for pa, pb in zip(a.parameters(), b.parameters()))

    def test_forward_finite_on_random_input(self):
        net = build_network(seed=3)
        out = net(torch.rand(16, 28, 28) * 10)
        assert torch.isfinite(out).all()


class TestTripletLoss:
    def test_zero_when_negative_beyond_margin(self):
        a = torch.tensor([0.0, 0.0])
        n = torch.tensor([2.0, 0.0])  # d(a, n) = 2 * margin
        assert float(triplet_loss(a, a.clone(), n, margin=1.0)) == 0.0

    def test_equal_distances_give_margin(self):
        a = torch.tensor([0.0, 0.0])
        p = torch.tensor([1.0, 0.0])
        n = torch.tensor([0.0, 1.0])
        assert float(triplet_loss(a, p, n, margin=1.0)) == pytest.approx(1.0)

    def test_hand_value(self):
        # d(a,p)=1, d(a,n)=0.5, margin 1 -> 1.5
        a = torch.tensor([0.0])
        p = torch.tensor([1.0])
        n = torch.tensor([0.5])
        assert float(triplet_loss(a, p, n, margin=1.0)) == pytest.approx(1.5)

    def test_non_negative_on_random_batches(self):
        g = torch.Generator().manual_seed(5)
        a = torch.randn(200, 3, generator=g)
        p = torch.randn(200, 3, generator=g)
        n = torch.randn(200, 3, generator=g)
        assert (triplet_loss(a, p, n, margin=0.7) >= 0).all()

    def test_batched_shape(self):
        a = torch.zeros(10, 3)
        assert triplet_loss(a, a, a, margin=1.0).shape == (10,)


class TestMining:
    def test_unique_feasible_negative_selected(self):
        # anchor 0, positive 1 at distance 1; negatives at 0.5 (too close),
        # 1.5 (just beyond: the pick), 5.0 (farther)
        emb = torch.tensor([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [1.5, 0.0], [5.0, 0.0]])
        labels = torch.tensor([0, 0, 1, 1, 1])
        a, p, n = mine_semi_hard(emb, labels, margin=1.0)
        pick = {(int(ai), int(pi)): int(ni) for ai, pi, ni in zip(a, p, n)}
        assert pick[(0, 1)] == 3

    def test_fallback_to_nearest_when_none_beyond(self):
        # all negatives closer than the positive: nearest negative chosen
        emb = torch.tensor([[0.0, 0.0], [4.0, 0.0], [0.5, 0.0], [1.0, 0.0]])
        labels = torch.tensor([0, 0, 1, 1])
        a, p, n = mine_semi_hard(emb, labels, margin=1.0)
        pick = {(int(ai), int(pi)): int(ni) for ai, pi, ni in zip(a, p, n)}
        assert pick[(0, 1)] == 2

    def test_balanced_two_class_batch_pair_count(self):
        # 2 classes x 2 samples: each anchor has exactly one positive, and
        # every pair has a usable negative -> 4 triplets
        emb = torch.tensor([[0.0, 0.0], [0.2, 0.0], [5.0, 0.0], [5.2, 0.0]])
        labels = torch.tensor([0, 0, 1, 1])
        a, p, n = mine_semi_hard(emb, labels, margin=1.0)
        assert a.numel() == 4
        assert all(labels[ni] != labels[ai] for ai, ni in zip(a, n))

    def test_single_class_batch_skipped_with_warning(self, caplog):
        emb = torch.rand(6, 3)
        labels = torch.zeros(6, dtype=torch.long)
        with caplog.at_level("WARNING"):
            a, p, n = mine_semi_hard(emb, labels, margin=1.0)
        assert a.numel() == 0
        assert any("single-class" in record.message for record in caplog.records)

    def test_triplets_reference_valid_rows(self):
        g = torch.Generator().manual_seed(11)
        emb = torch.randn(30, 3, generator=g)
        labels = torch.randint(0, 3, (30,), generator=g)
        a, p, n = mine_semi_hard(emb, labels, margin=1.0)
        assert (labels[a] == labels[p]).all()
        assert (labels[a] != labels[n]).all()
        assert (a != p).all()
