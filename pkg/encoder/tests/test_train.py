import numpy as np
import pytest
import torch

from triplet_encoder import EncoderConfig, build_network, embed_images, train

from image_fixtures import synthetic_images


class TestConfig:
    def test_fraction_validation(self):
        with pytest.raises(ValueError):
            EncoderConfig(fraction=0.0)
        with pytest.raises(ValueError):
            EncoderConfig(fraction=1.2)

    def test_margin_validation(self):
        with pytest.raises(ValueError):
            EncoderConfig(margin=0.0)

    def test_paper_style_defaults(self):
        cfg = EncoderConfig()
        assert cfg.epochs == 50
        assert cfg.batch_size == 1000
        assert cfg.rate == 1e-3
        assert cfg.decay == 1e-5
        assert cfg.margin == 1.0
        assert cfg.latent_dim == 3


class TestTraining:
    def test_loss_decreases_on_separable_classes(self, four_class_images):
        images, labels = four_class_images
        cfg = EncoderConfig(epochs=6, batch_size=32, seed=1)
        _, history = train(cfg, images, labels)
        assert len(history) == 6
        assert history[-1] < history[0]

    def test_class_separation_after_training(self, four_class_images):
        images, labels = four_class_images
        cfg = EncoderConfig(epochs=6, batch_size=32, seed=1)
        model, _ = train(cfg, images, labels)
        test_images, test_labels = synthetic_images(4, 20, seed=77)
        emb = embed_images(model, test_images)
        diff = emb[:, None, :] - emb[None, :, :]
        dists = np.sqrt((diff * diff).sum(axis=2))
        upper = np.triu_indices(len(test_labels), 1)
        same = test_labels[:, None] == test_labels[None, :]
        intra = dists[upper][same[upper]].mean()
        inter = dists[upper][~same[upper]].mean()
        assert intra < inter

    def test_untrained_network_does_not_separate_as_well(self, four_class_images):
        images, labels = four_class_images
        cfg = EncoderConfig(epochs=6, batch_size=32, seed=1)
        trained, _ = train(cfg, images, labels)
        untrained = build_network(seed=1)

        def separation(model):
            emb = embed_images(model, images)
            diff = emb[:, None, :] - emb[None, :, :]
            dists = np.sqrt((diff * diff).sum(axis=2))
            upper = np.triu_indices(len(labels), 1)
            same = labels[:, None] == labels[None, :]
            intra = dists[upper][same[upper]].mean()
            return dists[upper][~same[upper]].mean() / max(intra, 1e-12)

        assert separation(trained) > separation(untrained)

    def test_training_is_seeded(self, four_class_images):
        images, labels = four_class_images
        cfg = EncoderConfig(epochs=2, batch_size=32, seed=5)
        _, history_a = train(cfg, images, labels)
        _, history_b = train(cfg, images, labels)
        assert history_a == pytest.approx(history_b, rel=1e-6)
