"""Training loop: seeded batching over the labeled subset, within-batch
triplet mining, margin loss, decoupled-weight-decay moment updates."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch

from .loss import triplet_loss
from .mining import mine_semi_hard
from .net import LATENT_DIM, EncoderNet, build_network

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EncoderConfig:
    fraction: float = 1.0
    epochs: int = 50
    batch_size: int = 1000
    rate: float = 1e-3
    decay: float = 1e-5
    margin: float = 1.0
    latent_dim: int = LATENT_DIM
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError(f"fraction must lie in (0, 1], got {self.fraction}")
        if self.margin <= 0:
            raise ValueError(f"margin must be > 0, got {self.margin}")
        if self.epochs < 1 or self.batch_size < 2:
            raise ValueError("epochs must be >= 1 and batch_size >= 2")


def train(
    config: EncoderConfig, images: np.ndarray, labels: np.ndarray
) -> tuple[EncoderNet, list[float]]:
    """Train on the labeled images; returns the encoder and per-epoch mean
    batch losses. Aborts on a non-finite loss."""
    torch.manual_seed(config.seed)
    model = build_network(seed=config.seed, latent_dim=config.latent_dim)
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.rate, weight_decay=config.decay
    )
    rng = np.random.default_rng(config.seed)
    tensor_images = torch.from_numpy(np.ascontiguousarray(images, dtype=np.float32))
    tensor_labels = torch.from_numpy(np.ascontiguousarray(labels, dtype=np.int64))

    history = []
    model.train()
    for epoch in range(config.epochs):
        order = rng.permutation(images.shape[0])
        batch_losses = []
        for start in range(0, len(order), config.batch_size):
            chunk = order[start : start + config.batch_size]
            if len(chunk) < 2:
                continue
            batch = tensor_images[chunk]
            batch_labels = tensor_labels[chunk]
            embeddings = model(batch)
            a, p, n = mine_semi_hard(embeddings, batch_labels, config.margin)
            if a.numel() == 0:
                continue
            losses = triplet_loss(
                embeddings[a], embeddings[p], embeddings[n], config.margin
            )
            loss = losses.mean()
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch}, batch start {start}"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            batch_losses.append(float(loss.detach()))
        epoch_mean = float(np.mean(batch_losses)) if batch_losses else 0.0
        history.append(epoch_mean)
        log.info("epoch %d mean triplet loss %.6f", epoch + 1, epoch_mean)
    return model, history
