"""Convolutional encoder mapping 28x28 grayscale images to a low-dimensional
latent space."""

from __future__ import annotations

import torch
from torch import nn

LATENT_DIM = 3
HIDDEN_WIDTH = 128


class EncoderNet(nn.Module):
    """Two 3x3 conv blocks (32 and 64 maps, stride 1, padding 1), each
    followed by 2x2 max pooling, then two dense layers down to the latent
    dimension. ReLU activations throughout."""

    def __init__(self, latent_dim: int = LATENT_DIM, hidden_width: int = HIDDEN_WIDTH):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(1, 32, kernel_size=3, stride=1, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Conv2d(32, 64, kernel_size=3, stride=1, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
        )
        self.head = nn.Sequential(
            nn.Flatten(),
            nn.Linear(64 * 7 * 7, hidden_width),
            nn.ReLU(),
            nn.Linear(hidden_width, latent_dim),
        )

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        if images.dim() == 3:  # (B, 28, 28) -> (B, 1, 28, 28)
            images = images.unsqueeze(1)
        return self.head(self.features(images))


def build_network(seed: int = 0, latent_dim: int = LATENT_DIM) -> EncoderNet:
    """Seeded construction: identical seeds give identical initial weights."""
    torch.manual_seed(seed)
    return EncoderNet(latent_dim=latent_dim)
