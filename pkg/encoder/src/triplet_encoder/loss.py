"""Triplet margin loss on Euclidean embedding distances."""

from __future__ import annotations

import torch


def triplet_loss(
    anchor: torch.Tensor,
    positive: torch.Tensor,
    negative: torch.Tensor,
    margin: float = 1.0,
) -> torch.Tensor:
    """max(0, d(a, p) - d(a, n) + margin) per triplet.

    Zero whenever the negative sits at least `margin` farther from the anchor
    than the positive. Accepts single embeddings or batches.
    """
    d_pos = torch.linalg.vector_norm(anchor - positive, dim=-1)
    d_neg = torch.linalg.vector_norm(anchor - negative, dim=-1)
    return torch.clamp(d_pos - d_neg + margin, min=0.0)
