"""Within-batch triplet selection.

For every anchor-positive pair the mined negative is the closest one that is
still farther from the anchor than the positive (which keeps it inside the
margin band whenever any candidate is); anchors whose positives have no such
negative fall back to the overall nearest negative so every pair stays
productive.
"""

from __future__ import annotations

import logging

import torch

log = logging.getLogger(__name__)


def mine_semi_hard(
    embeddings: torch.Tensor, labels: torch.Tensor, margin: float = 1.0
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Return (anchor, positive, negative) index tensors over the batch.

    Skips single-class batches (no negatives exist) with a logged warning and
    returns empty index tensors.
    """
    size = embeddings.shape[0]
    if labels.unique().numel() < 2:
        log.warning("single-class batch of %d samples: no triplets mined", size)
        empty = torch.empty(0, dtype=torch.long)
        return empty, empty, empty

    dists = torch.cdist(embeddings, embeddings)
    anchors, positives, negatives = [], [], []
    for i in range(size):
        same = (labels == labels[i]).nonzero(as_tuple=True)[0]
        other = (labels != labels[i]).nonzero(as_tuple=True)[0]
        if same.numel() < 2 or other.numel() == 0:
            continue
        negative_dists = dists[i, other]
        order = torch.argsort(negative_dists)
        sorted_dists = negative_dists[order]
        sorted_idx = other[order]
        for p in same:
            if p == i:
                continue
            threshold = dists[i, p]
            # first negative strictly beyond the positive distance
            slot = int(torch.searchsorted(sorted_dists, threshold, right=True))
            if slot < sorted_idx.numel():
                n = sorted_idx[slot]
            else:
                n = sorted_idx[0]  # fallback: hardest (nearest) negative
            anchors.append(i)
            positives.append(int(p))
            negatives.append(int(n))
    return (
        torch.tensor(anchors, dtype=torch.long),
        torch.tensor(positives, dtype=torch.long),
        torch.tensor(negatives, dtype=torch.long),
    )
