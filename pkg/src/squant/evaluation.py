"""Turning a trained codebook into a nearest-center classifier and scoring it,
plus the distance-contrast diagnostic for high-dimensional data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidConfigError, UndefinedContrastError
from .model import Codebook, FeatureSet
from .objective import assign, distance_matrix

UNASSIGNED = -1


@dataclass(frozen=True)
class EvaluationReport:
    """Classifier quality against labeled data.

    confusion[t, p] counts points of true class t predicted as p; per-class
    precision/recall/F1 follow, and weighted_f1 is the support-weighted sum.
    """

    quant_labels: np.ndarray
    confusion: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    weighted_f1: float
    macro_f1: float
    micro_f1: float


def label_quants(codebook: Codebook, data: FeatureSet) -> np.ndarray:
    """Majority label of the labeled points assigned to each quant.

    Quants with no labeled points come back UNASSIGNED; label ties break to
    the lowest class id.
    """
    mask = data.labeled_mask()
    if not mask.any():
        raise InvalidConfigError("labeling quants requires at least one labeled point")
    idx = assign(data, codebook).nearest_index
    labels = np.full(codebook.size, UNASSIGNED, dtype=np.int64)
    for k in range(codebook.size):
        members = np.flatnonzero((idx == k) & mask)
        if members.size == 0:
            continue
        votes = np.bincount(data.labels[members], minlength=data.n_classes)
        labels[k] = int(votes.argmax())  # argmax takes the lowest id on ties
    return labels


def classify(point: np.ndarray, codebook: Codebook, quant_labels: np.ndarray) -> int:
    """Label of the nearest assigned quant; unassigned quants are skipped."""
    return int(classify_batch(np.asarray(point)[None, :], codebook, quant_labels)[0])


def classify_batch(points: np.ndarray, codebook: Codebook, quant_labels: np.ndarray) -> np.ndarray:
    quant_labels = np.asarray(quant_labels, dtype=np.int64)
    live = np.flatnonzero(quant_labels != UNASSIGNED)
    if live.size == 0:
        raise InvalidConfigError("classification requires at least one assigned quant")
    dists = distance_matrix(points, codebook.centers[live], codebook.norm_order)
    return quant_labels[live[dists.argmin(axis=1)]]


def weighted_f1(predictions: np.ndarray, truths: np.ndarray, n_classes: int) -> float:
    """Support-weighted mean of per-class F1 scores."""
    return _f1_scores(predictions, truths, n_classes)[3]


def _f1_scores(predictions, truths, n_classes):
    predictions = np.asarray(predictions, dtype=np.int64)
    truths = np.asarray(truths, dtype=np.int64)
    if predictions.shape != truths.shape:
        raise DimensionMismatchError(
            f"predictions {predictions.shape} and truths {truths.shape} differ in length"
        )
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (truths, predictions), 1)
    tp = np.diag(confusion).astype(np.float64)
    predicted = confusion.sum(axis=0).astype(np.float64)
    support = confusion.sum(axis=1).astype(np.float64)
    precision = np.divide(tp, predicted, out=np.zeros(n_classes), where=predicted > 0)
    recall = np.divide(tp, support, out=np.zeros(n_classes), where=support > 0)
    pr = precision + recall
    f1 = np.divide(2 * precision * recall, pr, out=np.zeros(n_classes), where=pr > 0)
    weighted = float((support / support.sum()) @ f1)
    macro = float(f1.mean())
    micro = float(tp.sum() / support.sum())
    return confusion, precision, recall, weighted, macro, micro, f1, support


def evaluate(codebook: Codebook, data: FeatureSet, quant_labels: np.ndarray = None) -> EvaluationReport:
    """Score the codebook as a classifier on labeled data.

    quant_labels defaults to majority labeling against the same data; pass the
    training-derived labels to avoid leaking evaluation labels into the
    classifier.
    """
    if quant_labels is None:
        quant_labels = label_quants(codebook, data)
    mask = data.labeled_mask()
    if not mask.any():
        raise InvalidConfigError("evaluation requires labeled points")
    truths = data.labels[mask]
    predictions = classify_batch(data.points[mask], codebook, quant_labels)
    confusion, precision, recall, weighted, macro, micro, f1, support = _f1_scores(
        predictions, truths, data.n_classes
    )
    return EvaluationReport(
        quant_labels=np.asarray(quant_labels, dtype=np.int64),
        confusion=confusion,
        precision=precision,
        recall=recall,
        f1=f1,
        support=support.astype(np.int64),
        weighted_f1=weighted,
        macro_f1=macro,
        micro_f1=micro,
    )


def contrast_ratio(data: FeatureSet, codebook: Codebook) -> float:
    """(max - min) / min over all point-to-center distances.

    Shrinks toward zero as dimensionality washes out distance contrast;
    undefined when a point coincides with a center.
    """
    dists = distance_matrix(data.points, codebook.centers, codebook.norm_order)
    lo = float(dists.min())
    if lo == 0.0:
        i, k = np.unravel_index(dists.argmin(), dists.shape)
        raise UndefinedContrastError(f"point {i} coincides with center {k}")
    return float((dists.max() - lo) / lo)
