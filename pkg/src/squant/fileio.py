"""Bit-exact file formats connecting the encoder, the quantizer, and
downstream analysis.

All binary payloads are little-endian regardless of host:

  embeddings  "SQEMB1" | u32 n | u64 I | u8 label flag | u32 class count |
              I*n f64 coordinates | [I i32 labels, -1 = unlabeled]
  codebook    "SQCBK1" | u32 K | u32 n | f64 rank | f64 norm order |
              u8 label flag | K*n f64 centers | [K i32 quant labels]
  trace       CSV text with header iteration,objective,step_size,
              updated_center; '.' decimal separator, LF terminators.

Plain-point text files carry one comma-separated point per row with an
optional trailing integer label column.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError, LabelRangeError, MagicMismatchError, TruncatedFileError
from .model import NO_LABEL, Codebook, ConvergenceTrace, FeatureSet

EMBEDDING_MAGIC = b"SQEMB1"
CODEBOOK_MAGIC = b"SQCBK1"

TRACE_HEADER = "iteration,objective,step_size,updated_center"


def _read_exact(raw: bytes, offset: int, size: int, what: str) -> bytes:
    if len(raw) < offset + size:
        raise TruncatedFileError(f"truncated {what}", offset, offset + size, len(raw))
    return raw[offset : offset + size]


def write_embeddings(
    path, points: np.ndarray, labels: np.ndarray = None, n_classes: int = 0
) -> None:
    """Write an embeddings file; labels may be None (flag cleared) or an int
    vector with -1 marking unlabeled records."""
    points = np.ascontiguousarray(points, dtype="<f8")
    count, dim = points.shape
    flag = 1 if labels is not None else 0
    header = EMBEDDING_MAGIC + struct.pack("<IQBI", dim, count, flag, n_classes)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(points.tobytes())
        if labels is not None:
            fh.write(np.ascontiguousarray(labels, dtype="<i4").tobytes())


def read_embeddings(path) -> FeatureSet:
    """Read an embeddings file into a uniformly weighted feature set."""
    raw = Path(path).read_bytes()
    magic = _read_exact(raw, 0, 6, "magic")
    if magic != EMBEDDING_MAGIC:
        raise MagicMismatchError(f"expected magic {EMBEDDING_MAGIC!r}, found {magic!r}", 0)
    dim, count, flag, n_classes = struct.unpack("<IQBI", _read_exact(raw, 6, 17, "header"))
    offset = 23
    body = _read_exact(raw, offset, count * dim * 8, "coordinate body")
    points = np.frombuffer(body, dtype="<f8").reshape(count, dim)
    offset += count * dim * 8
    labels = None
    if flag:
        body = _read_exact(raw, offset, count * 4, "label body")
        labels = np.frombuffer(body, dtype="<i4").astype(np.int64)
        bad = (labels != NO_LABEL) & ((labels < 0) | (labels >= n_classes))
        if bad.any():
            i = int(np.argmax(bad))
            raise LabelRangeError(
                f"label {labels[i]} at record {i} outside {{-1}} U [0, {n_classes})",
                offset + i * 4,
            )
        offset += count * 4
    if len(raw) != offset:
        raise FormatError(
            f"{len(raw) - offset} trailing bytes beyond the declared body", offset
        )
    return FeatureSet(points, labels=labels, n_classes=n_classes)


def write_feature_set(path, data: FeatureSet) -> None:
    write_embeddings(path, data.points, data.labels, data.n_classes)


def write_codebook(path, codebook: Codebook, quant_labels: np.ndarray = None) -> None:
    centers = np.ascontiguousarray(codebook.centers, dtype="<f8")
    flag = 1 if quant_labels is not None else 0
    header = CODEBOOK_MAGIC + struct.pack(
        "<IIddB", codebook.size, codebook.dim, codebook.rank, codebook.norm_order, flag
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(centers.tobytes())
        if quant_labels is not None:
            fh.write(np.ascontiguousarray(quant_labels, dtype="<i4").tobytes())


def read_codebook(path) -> tuple[Codebook, np.ndarray | None]:
    raw = Path(path).read_bytes()
    magic = _read_exact(raw, 0, 6, "magic")
    if magic != CODEBOOK_MAGIC:
        raise MagicMismatchError(f"expected magic {CODEBOOK_MAGIC!r}, found {magic!r}", 0)
    n_centers, dim, rank, norm_order, flag = struct.unpack(
        "<IIddB", _read_exact(raw, 6, 25, "header")
    )
    offset = 31
    body = _read_exact(raw, offset, n_centers * dim * 8, "center body")
    centers = np.frombuffer(body, dtype="<f8").reshape(n_centers, dim)
    offset += n_centers * dim * 8
    labels = None
    if flag:
        body = _read_exact(raw, offset, n_centers * 4, "quant label body")
        labels = np.frombuffer(body, dtype="<i4").astype(np.int64)
        offset += n_centers * 4
    if len(raw) != offset:
        raise FormatError(
            f"{len(raw) - offset} trailing bytes beyond the declared body", offset
        )
    return Codebook(centers, rank=rank, norm_order=norm_order), labels


def write_trace(path, trace: ConvergenceTrace) -> None:
    lines = [TRACE_HEADER]
    for i in range(len(trace)):
        lines.append(
            f"{int(trace.iterations[i])},{float(trace.objectives[i])!r},"
            f"{float(trace.step_sizes[i])!r},{int(trace.updated_centers[i])}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def read_trace(path) -> ConvergenceTrace:
    text = Path(path).read_text(encoding="ascii")
    lines = [line for line in text.split("\n") if line]
    if not lines or lines[0] != TRACE_HEADER:
        raise MagicMismatchError(f"expected trace header {TRACE_HEADER!r}", 0)
    iterations, objectives, steps, updated = [], [], [], []
    for line in lines[1:]:
        t, obj, step, k = line.split(",")
        iterations.append(int(t))
        objectives.append(float(obj))
        steps.append(float(step))
        updated.append(int(k))
    return ConvergenceTrace(
        np.array(iterations, dtype=np.int64),
        np.array(objectives),
        np.array(steps),
        np.array(updated, dtype=np.int64),
    )


def write_points(path, data: FeatureSet, labeled: bool = False) -> None:
    """Plain text export: one comma-separated point per row, optionally with a
    trailing label column (-1 where absent)."""
    lines = []
    for i in range(data.count):
        row = ",".join(repr(float(x)) for x in data.points[i])
        if labeled:
            label = int(data.labels[i]) if data.labels is not None else NO_LABEL
            row += f",{label}"
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def read_points(path, labeled: bool = False, n_classes: int = 0) -> FeatureSet:
    """Read the plain text format; with labeled=True the final column is an
    integer label."""
    try:
        text = Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError as err:
        raise FormatError(f"{path} is neither a known binary format nor text", 0) from err
    rows = [line for line in text.split("\n") if line.strip()]
    points, labels = [], []
    for lineno, row in enumerate(rows):
        cells = row.split(",")
        try:
            if labeled:
                points.append([float(c) for c in cells[:-1]])
                labels.append(int(cells[-1]))
            else:
                points.append([float(c) for c in cells])
        except ValueError as err:
            raise FormatError(f"unparseable point row {lineno}: {row[:40]!r}", 0) from err
    return FeatureSet(
        np.array(points),
        labels=np.array(labels, dtype=np.int64) if labeled else None,
        n_classes=n_classes,
    )
