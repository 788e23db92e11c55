"""Command line: train on a labeled fraction of the IDX training split and
export train/test embedding files plus a training log."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .data import labeled_split, load_split
from .export import UNLABELED, export_embeddings
from .train import EncoderConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triplet-encoder", description=__doc__)
    parser.add_argument("--data-dir", required=True, help="directory holding the IDX files")
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--fraction", type=float, default=1.0,
                        help="labeled fraction of the training split")
    parser.add_argument("--epochs", type=int, default=50)
    parser.add_argument("--batch", type=int, default=1000)
    parser.add_argument("--rate", type=float, default=1e-3)
    parser.add_argument("--decay", type=float, default=1e-5)
    parser.add_argument("--margin", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "training-log.txt"
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(message)s",
        handlers=[logging.FileHandler(log_path), logging.StreamHandler(sys.stderr)],
    )

    started = time.monotonic()
    train_images, train_labels = load_split(args.data_dir, train=True)
    test_images, test_labels = load_split(args.data_dir, train=False)
    labeled = labeled_split(train_images.shape[0], args.fraction, args.seed)
    logging.info(
        "training on %d labeled of %d images (fraction %.2f)",
        len(labeled), train_images.shape[0], args.fraction,
    )

    config = EncoderConfig(
        fraction=args.fraction, epochs=args.epochs, batch_size=args.batch,
        rate=args.rate, decay=args.decay, margin=args.margin, seed=args.seed,
    )
    model, history = train(config, train_images[labeled], train_labels[labeled])

    # train export: labels kept only on the labeled fraction
    export_labels = np.full(train_images.shape[0], UNLABELED, dtype=np.int64)
    export_labels[labeled] = train_labels[labeled]
    n_classes = int(train_labels.max()) + 1
    export_embeddings(model, train_images, export_labels,
                      out_dir / "train.emb", n_classes=n_classes)
    export_embeddings(model, test_images, test_labels,
                      out_dir / "test.emb", n_classes=n_classes)
    logging.info(
        "exported %d train and %d test embeddings in %.1fs (final loss %.6f)",
        train_images.shape[0], test_images.shape[0],
        time.monotonic() - started, history[-1] if history else float("nan"),
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
