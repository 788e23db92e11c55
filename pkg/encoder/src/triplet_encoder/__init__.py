"""Triplet-loss CNN encoder producing low-dimensional embeddings for
downstream quantization and classification."""

from .data import labeled_split, load_idx_images, load_idx_labels, load_split
from .export import embed_images, export_embeddings, write_embedding_file
from .loss import triplet_loss
from .mining import mine_semi_hard
from .net import LATENT_DIM, EncoderNet, build_network
from .train import EncoderConfig, train

__version__ = "0.1.0"
