"""Printed text-line OCR with a single bidirectional LSTM layer and CTC."""

__version__ = "0.1.0"

from .blstm import BlstmModel, blstm_backward, blstm_forward, blstm_init
from .codec import (
    LabelAlphabet,
    decode_labels,
    default_alphabet,
    encode_text,
    load_alphabet,
    synthetic_alphabet,
)
from .ctc import beam_decode, collapse, ctc_brute_force, ctc_loss, greedy_decode
from .estimator import BlstmCtcRecognizer, ColumnFeatures, LineNormalizer
from .evaluation import min_edit_distance, score_corpus
from .modelio import load_model, save_model
from .preprocessing import extract_features, normalize_line, segment_lines
from .recognition import recognize_line
from .trainer import TrainConfig, train

__all__ = [
    "BlstmCtcRecognizer",
    "BlstmModel",
    "ColumnFeatures",
    "LabelAlphabet",
    "LineNormalizer",
    "TrainConfig",
    "beam_decode",
    "blstm_backward",
    "blstm_forward",
    "blstm_init",
    "collapse",
    "ctc_brute_force",
    "ctc_loss",
    "decode_labels",
    "default_alphabet",
    "encode_text",
    "extract_features",
    "greedy_decode",
    "load_alphabet",
    "load_model",
    "min_edit_distance",
    "normalize_line",
    "recognize_line",
    "save_model",
    "score_corpus",
    "segment_lines",
    "synthetic_alphabet",
    "train",
]
