"""Batch-size-one CTC training with classic momentum and early stopping."""

import csv
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .blstm import BlstmModel, blstm_backward, blstm_forward, blstm_init
from .codec import encode_text
from .ctc import ctc_loss, min_frames
from .exceptions import OcrError, RejectedInputError
from .numeric import make_rng
from .preprocessing import LINE_HEIGHT, line_features

log = logging.getLogger(__name__)

REPORT_FIELDS = ("epoch", "train_ctc_loss", "val_error", "wall_time_s")


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    momentum: float = 0.9
    max_epochs: int = 80
    loss_delta_stop: float = 0.01
    val_delta_stop: float = 0.1
    hidden_size: int = 128
    seed: int = 0
    shuffle: bool = True
    grad_clip: Optional[float] = None

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise RejectedInputError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise RejectedInputError("momentum must lie in [0, 1)")
        if int(self.max_epochs) < 1:
            raise RejectedInputError("max_epochs must be >= 1")
        if int(self.hidden_size) < 1:
            raise RejectedInputError("hidden_size must be >= 1")
        if self.grad_clip is not None and not self.grad_clip > 0:
            raise RejectedInputError("grad_clip must be positive when set")


@dataclass
class EpochReport:
    epoch: int
    train_ctc_loss: float
    val_error: float
    wall_time: float = 0.0


@dataclass
class Example:
    id: str
    features: np.ndarray
    labels: list


@dataclass
class LineIssue:
    id: str
    reason: str


class TrainResult(NamedTuple):
    model: BlstmModel
    reports: list
    best_epoch: int
    issues: list = []


def momentum_step(model, velocity, grads, lr, mu):
    """``v <- mu * v + g``; ``theta <- theta - lr * v``, applied in place.

    Returns ``(model, velocity)`` for convenience.
    """
    params, vels, gs = model.arrays(), velocity.arrays(), grads.arrays()
    if len(params) != len(vels) or len(params) != len(gs):
        raise RejectedInputError("model, velocity and gradients differ in structure")
    for p, v, g in zip(params, vels, gs):
        if p.shape != v.shape or p.shape != g.shape:
            raise RejectedInputError(f"shape mismatch {p.shape}, {v.shape}, {g.shape}")
    for p, v, g in zip(params, vels, gs):
        v *= mu
        v += g
        p -= lr * v
    return model, velocity


def global_norm(grads):
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.arrays())))


def clip_gradients(grads, max_norm):
    norm = global_norm(grads)
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.arrays():
            g *= scale
    return grads


def should_stop(prev, curr, cfg):
    """Both the training loss and the validation error have settled."""
    return (
        abs(curr.train_ctc_loss - prev.train_ctc_loss) <= cfg.loss_delta_stop
        and abs(curr.val_error - prev.val_error) <= cfg.val_delta_stop
    )


def prepare_examples(records, alphabet):
    """Features and labels for each record; unusable lines become issues."""
    examples, issues = [], []
    for rec in records:
        try:
            labels = encode_text(alphabet, rec.truth)
            feats = line_features(rec.image)
        except OcrError as exc:
            issues.append(LineIssue(rec.id, str(exc)))
            log.warning("skipping %s: %s", rec.id, exc)
            continue
        if feats.shape[0] < max(1, min_frames(labels)):
            msg = f"{feats.shape[0]} frames cannot carry {len(labels)} labels"
            issues.append(LineIssue(rec.id, msg))
            log.warning("skipping %s: %s", rec.id, msg)
            continue
        examples.append(Example(rec.id, feats, labels))
    return examples, issues


def line_gradient(model, example, blank):
    logits, tapes = blstm_forward(model, example.features)
    result = ctc_loss(logits, example.labels, blank)
    return result.loss, blstm_backward(model, tapes, result.grad_logits)


def line_loss(model, example, blank):
    logits, _ = blstm_forward(model, example.features)
    return ctc_loss(logits, example.labels, blank).loss


def evaluate_loss(model, examples, blank):
    """Summed CTC loss, reduced in list order."""
    total = 0.0
    for ex in examples:
        total += line_loss(model, ex, blank)
    return total


def train(train_set, val_set, alphabet, cfg=None, model=None, on_epoch=None):
    """Train a BLSTM-CTC recognizer one line at a time.

    ``train_set`` and ``val_set`` hold records with ``image``, ``truth`` and
    ``id``.  After every epoch the summed training loss (accumulated before
    each update) and the summed validation loss are reported; training stops
    when both deltas fall under the configured thresholds or at
    ``max_epochs``.  The returned model is the snapshot from the epoch with
    the lowest validation loss (earliest on ties; training loss when there
    is no validation data).
    """
    cfg = cfg or TrainConfig()
    train_ex, issues = prepare_examples(train_set, alphabet)
    val_ex, val_issues = prepare_examples(val_set, alphabet)
    issues += val_issues
    if not train_ex:
        raise RejectedInputError("training set is empty (after skipping unusable lines)")
    blank = alphabet.blank_index
    if model is None:
        model = blstm_init(LINE_HEIGHT, cfg.hidden_size, alphabet.num_classes, cfg.seed)
    elif model.num_classes != alphabet.num_classes:
        raise RejectedInputError("model output size does not match the alphabet")
    velocity = model.zeros_like()
    order_rng = make_rng([cfg.seed, 1])

    reports = []
    best, best_model = None, model.copy()
    for epoch in range(1, int(cfg.max_epochs) + 1):
        start = time.perf_counter()
        order = order_rng.permutation(len(train_ex)) if cfg.shuffle else range(len(train_ex))
        train_loss = 0.0
        for k in order:
            loss, grads = line_gradient(model, train_ex[k], blank)
            if cfg.grad_clip is not None:
                clip_gradients(grads, cfg.grad_clip)
            momentum_step(model, velocity, grads, cfg.learning_rate, cfg.momentum)
            train_loss += loss
        val_error = evaluate_loss(model, val_ex, blank)
        report = EpochReport(epoch, train_loss, val_error, time.perf_counter() - start)
        reports.append(report)
        log.info("epoch %d: train %.4f val %.4f (%.1fs)", epoch, train_loss, val_error,
                 report.wall_time)
        if on_epoch is not None:
            on_epoch(report)
        score = val_error if val_ex else train_loss
        if best is None or score < best[0]:
            best = (score, epoch)
            best_model = model.copy()
        if len(reports) > 1 and should_stop(reports[-2], report, cfg):
            break
    return TrainResult(best_model, reports, best[1], issues)


def append_report(path, report):
    """Append one epoch row, writing the header first if the file is new."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if new:
            writer.writerow(REPORT_FIELDS)
        writer.writerow([report.epoch, repr(report.train_ctc_loss), repr(report.val_error),
                         f"{report.wall_time:.3f}"])


def read_reports(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            EpochReport(int(r["epoch"]), float(r["train_ctc_loss"]), float(r["val_error"]),
                        float(r["wall_time_s"]))
            for r in csv.DictReader(fh)
        ]
