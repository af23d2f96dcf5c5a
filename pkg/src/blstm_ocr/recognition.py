"""End-to-end recognition of a single text-line image."""

from .blstm import blstm_forward
from .codec import decode_labels
from .ctc import beam_search
from .exceptions import RejectedInputError
from .preprocessing import LINE_HEIGHT, check_gray_image, extract_features, normalize_line, normalized_width

DEFAULT_BEAM = 10


def line_logits(model, line):
    line = check_gray_image(line, "line")
    if model.input_size != LINE_HEIGHT:
        raise RejectedInputError(
            f"model expects {model.input_size}-value frames, lines give {LINE_HEIGHT}"
        )
    if normalized_width(*line.shape) < 1:
        raise RejectedInputError(
            f"line of shape {line.shape} is narrower than one pixel after normalization"
        )
    logits, _ = blstm_forward(model, extract_features(normalize_line(line)))
    return logits


def recognize_line(model, alphabet, line, beam_width=DEFAULT_BEAM):
    """normalize -> column features -> BLSTM -> CTC beam search -> text."""
    logits = line_logits(model, line)
    best = beam_search(logits, alphabet.blank_index, beam_width)[0][0]
    return decode_labels(alphabet, best)


def decision_margin(model, alphabet, line, beam_width=DEFAULT_BEAM):
    """Log-probability gap between the best and runner-up beam hypotheses."""
    hyps = beam_search(line_logits(model, line), alphabet.blank_index, beam_width)
    if len(hyps) < 2:
        return float("inf")
    return hyps[0][1] - hyps[1][1]
