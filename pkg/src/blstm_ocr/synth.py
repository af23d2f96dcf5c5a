"""Deterministic synthetic text lines and pages with exact ground truth.

Glyphs are procedural binary masks (seeded random strokes on a coarse
grid), one per codepoint, so no font files or rasterizer are involved.
Whitespace symbols get no glyph, only horizontal advance.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import GenerationError, RejectedInputError, UnsupportedSymbolError
from .numeric import make_rng
from .preprocessing import LineBox

GLYPH_HEIGHT = 32
INK, PAPER = 0, 255


@dataclass
class GlyphAtlas:
    glyphs: dict  # codepoint -> bool mask (GLYPH_HEIGHT, width)
    space_width: int = 10
    gap: int = 2
    margin: int = 4

    def advance(self, ch):
        if ch in self.glyphs:
            return self.glyphs[ch].shape[1]
        if ch.isspace():
            return self.space_width
        raise KeyError(ch)

    def supports(self, ch):
        return ch in self.glyphs or ch.isspace()


@dataclass
class Degradation:
    """Noise sigma on the 0-255 scale, relative scale range, baseline jitter in px."""

    noise_sigma: float = 0.0
    scale_range: float = 0.0
    baseline_jitter: int = 0

    def __post_init__(self):
        if not 0 <= self.noise_sigma <= 20:
            raise RejectedInputError("noise_sigma must lie in [0, 20]")
        if not 0 <= self.scale_range <= 0.25:
            raise RejectedInputError("scale_range must lie in [0, 0.25]")
        if not 0 <= self.baseline_jitter <= 2:
            raise RejectedInputError("baseline_jitter must lie in [0, 2]")

    @classmethod
    def parse(cls, text):
        """Parse ``"noise=10,scale=0.1,jitter=2"`` (or ``"none"``)."""
        if not text or text == "none":
            return cls()
        keys = {"noise": "noise_sigma", "scale": "scale_range", "jitter": "baseline_jitter"}
        kwargs = {}
        for part in text.split(","):
            key, _, value = part.partition("=")
            if key.strip() not in keys:
                raise RejectedInputError(f"unknown degradation {key!r}")
            name = keys[key.strip()]
            try:
                kwargs[name] = int(value) if name == "baseline_jitter" else float(value)
            except ValueError:
                raise RejectedInputError(f"bad value {value!r} for {key.strip()}") from None
        return cls(**kwargs)

    @property
    def is_clean(self):
        return self.noise_sigma == 0 and self.scale_range == 0 and self.baseline_jitter == 0


@dataclass
class LineRecord:
    image: np.ndarray
    truth: str
    id: str
    degradation: Degradation = field(default_factory=Degradation)


@dataclass
class PageRecord:
    image: np.ndarray
    boxes: list  # true LineBox per line, ink extent
    truths: list
    id: str


@dataclass
class Corpus:
    train: list
    val: list
    test: list
    pages: list = field(default_factory=list)


def _random_glyph(rng, height, min_width, max_width):
    width = int(rng.integers(min_width, max_width + 1))
    rows = 6  # coarse cells of 4 px over the glyph body, rows 4..28
    cells = rng.random((rows, width)) < 0.45
    # every column carries ink so a glyph never looks like inter-glyph space
    for col in np.flatnonzero(~cells.any(axis=0)):
        cells[rng.integers(rows), col] = True
    mask = np.zeros((height, width), dtype=bool)
    body = np.repeat(cells, 4, axis=0)
    mask[4 : 4 + body.shape[0]] = body
    return mask


def mask_difference(a, b):
    """Fraction of differing pixels after left-aligning to a common width."""
    width = max(a.shape[1], b.shape[1])
    pa = np.zeros((a.shape[0], width), dtype=bool)
    pb = np.zeros((b.shape[0], width), dtype=bool)
    pa[:, : a.shape[1]] = a
    pb[:, : b.shape[1]] = b
    return float(np.mean(pa != pb))


def build_glyph_atlas(alphabet, style_seed=0, min_width=5, max_width=8, min_difference=0.10,
                      max_retries=100):
    """One random mask per non-space symbol; any two differ in >= 10% of pixels."""
    rng = make_rng(style_seed)
    glyphs = {}
    for ch in alphabet.symbols:
        if ch.isspace():
            continue
        for _ in range(max_retries):
            mask = _random_glyph(rng, GLYPH_HEIGHT, min_width, max_width)
            if all(mask_difference(mask, other) >= min_difference for other in glyphs.values()):
                glyphs[ch] = mask
                break
        else:
            raise GenerationError(
                f"no distinguishable glyph for U+{ord(ch):04X} after {max_retries} tries"
            )
    return GlyphAtlas(glyphs)


def _check_text(atlas, text):
    for offset, ch in enumerate(text):
        if not atlas.supports(ch):
            raise UnsupportedSymbolError(ord(ch), offset)


def line_width(atlas, text):
    """Canvas width of a clean render: glyph advances, gaps and both margins."""
    if not text:
        return 2 * atlas.margin
    return sum(atlas.advance(ch) for ch in text) + atlas.gap * (len(text) - 1) + 2 * atlas.margin


def _resize_nearest(image, height, width):
    rows = np.minimum((np.arange(height) * image.shape[0] / height).astype(int), image.shape[0] - 1)
    cols = np.minimum((np.arange(width) * image.shape[1] / width).astype(int), image.shape[1] - 1)
    return image[rows][:, cols]


def add_noise(image, sigma, rng):
    noisy = image.astype(np.float64) + rng.normal(0.0, sigma, size=image.shape)
    return np.clip(np.rint(noisy), 0, 255).astype(np.uint8)


def render_line(atlas, text, degrade=None, seed=0, id=""):
    """Composite glyphs left to right and apply the requested degradations."""
    _check_text(atlas, text)
    degrade = degrade or Degradation()
    rng = make_rng(seed)
    m = atlas.margin
    height = GLYPH_HEIGHT + 2 * m
    image = np.full((height, line_width(atlas, text)), PAPER, dtype=np.uint8)
    x = m
    for k, ch in enumerate(text):
        if k:
            x += atlas.gap
        mask = atlas.glyphs.get(ch)
        if mask is not None:
            dy = 0
            if degrade.baseline_jitter:
                dy = int(rng.integers(-degrade.baseline_jitter, degrade.baseline_jitter + 1))
            region = image[m + dy : m + dy + GLYPH_HEIGHT, x : x + mask.shape[1]]
            region[mask] = INK
        x += atlas.advance(ch)
    if degrade.scale_range:
        s = 1.0 + rng.uniform(-degrade.scale_range, degrade.scale_range)
        image = _resize_nearest(
            image, max(1, round(height * s)), max(1, round(image.shape[1] * s))
        )
    if degrade.noise_sigma:
        image = add_noise(image, degrade.noise_sigma, rng)
    return LineRecord(image, text, id, degrade)


def make_word_list(alphabet, n_words=200, seed=0, min_len=2, max_len=6):
    """Distinct random words over the non-space symbols of ``alphabet``."""
    letters = [ch for ch in alphabet.symbols if not ch.isspace()]
    if not letters:
        raise RejectedInputError("alphabet has no printable symbols")
    rng = make_rng(seed)
    words, seen = [], set()
    attempts = 0
    while len(words) < n_words and attempts < 100 * n_words:
        attempts += 1
        n = int(rng.integers(min_len, max_len + 1))
        w = "".join(letters[int(k)] for k in rng.integers(0, len(letters), n))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def random_text(words, rng, min_words=3, max_words=8):
    n = int(rng.integers(min_words, max_words + 1))
    return " ".join(words[int(k)] for k in rng.integers(0, len(words), n))


def compose_page(atlas, texts, degrade=None, seed=0, id="", margin=20, min_gap=12, max_gap=24):
    """Stack clean line renders on a page; returns a :class:`PageRecord`.

    Only page-level noise from ``degrade`` is applied; box geometry is exact.
    """
    degrade = degrade or Degradation()
    rng = make_rng(seed)
    lines = [render_line(atlas, t, Degradation(), seed=0).image for t in texts]
    width = max(line.shape[1] for line in lines) + 2 * margin
    gaps = [int(rng.integers(min_gap, max_gap + 1)) for _ in lines[1:]]
    height = sum(line.shape[0] for line in lines) + sum(gaps) + 2 * margin
    page = np.full((height, width), PAPER, dtype=np.uint8)
    boxes = []
    y = margin
    for k, line in enumerate(lines):
        indent = int(rng.integers(0, width - 2 * margin - line.shape[1] + 1))
        x = margin + indent
        page[y : y + line.shape[0], x : x + line.shape[1]] = line
        ink = line < 128
        rows = np.flatnonzero(ink.any(axis=1))
        cols = np.flatnonzero(ink.any(axis=0))
        boxes.append(LineBox(y + int(rows[0]), y + int(rows[-1]) + 1,
                             x + int(cols[0]), x + int(cols[-1]) + 1))
        y += line.shape[0] + (gaps[k] if k < len(gaps) else 0)
    if degrade.noise_sigma:
        page = add_noise(page, degrade.noise_sigma, rng)
    return PageRecord(page, boxes, list(texts), id)


def generate_corpus(atlas, words, seed, counts, degrade=None, pages=0, lines_per_page=(2, 10)):
    """Train/val/test line sets (plus optional page fixtures), fully seeded.

    Each record gets its own derived seed, so regeneration is bit-identical.
    Splits are disjoint by construction: ids carry the split name.
    """
    if not words:
        raise RejectedInputError("word list is empty")
    if len(counts) != 3 or min(counts) < 1:
        raise RejectedInputError("counts must be three positive integers")
    for w in words:
        _check_text(atlas, w)
    rng = make_rng(seed)
    splits = []
    for name, count in zip(("train", "val", "test"), counts):
        records = []
        for k in range(int(count)):
            text = random_text(words, rng)
            line_seed = int(rng.integers(2**63))
            records.append(render_line(atlas, text, degrade, line_seed, id=f"{name}-{k:05d}"))
        splits.append(records)
    page_records = []
    for k in range(int(pages)):
        n = int(rng.integers(lines_per_page[0], lines_per_page[1] + 1))
        texts = [random_text(words, rng) for _ in range(n)]
        page_seed = int(rng.integers(2**63))
        page_records.append(compose_page(atlas, texts, degrade, page_seed, id=f"page-{k:04d}"))
    return Corpus(*splits, pages=page_records)
