"""Page-to-line segmentation, height normalization and column features."""

from dataclasses import dataclass

import numpy as np

from .exceptions import RejectedInputError

LINE_HEIGHT = 48


@dataclass(frozen=True)
class LineBox:
    """Half-open pixel rectangle ``[top, bottom) x [left, right)`` on the page."""

    top: int
    bottom: int
    left: int
    right: int

    def crop(self, page):
        return page[self.top : self.bottom, self.left : self.right]

    @property
    def height(self):
        return self.bottom - self.top


@dataclass
class SegmentationConfig:
    strips: int = 4
    valley_frac: float = 0.02  # row is a valley if ink < this fraction of strip width
    min_votes: int = 1  # strips that must mark a row as text
    min_height_frac: float = 0.25
    min_density: float = 0.005
    split_frac: float = 1.8
    merge_gap_frac: float = 0.15
    thin_frac: float = 0.5  # bands below this fraction of the median count as thin
    min_contrast: float = 64.0  # Otsu class means closer than this => blank page

    def __post_init__(self):
        if self.strips < 1 or self.min_votes < 1 or self.min_votes > self.strips:
            raise RejectedInputError(
                f"need 1 <= min_votes <= strips, got strips={self.strips}, min_votes={self.min_votes}"
            )
        if self.split_frac <= 1.0:
            raise RejectedInputError("split_frac must exceed 1")


def check_gray_image(image, name="image"):
    image = np.asarray(image)
    if image.ndim != 2:
        raise RejectedInputError(
            f"{name} must be a 2-D grayscale array, got shape {image.shape}"
        )
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise RejectedInputError(f"{name} must be non-empty, got shape {image.shape}")
    if image.dtype != np.uint8:
        if np.issubdtype(image.dtype, np.floating) or image.min() < 0 or image.max() > 255:
            raise RejectedInputError(f"{name} must hold 8-bit intensities")
        image = image.astype(np.uint8)
    return image


def otsu_threshold(image):
    """Return ``(threshold, contrast)``; pixels ``<= threshold`` are ink.

    ``contrast`` is the distance between the two class means, 0 for a
    constant image.
    """
    hist = np.bincount(np.asarray(image, dtype=np.uint8).ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)
    m0 = np.cumsum(hist * levels)
    w1 = total - w0
    mean_all = m0[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = m0 / w0
        mu1 = (mean_all - m0) / w1
        between = w0 * w1 * (mu0 - mu1) ** 2
    between[~np.isfinite(between)] = -1.0
    t = int(np.argmax(between))
    if between[t] <= 0:
        return t, 0.0
    return t, float(mu1[t] - mu0[t])


def _runs(mask):
    """Maximal runs of True as half-open (start, stop) pairs."""
    padded = np.concatenate([[False], np.asarray(mask, dtype=bool), [False]])
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def _candidate_bands(ink, cfg):
    height, width = ink.shape
    n = max(1, min(int(cfg.strips), width))
    bounds = np.linspace(0, width, n + 1).round().astype(int)
    votes = np.zeros(height, dtype=int)
    for a, b in zip(bounds[:-1], bounds[1:]):
        profile = ink[:, a:b].sum(axis=1)
        text = profile >= max(1.0, cfg.valley_frac * (b - a))
        for top, bottom in _runs(text):
            votes[top:bottom] += 1
    return _runs(votes >= cfg.min_votes)


def _split_band(top, bottom, profile, limit):
    """Recursively cut a tall band at its internal profile minimum."""
    h = bottom - top
    if h <= limit or h < 4:
        return [(top, bottom)]
    lo, hi = top + h // 4, bottom - h // 4
    cut = lo + int(np.argmin(profile[lo:hi]))
    if cut <= top or cut >= bottom:
        return [(top, bottom)]
    return _split_band(top, cut, profile, limit) + _split_band(cut, bottom, profile, limit)


def segment_lines(page, config=None):
    """Find text lines on a deskewed page, top to bottom.

    Phase one marks, per vertical strip, rows whose ink count falls below a
    small fraction of the strip width as valleys; rows that enough strips
    consider text form page-wide candidate bands.  Phase two merges thin
    over-split fragments, drops specks and rules, and cuts bands that are
    much taller than the median at their profile minimum.
    """
    cfg = config or SegmentationConfig()
    page = check_gray_image(page, "page")
    thr, contrast = otsu_threshold(page)
    if contrast < cfg.min_contrast:
        return []
    ink = page <= thr
    bands = _candidate_bands(ink, cfg)
    if not bands:
        return []
    profile = ink.sum(axis=1)

    median = float(np.median([b - a for a, b in bands]))
    merged = [list(bands[0])]
    for top, bottom in bands[1:]:
        prev = merged[-1]
        gap = top - prev[1]
        thin = min(prev[1] - prev[0], bottom - top) < cfg.thin_frac * median
        if gap < cfg.merge_gap_frac * median and thin:
            prev[1] = bottom
        else:
            merged.append([top, bottom])

    kept = []
    for top, bottom in merged:
        if bottom - top < cfg.min_height_frac * median:
            continue
        cols = np.flatnonzero(ink[top:bottom].any(axis=0))
        if cols.size == 0:
            continue
        area = (bottom - top) * (cols[-1] + 1 - cols[0])
        if ink[top:bottom, cols[0] : cols[-1] + 1].sum() < cfg.min_density * area:
            continue
        kept.append((top, bottom))

    boxes = []
    for top, bottom in kept:
        for a, b in _split_band(top, bottom, profile, cfg.split_frac * median):
            rows = np.flatnonzero(profile[a:b])
            if rows.size == 0:
                continue
            a, b = a + int(rows[0]), a + int(rows[-1]) + 1
            cols = np.flatnonzero(ink[a:b].any(axis=0))
            boxes.append(LineBox(a, b, int(cols[0]), int(cols[-1]) + 1))
    return sorted(boxes, key=lambda box: box.top)


def normalized_width(height, width, target=LINE_HEIGHT):
    return int(np.floor(width * target / height + 0.5))


def _bilinear_axis(n_in, n_out):
    scale = n_in / n_out
    pos = (np.arange(n_out) + 0.5) * scale - 0.5
    pos = np.clip(pos, 0, n_in - 1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, pos - lo


def resize_bilinear(image, height, width):
    img = np.asarray(image, dtype=np.float64)
    r0, r1, fr = _bilinear_axis(img.shape[0], height)
    c0, c1, fc = _bilinear_axis(img.shape[1], width)
    rows = img[r0] * (1 - fr)[:, None] + img[r1] * fr[:, None]
    out = rows[:, c0] * (1 - fc) + rows[:, c1] * fc
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def normalize_line(line, height=LINE_HEIGHT):
    """Bilinear rescale to ``height`` rows keeping the aspect ratio."""
    line = check_gray_image(line, "line")
    h, w = line.shape
    if h == height:
        return line.copy()
    return resize_bilinear(line, height, max(1, normalized_width(h, w, height)))


def extract_features(line):
    """One frame per column: ``(255 - gray) / 255`` so ink reads close to 1."""
    line = check_gray_image(line, "line")
    if line.shape[0] != LINE_HEIGHT:
        raise RejectedInputError(
            f"line must be {LINE_HEIGHT} pixels tall, got {line.shape[0]}; normalize it first"
        )
    return (255.0 - line.T.astype(np.float64)) / 255.0


def line_features(line):
    """normalize_line followed by extract_features."""
    return extract_features(normalize_line(line))
