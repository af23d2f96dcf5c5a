"""Text <-> CTC class index mapping at the Unicode codepoint level.

Every scalar codepoint is one class, so a conjunct such as KA + HASANT + TA
is three labels and no glyph-shaping rules are needed.  Text is never
normalized or reordered.

Manifest format (UTF-8): one entry per line, either the literal character
or ``U+XXXX``; anything after the entry token is ignored.  Lines starting
with ``#`` are comments, except ``#! key: value`` lines which carry the
alphabet name and version.  Class index = position among entry lines.  The
blank is implicit and takes the final index.
"""

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .exceptions import ManifestError, RejectedInputError, UnsupportedSymbolError

DEFAULT_SIZE = 165
DEFAULT_MANIFEST = "bengali_english.txt"
SYNTHETIC_MANIFEST = "synthetic_20.txt"


@dataclass(frozen=True)
class LabelAlphabet:
    symbols: tuple
    name: str = ""
    version: int = 1
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        index = {}
        for k, s in enumerate(self.symbols):
            if len(s) != 1:
                raise ManifestError(f"entry {k} is not a single codepoint: {s!r}")
            if s in index:
                raise ManifestError(f"duplicate codepoint U+{ord(s):04X} at index {k}")
            index[s] = k
        object.__setattr__(self, "_index", index)

    @property
    def blank_index(self):
        return len(self.symbols)

    @property
    def num_classes(self):
        return len(self.symbols) + 1

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, ch):
        return ch in self._index

    def index(self, ch):
        return self._index[ch]


def _parse_entry(token, lineno):
    if token.upper().startswith("U+") and len(token) > 2:
        try:
            cp = int(token[2:], 16)
            return chr(cp)
        except ValueError as exc:
            raise ManifestError(f"line {lineno}: bad escape {token!r}") from exc
    if len(token) != 1:
        raise ManifestError(f"line {lineno}: entry {token!r} is not one codepoint")
    return token


def parse_alphabet(text, strict_count=True, expected_size=DEFAULT_SIZE):
    """Build a :class:`LabelAlphabet` from manifest text.

    With ``strict_count`` the manifest must list exactly ``expected_size``
    symbols; desk-scale synthetic alphabets pass ``strict_count=False``.
    """
    symbols = []
    meta = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#!"):
            key, _, value = line[2:].partition(":")
            meta[key.strip()] = value.strip()
            continue
        if line.startswith("#"):
            continue
        symbols.append(_parse_entry(line.split()[0], lineno))
    if strict_count and len(symbols) != expected_size:
        raise ManifestError(
            f"manifest lists {len(symbols)} symbols, expected {expected_size}"
        )
    if not symbols:
        raise ManifestError("manifest lists no symbols")
    try:
        version = int(meta.get("version", 1))
    except ValueError as exc:
        raise ManifestError(f"bad version {meta['version']!r}") from exc
    return LabelAlphabet(tuple(symbols), meta.get("name", ""), version)


def load_alphabet(source, strict_count=True):
    """Load a manifest from a path (or pass manifest text via ``parse_alphabet``)."""
    return parse_alphabet(Path(source).read_text(encoding="utf-8"), strict_count)


def default_alphabet():
    text = resources.files("blstm_ocr.data").joinpath(DEFAULT_MANIFEST).read_text("utf-8")
    return parse_alphabet(text)


def synthetic_alphabet():
    text = resources.files("blstm_ocr.data").joinpath(SYNTHETIC_MANIFEST).read_text("utf-8")
    return parse_alphabet(text, strict_count=False)


def format_alphabet(alphabet):
    """Canonical manifest text; every entry written as ``U+XXXX``."""
    lines = [f"#! name: {alphabet.name}", f"#! version: {alphabet.version}"]
    lines += [f"U+{ord(s):04X}" for s in alphabet.symbols]
    return "\n".join(lines) + "\n"


def save_alphabet(alphabet, path):
    Path(path).write_text(format_alphabet(alphabet), encoding="utf-8")


def encode_text(alphabet, text):
    """One class index per codepoint, in the original order."""
    out = []
    for offset, ch in enumerate(text):
        k = alphabet._index.get(ch)
        if k is None:
            raise UnsupportedSymbolError(ord(ch), offset)
        out.append(k)
    return out


def decode_labels(alphabet, labels):
    chars = []
    n = len(alphabet.symbols)
    for k in labels:
        k = int(k)
        if not 0 <= k < n:
            kind = "blank" if k == n else "out-of-range"
            raise RejectedInputError(f"{kind} label {k} cannot be decoded")
        chars.append(alphabet.symbols[k])
    return "".join(chars)
