"""Character and word accuracy from minimum edit distance.

    CA = (1 - sum of character MEDs / total reference characters) * 100
    WA = (1 - sum of word MEDs / total reference words) * 100

Characters are Unicode codepoints; words are runs of non-whitespace.
Accuracies are not clamped and go negative when hypotheses are much longer
than references.
"""

import csv
import io
from dataclasses import dataclass, field

from .exceptions import UndefinedMetricError


def min_edit_distance(a, b):
    """Levenshtein distance with unit costs over any two sequences."""
    a, b = list(a), list(b)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def words(text):
    return text.split()


@dataclass
class LineScore:
    id: str
    char_med: int
    word_med: int
    chars: int
    words: int


@dataclass
class EvalReport:
    total_chars: int
    char_med_sum: int
    total_words: int
    word_med_sum: int
    per_line: list = field(default_factory=list)

    @property
    def ca_percent(self):
        return (1.0 - self.char_med_sum / self.total_chars) * 100.0

    @property
    def wa_percent(self):
        return (1.0 - self.word_med_sum / self.total_words) * 100.0

    def summary(self):
        return (
            f"lines          {len(self.per_line)}\n"
            f"characters     {self.total_chars}  (MED sum {self.char_med_sum})\n"
            f"words          {self.total_words}  (MED sum {self.word_med_sum})\n"
            f"CA             {self.ca_percent:.2f}%\n"
            f"WA             {self.wa_percent:.2f}%\n"
        )

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["line_id", "char_med", "ref_chars", "word_med", "ref_words"])
        for s in self.per_line:
            writer.writerow([s.id, s.char_med, s.chars, s.word_med, s.words])
        writer.writerow(["TOTAL", self.char_med_sum, self.total_chars,
                         self.word_med_sum, self.total_words])
        writer.writerow(["CA_percent", f"{self.ca_percent:.4f}", "", "", ""])
        writer.writerow(["WA_percent", f"{self.wa_percent:.4f}", "", "", ""])
        return buf.getvalue()


def score_corpus(pairs, ids=None):
    """Score ``(hypothesis, reference)`` pairs, one pair per line."""
    pairs = list(pairs)
    ids = list(ids) if ids is not None else [str(k) for k in range(len(pairs))]
    per_line = []
    for line_id, (hyp, ref) in zip(ids, pairs):
        per_line.append(
            LineScore(
                line_id,
                min_edit_distance(hyp, ref),
                min_edit_distance(words(hyp), words(ref)),
                len(ref),
                len(words(ref)),
            )
        )
    total_chars = sum(s.chars for s in per_line)
    total_words = sum(s.words for s in per_line)
    if total_chars == 0 or total_words == 0:
        raise UndefinedMetricError("references contain no characters or no words")
    return EvalReport(
        total_chars,
        sum(s.char_med for s in per_line),
        total_words,
        sum(s.word_med for s in per_line),
        per_line,
    )
