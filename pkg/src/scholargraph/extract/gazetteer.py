"""Dictionary-driven n-gram matching with longest-match-first resolution."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .text import tokenize


@dataclass(frozen=True)
class DictEntry:
    surface: str
    canonical_id: str
    canonical_label: str


@dataclass
class Dictionary:
    """A gazetteer: surface forms mapped to canonical ids and labels.

    ``max_ngram`` caps how many text tokens a single match may consume.
    Surfaces longer than the cap match by their first ``max_ngram`` tokens
    with proportionally reduced confidence; within the cap matches are exact
    and carry confidence 1.0.
    """

    name: str
    entries: list[DictEntry] = field(default_factory=list)
    max_ngram: int = 1

    def __post_init__(self) -> None:
        seen: set[tuple[str, str]] = set()
        for entry in self.entries:
            if not entry.surface.strip():
                raise ValueError(f"dictionary {self.name}: empty surface form")
            key = (entry.surface, entry.canonical_id)
            if key in seen:
                raise ValueError(f"dictionary {self.name}: duplicate entry {key}")
            seen.add(key)
        if self.max_ngram < 1:
            raise ValueError("max_ngram must be >= 1")


def load_dictionary(path: Path, name: str | None = None, max_ngram: int | None = None) -> Dictionary:
    """Load a TSV dictionary (surface TAB id TAB label, one entry per line).

    Blank lines and ``#`` comments are skipped. ``max_ngram`` defaults to the
    longest surface form in tokens.
    """
    entries: list[DictEntry] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected 3 tab-separated fields")
            entries.append(DictEntry(parts[0].strip(), parts[1].strip(), parts[2].strip()))
    if max_ngram is None:
        max_ngram = max((len(tokenize(e.surface)) for e in entries), default=1) or 1
    return Dictionary(name or Path(path).stem, entries, max_ngram)


class Match(NamedTuple):
    entry: DictEntry
    field: str
    start: int  # char offset
    end: int
    ngram_len: int
    confidence: float


def _candidates(text: str, dictionary: Dictionary, field_name: str) -> list[tuple]:
    tokens = tokenize(text)
    lowered = [t.text.lower() for t in tokens]
    lower_text = text.lower()
    out = []
    for order, entry in enumerate(dictionary.entries):
        ent_tokens = [t.text.lower() for t in tokenize(entry.surface)]
        needed = min(len(ent_tokens), dictionary.max_ngram)
        if needed == 0:
            continue
        prefix = ent_tokens[:needed]
        joined = " ".join(prefix)
        confidence = needed / max(1, len(ent_tokens))
        for i in range(len(tokens) - needed + 1):
            if lowered[i : i + needed] != prefix:
                continue
            start = tokens[i].start
            end = tokens[i + needed - 1].end
            # tokens must be adjacent on whitespace only, so the span text
            # contains the matched form verbatim
            if joined not in lower_text[start:end]:
                continue
            out.append((needed, start, order, end, entry, confidence, i))
    return out


def match_ngrams(text: str, dictionary: Dictionary, field_name: str) -> list[Match]:
    """All non-overlapping dictionary matches in ``text``.

    Overlaps are resolved longest-match-first, then leftmost, then by
    dictionary order; losers are dropped. Offsets are into ``text`` and
    reported under ``field_name``.
    """
    candidates = _candidates(text, dictionary, field_name)
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    claimed: list[tuple[int, int]] = []
    accepted: list[Match] = []
    for needed, start, _order, end, entry, confidence, tok_i in candidates:
        span = (tok_i, tok_i + needed)
        if any(span[0] < hi and lo < span[1] for lo, hi in claimed):
            continue
        claimed.append(span)
        accepted.append(Match(entry, field_name, start, end, needed, confidence))
    accepted.sort(key=lambda m: m.start)
    return accepted
