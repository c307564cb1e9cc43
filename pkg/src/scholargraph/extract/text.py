"""Tokenization and sentence segmentation over normalized text."""

from __future__ import annotations

import re
from typing import NamedTuple

# Hyphenated compounds ("self-supervised", "CIFAR-10") are single tokens.
_WORD = re.compile(r"\w+(?:-\w+)*", re.UNICODE)

# Trailing-period abbreviations that never end a sentence.
ABBREVIATIONS = ("e.g.", "i.e.", "et al.", "fig.", "vs.")


class Token(NamedTuple):
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    """Word tokens with character offsets."""
    return [Token(m.group(0), m.start(), m.end()) for m in _WORD.finditer(text)]


def _ends_with_abbreviation(text: str, dot_index: int) -> bool:
    for abbr in ABBREVIATIONS:
        start = dot_index + 1 - len(abbr)
        if start < 0:
            continue
        if text[start : dot_index + 1].lower() != abbr:
            continue
        if start == 0 or not text[start - 1].isalnum():
            return True
    return False


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Sentence spans partitioning ``text`` minus inter-sentence whitespace.

    A boundary is ``.``, ``!`` or ``?`` followed by whitespace and an
    uppercase letter (or end of text); the known abbreviations do not split.
    """
    n = len(text)
    spans: list[tuple[int, int]] = []
    start = 0
    while start < n and text[start].isspace():
        start += 1
    i = start
    while i < n:
        ch = text[i]
        if ch in ".!?":
            j = i + 1
            if j < n and text[j].isspace():
                k = j
                while k < n and text[k].isspace():
                    k += 1
                if k < n and text[k].isupper():
                    if not (ch == "." and _ends_with_abbreviation(text, i)):
                        spans.append((start, i + 1))
                        start = k
                        i = k
                        continue
        i += 1
    end = n
    while end > start and text[end - 1].isspace():
        end -= 1
    if end > start:
        spans.append((start, end))
    return spans
