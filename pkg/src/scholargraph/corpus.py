"""Corpus ingestion: newline-delimited metadata records -> normalized Paper rows.

Only titles and abstracts are carried; records are validated line by line and
bad lines are collected as RecordError instead of aborting the load.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Union

YEAR_MIN = 1900
YEAR_MAX = 2100

_WS_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class Paper:
    paper_id: str
    title: str
    abstract: str
    categories: tuple[str, ...]
    year: int
    source: str = "corpus"


@dataclass(frozen=True)
class RecordError:
    line_no: int  # 1-based
    reason: str


class CorpusError(Exception):
    """Fatal corpus problem (unreadable stream)."""


def normalize_text(raw: str) -> str:
    """Canonicalize text: drop non-whitespace control chars, NFC, collapse
    whitespace runs to single spaces, strip. Idempotent by construction
    (controls are removed before NFC so no new compositions appear later).
    """
    kept = []
    for ch in raw:
        if unicodedata.category(ch) in ("Cc", "Cf") and not ch.isspace():
            continue
        kept.append(ch)
    text = unicodedata.normalize("NFC", "".join(kept))
    return _WS_RUN.sub(" ", text).strip()


def _parse_record(obj: object) -> tuple[str, str, str, tuple[str, ...], int]:
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    for name in ("id", "title", "abstract", "categories", "year"):
        if name not in obj:
            raise ValueError(f"missing field {name}")
    paper_id = obj["id"]
    if not isinstance(paper_id, str) or not paper_id.strip():
        raise ValueError("field id must be nonempty text")
    title = obj["title"]
    if not isinstance(title, str):
        raise ValueError("field title must be text")
    title = normalize_text(title)
    if not title:
        raise ValueError("title empty after normalization")
    abstract = obj["abstract"]
    if not isinstance(abstract, str):
        raise ValueError("field abstract must be text")
    categories = obj["categories"]
    if not isinstance(categories, list) or not all(isinstance(c, str) for c in categories):
        raise ValueError("field categories must be an array of text")
    year = obj["year"]
    if isinstance(year, bool) or not isinstance(year, int):
        raise ValueError("field year must be an integer")
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise ValueError(f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")
    return paper_id.strip(), title, normalize_text(abstract), tuple(categories), year


def parse_corpus(
    stream: Union[BinaryIO, Iterable[bytes]], source: str = "corpus"
) -> tuple[list[Paper], list[RecordError]]:
    """Parse a byte stream of newline-delimited JSON records.

    Well-formed records become Papers in input order; malformed ones become
    RecordErrors carrying the 1-based line number. Blank lines are skipped.
    A duplicate paper id within the load rejects the later record.
    """
    papers: list[Paper] = []
    errors: list[RecordError] = []
    seen_ids: set[str] = set()
    try:
        lines = iter(stream)
    except TypeError as exc:  # pragma: no cover - defensive
        raise CorpusError(f"unreadable corpus stream: {exc}") from exc

    line_no = 0
    while True:
        try:
            raw = next(lines, None)
        except OSError as exc:
            raise CorpusError(f"unreadable corpus stream: {exc}") from exc
        if raw is None:
            break
        line_no += 1
        if not raw.strip():
            continue
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            errors.append(RecordError(line_no, f"invalid UTF-8 at byte offset {exc.start}"))
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            errors.append(RecordError(line_no, f"invalid JSON: {exc.msg}"))
            continue
        try:
            paper_id, title, abstract, categories, year = _parse_record(obj)
        except ValueError as exc:
            errors.append(RecordError(line_no, str(exc)))
            continue
        if paper_id in seen_ids:
            errors.append(RecordError(line_no, f"duplicate paper id {paper_id}"))
            continue
        seen_ids.add(paper_id)
        papers.append(Paper(paper_id, title, abstract, categories, year, source))
    return papers, errors


def filter_by_category(papers: list[Paper], category: str) -> list[Paper]:
    """Papers whose categories contain ``category`` (exact code), stable order."""
    if not category:
        raise ValueError("category must be nonempty")
    return [p for p in papers if category in p.categories]


def write_papers(papers: Iterable[Paper], path) -> None:
    """Persist normalized papers as one JSON record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in papers:
            record = {
                "id": p.paper_id,
                "title": p.title,
                "abstract": p.abstract,
                "categories": list(p.categories),
                "year": p.year,
                "source": p.source,
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_papers(path) -> list[Paper]:
    """Load papers written by :func:`write_papers` (already normalized)."""
    papers = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            papers.append(
                Paper(
                    paper_id=record["id"],
                    title=record["title"],
                    abstract=record["abstract"],
                    categories=tuple(record["categories"]),
                    year=record["year"],
                    source=record.get("source", "corpus"),
                )
            )
    return papers
