"""The five reference extractors and the per-paper dispatch.

Each tool is a deterministic rule over the normalized title/abstract only,
emitting native items with character spans and a confidence. Real models can
be swapped in behind the same result schema.
"""

from __future__ import annotations

import re
import time
from collections import Counter
from datetime import datetime, timezone

from ..corpus import Paper
from .config import DATASET_RELATION, DEFAULT_CUE_RULES, CueRule, ExtractorConfig
from .gazetteer import Match, match_ngrams
from .model import ExtractionResult, SchemaError, Tool, validate_items
from .text import split_sentences, tokenize

_WORD = re.compile(r"\w+(?:-\w+)*", re.UNICODE)

_DETERMINERS = {"the", "a", "an", "our", "this", "these", "those", "its", "their"}

_STOP_VERBS = {
    "is", "are", "was", "were", "be", "been", "being",
    "has", "have", "had", "can", "could", "will", "would",
    "may", "might", "must", "shall", "should", "do", "does", "did",
    "show", "shows", "showed", "achieve", "achieves", "achieved",
    "improve", "improves", "improved", "outperform", "outperforms",
    "provide", "provides", "provided", "demonstrate", "demonstrates",
    "enable", "enables", "enabled", "yield", "yields", "obtain", "obtains",
}

_CONJUNCTIONS = {
    "and", "or", "but", "which", "that", "where", "when",
    "while", "whereas", "because", "if", "as", "than",
}

_CAPTURE_STOP = _STOP_VERBS | _CONJUNCTIONS

# Tokens that terminate the backward walk of the dataset head-noun rule.
_DATASET_BOUNDARY = (
    _DETERMINERS
    | _CONJUNCTIONS
    | _STOP_VERBS
    | {"of", "on", "in", "for", "with", "from", "to", "via", "over", "using", "we"}
)

_SUMMARY_STOPWORDS = {
    "a", "an", "the", "and", "or", "but", "of", "in", "on", "for", "with",
    "to", "from", "by", "as", "at", "is", "are", "was", "were", "be", "been",
    "being", "we", "our", "this", "that", "these", "those", "it", "its",
    "their", "they", "i", "you", "he", "she", "his", "her", "them", "us",
    "which", "who", "what", "when", "where", "while", "can", "could", "will",
    "would", "may", "might", "must", "should", "do", "does", "did", "not",
    "no", "also", "such", "than", "then", "there", "here", "how", "into",
    "over", "under", "between", "both", "each", "more", "most", "other",
    "some", "any", "all",
}


def _group_matches(matches: list[Match]) -> list[tuple]:
    """Merge per-occurrence matches into one group per dictionary entry,
    ordered by first occurrence (title before abstract)."""
    ranked = sorted(matches, key=lambda m: (m.field != "title", m.start))
    groups: dict[tuple[str, str], list] = {}
    order: list[tuple[str, str]] = []
    for m in ranked:
        key = (m.entry.surface, m.entry.canonical_id)
        if key not in groups:
            groups[key] = [m.entry, m.confidence, []]
            order.append(key)
        groups[key][2].append([m.field, m.start, m.end])
    return [tuple(groups[key]) for key in order]


def extract_topics(paper: Paper, config: ExtractorConfig) -> list[dict]:
    dictionary = config.require_dictionary("topics")
    matches = match_ngrams(paper.title, dictionary, "title")
    matches += match_ngrams(paper.abstract, dictionary, "abstract")
    return [
        {"topic": entry.canonical_label, "confidence": confidence, "spans": spans}
        for entry, confidence, spans in _group_matches(matches)
    ]


def extract_entity_links(paper: Paper, config: ExtractorConfig) -> list[dict]:
    dictionary = config.require_dictionary("concepts")
    matches = match_ngrams(paper.title, dictionary, "title")
    matches += match_ngrams(paper.abstract, dictionary, "abstract")
    return [
        {
            "surface": entry.surface,
            "concept_id": entry.canonical_id,
            "concept_label": entry.canonical_label,
            "confidence": confidence,
            "spans": spans,
        }
        for entry, confidence, spans in _group_matches(matches)
    ]


def parse_title(title: str, type_vocabulary: tuple[str, ...]) -> list[dict]:
    """Mine "NAME: DESCRIPTION" titles: NAME (1-4 tokens) becomes the entity,
    typed by the first vocabulary keyword appearing in the description
    ("resource" with lower confidence when none does)."""
    colon = title.find(":")
    if colon <= 0:
        return []
    name = title[:colon].rstrip()
    description = title[colon + 1 :]
    if not name or not 1 <= len(tokenize(name)) <= 4:
        return []
    best: tuple[int, str] | None = None
    for keyword in type_vocabulary:
        m = re.search(rf"\b{re.escape(keyword)}\b", description, re.IGNORECASE)
        if m and (best is None or m.start() < best[0]):
            best = (m.start(), keyword)
    if best is not None:
        entity_type, confidence = best[1], 0.9
    else:
        entity_type, confidence = "resource", 0.5
    return [
        {
            "entity": name,
            "type": entity_type,
            "confidence": confidence,
            "spans": [["title", 0, len(name)]],
        }
    ]


def extract_title_ner(paper: Paper, config: ExtractorConfig) -> list[dict]:
    return parse_title(paper.title, config.title_type_vocabulary)


def _capture_phrase(text: str, pos: int, max_tokens: int = 6) -> tuple[int, int] | None:
    """Span of the noun phrase starting at ``pos``: up to ``max_tokens`` word
    tokens, stopping at punctuation, stop verbs, or conjunctions; leading
    determiners are skipped."""
    n = len(text)
    i = pos
    taken: list[tuple[int, int]] = []
    leading = True
    while len(taken) < max_tokens and i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        m = _WORD.match(text, i)
        if m is None:
            break  # punctuation terminates the phrase
        word = m.group(0).lower()
        if leading and word in _DETERMINERS:
            i = m.end()
            continue
        if word in _CAPTURE_STOP:
            break
        leading = False
        taken.append((m.start(), m.end()))
        i = m.end()
    if not taken:
        return None
    return taken[0][0], taken[-1][1]


def _dataset_mentions(text: str) -> list[tuple[int, int]]:
    """Entity spans for the dataset head-noun rule: the contiguous modifier
    tokens right before "dataset(s)"."""
    tokens = tokenize(text)
    spans = []
    for idx, token in enumerate(tokens):
        if token.text.lower() not in ("dataset", "datasets"):
            continue
        picked: list[tuple[int, int]] = []
        j = idx - 1
        nxt_start = token.start
        while j >= 0 and len(picked) < 3:
            prev = tokens[j]
            gap = text[prev.end : nxt_start]
            if gap.strip():  # punctuation between tokens ends the phrase
                break
            if prev.text.lower() in _DATASET_BOUNDARY:
                break
            picked.append((prev.start, prev.end))
            nxt_start = prev.start
            j -= 1
        if picked:
            spans.append((picked[-1][0], picked[0][1]))
    return spans


def annotate_abstract(
    abstract: str,
    cue_rules: tuple[CueRule, ...] = DEFAULT_CUE_RULES,
    dataset_rule: bool = True,
) -> list[dict]:
    """Cue-phrase annotator: each cue match yields the following noun phrase
    as an entity typed with the rule's verb relation."""
    found: list[tuple[int, int, int, int, str]] = []  # (start, rule_rank, end, _, relation)
    for rank, rule in enumerate(cue_rules):
        for cue in rule.cues:
            pattern = re.compile(rf"\b{re.escape(cue)}\b", re.IGNORECASE)
            for m in pattern.finditer(abstract):
                phrase = _capture_phrase(abstract, m.end())
                if phrase is None:
                    continue
                found.append((phrase[0], rank, phrase[1], m.start(), rule.relation))
    if dataset_rule:
        rank = len(cue_rules)
        for start, end in _dataset_mentions(abstract):
            found.append((start, rank, end, start, DATASET_RELATION))
    found.sort(key=lambda f: (f[0], f[1], f[2]))
    items = []
    seen = set()
    for start, _rank, end, _cue_start, relation in found:
        key = (start, end, relation)
        if key in seen:  # two cues of one rule can capture the same phrase
            continue
        seen.add(key)
        items.append(
            {
                "entity": abstract[start:end],
                "type": relation,
                "confidence": 0.7,
                "spans": [["abstract", start, end]],
            }
        )
    return items


def extract_abstract_ner(paper: Paper, config: ExtractorConfig) -> list[dict]:
    return annotate_abstract(paper.abstract, config.cue_rules, config.dataset_rule)


def summarize(abstract: str, k: int) -> dict:
    """Extractive summary: sentence 0 plus the k-1 highest term-frequency
    sentences, ties to the earlier sentence, emitted in original order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sentences = split_sentences(abstract)
    if not sentences:
        return {"summary_text": "", "sentence_indices": [], "confidence": 0.0}

    def content_words(span: tuple[int, int]) -> list[str]:
        return [
            t.text.lower()
            for t in tokenize(abstract[span[0] : span[1]])
            if t.text.replace("-", "").isalpha()
            and t.text.lower() not in _SUMMARY_STOPWORDS
        ]

    tf = Counter(w for span in sentences for w in content_words(span))
    scores = [sum(tf[w] for w in content_words(span)) for span in sentences]
    rest = sorted(range(1, len(sentences)), key=lambda i: (-scores[i], i))
    chosen = sorted([0] + rest[: k - 1])
    text = " ".join(abstract[s:e] for s, e in (sentences[i] for i in chosen))
    return {
        "summary_text": text,
        "sentence_indices": chosen,
        "confidence": k / max(k, len(sentences)),
    }


def extract_summary(paper: Paper, config: ExtractorConfig) -> list[dict]:
    return [summarize(paper.abstract, config.summary_sentences)]


_DISPATCH = {
    Tool.TOPICS: extract_topics,
    Tool.ENTITY_LINKS: extract_entity_links,
    Tool.ABSTRACT_NER: extract_abstract_ner,
    Tool.TITLE_NER: extract_title_ner,
    Tool.SUMMARY: extract_summary,
}

_CONTAINS_CHECK = {Tool.TOPICS, Tool.ENTITY_LINKS, Tool.TITLE_NER}


def _check_span_bounds(tool: Tool, items: list[dict], paper: Paper) -> None:
    lengths = {"title": len(paper.title), "abstract": len(paper.abstract)}
    for i, item in enumerate(items):
        for k, (fld, start, end) in enumerate(item.get("spans", [])):
            if end > lengths[fld]:
                raise SchemaError(
                    f"items[{i}].spans[{k}]", f"end {end} beyond {fld} length {lengths[fld]}"
                )


def now_utc_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def run_extractor(
    tool: Tool | str,
    paper: Paper,
    config: ExtractorConfig,
    run_id: str = "adhoc",
    produced_at: str | None = None,
) -> ExtractionResult:
    """Run one tool over one paper, timing it and validating the output."""
    try:
        tool = Tool(tool)
    except ValueError:
        raise ValueError(f"unknown tool {tool!r}; expected one of {[t.value for t in Tool]}")
    t0 = time.perf_counter()
    items = _DISPATCH[tool](paper, config)
    duration = time.perf_counter() - t0
    validate_items(tool, items)
    _check_span_bounds(tool, items, paper)
    return ExtractionResult(
        result_id=f"{tool.value}:{run_id}:{paper.paper_id}",
        paper_id=paper.paper_id,
        tool=tool,
        run_id=run_id,
        produced_at=produced_at or now_utc_iso(),
        duration_seconds=duration,
        items=items,
    )
