"""Semantification: Paper metadata and native extraction results -> statements
plus statement-level provenance annotations.

Statement identity is content-addressed over (s, p, o), so the same fact
found by several tools or runs collapses to one statement carrying every
tool's provenance. Slot values used by microtask questions (entity labels,
concept labels, topic labels) ride along as annotations because resource IRI
slugs are lossy on case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional
from urllib.parse import quote

from . import vocab
from .corpus import Paper
from .docstore import DocStore
from .extract.model import ExtractionResult, Tool
from .terms import Literal, Term, statement_id, term_key, term_to_ntriples

ORIGIN_METADATA = "metadata"
ORIGIN_EXTRACTION = "extraction"

_KIND_SEGMENTS = {
    "paper": "paper/",
    "topic": "topic/",
    "concept": "concept/",
    "entity": "entity/",
    "statement-resource": "statement/",
}


class MintError(ValueError):
    pass


def mint_iri(kind: str, key: str) -> str:
    """Deterministic IRI minting: lowercase, spaces to hyphens, percent-encode.

    ``predicate`` keys mint into the vocabulary namespace; resource kinds mint
    under their segment of the base namespace.
    """
    if kind != "predicate" and kind not in _KIND_SEGMENTS:
        raise MintError(f"unknown IRI kind {kind!r}")
    if not key:
        raise MintError("key must be nonempty")
    encoded = quote(key.lower().replace(" ", "-"), safe="")
    if not encoded:
        raise MintError(f"key {key!r} encodes to empty")
    if kind == "predicate":
        return vocab.VOCAB + encoded
    return vocab.BASE + _KIND_SEGMENTS[kind] + encoded


def origin_of(predicate: str) -> str:
    return ORIGIN_METADATA if predicate in vocab.METADATA_PREDICATES else ORIGIN_EXTRACTION


@dataclass(frozen=True)
class Statement:
    statement_id: str
    subject: str
    predicate: str
    object: Term
    origin: str

    def sort_key(self) -> tuple:
        return (
            term_to_ntriples(self.subject),
            term_to_ntriples(self.predicate),
            term_to_ntriples(self.object),
        )


@dataclass(frozen=True)
class Annotation:
    target: str  # statement_id
    predicate: str
    object: Term

    def sort_key(self) -> tuple:
        return (self.target, self.predicate, term_key(self.object))


def make_statement(subject: str, predicate: str, obj: Term) -> Statement:
    return Statement(statement_id(subject, predicate, obj), subject, predicate, obj, origin_of(predicate))


def paper_to_triples(paper: Paper) -> list[Statement]:
    """Metadata statements for one paper: type, title, abstract (when
    nonempty), year, source, one category triple per code."""
    iri = mint_iri("paper", paper.paper_id)
    out = [
        make_statement(iri, vocab.RDF_TYPE, vocab.TG_PAPER_CLASS),
        make_statement(iri, vocab.DCTERMS_TITLE, Literal(paper.title)),
    ]
    if paper.abstract:
        out.append(make_statement(iri, vocab.DCTERMS_ABSTRACT, Literal(paper.abstract)))
    out.append(make_statement(iri, vocab.TG_YEAR, Literal(paper.year, "integer")))
    out.append(make_statement(iri, vocab.TG_SOURCE, Literal(paper.source)))
    for category in paper.categories:
        out.append(make_statement(iri, vocab.TG_CATEGORY, Literal(category)))
    return out


class RejectedItem(Exception):
    pass


def _item_statements(tool: Tool, item: dict, paper_iri: str) -> list[tuple[Statement, list]]:
    """Content statement(s) for one item with its tool-specific slot-label
    annotations; returns [] for items that produce nothing (empty summary)."""
    if tool is Tool.TOPICS:
        st = make_statement(paper_iri, vocab.TG_HAS_TOPIC, mint_iri("topic", item["topic"]))
        return [(st, [(vocab.TG_TOPIC_LABEL, Literal(item["topic"]))])]
    if tool is Tool.ENTITY_LINKS:
        st = make_statement(
            mint_iri("entity", item["surface"]),
            vocab.TG_SAME_AS_CONCEPT,
            mint_iri("concept", item["concept_id"]),
        )
        labels = [
            (vocab.TG_SURFACE_FORM, Literal(item["surface"])),
            (vocab.TG_CONCEPT_LABEL, Literal(item["concept_label"])),
        ]
        return [(st, labels)]
    if tool is Tool.ABSTRACT_NER:
        st = make_statement(
            paper_iri,
            mint_iri("predicate", item["type"]),
            mint_iri("entity", item["entity"]),
        )
        return [(st, [(vocab.TG_ENTITY_LABEL, Literal(item["entity"]))])]
    if tool is Tool.TITLE_NER:
        entity_iri = mint_iri("entity", item["entity"])
        labels = [
            (vocab.TG_ENTITY_LABEL, Literal(item["entity"])),
            (vocab.TG_TYPE_LABEL, Literal(item["type"])),
        ]
        main = make_statement(paper_iri, vocab.TG_PRESENTS_ENTITY, entity_iri)
        companion = make_statement(entity_iri, vocab.TG_ENTITY_TYPE, Literal(item["type"]))
        return [(main, labels), (companion, labels)]
    if tool is Tool.SUMMARY:
        if not item["summary_text"]:
            return []
        st = make_statement(paper_iri, vocab.TG_SUMMARY, Literal(item["summary_text"]))
        indices = ",".join(str(i) for i in item["sentence_indices"])
        return [(st, [(vocab.TG_SENTENCE_INDICES, Literal(indices))])]
    raise ValueError(f"unknown tool {tool!r}")


def result_to_triples(
    result: ExtractionResult,
    paper: Optional[Paper] = None,
    rejected: Optional[list] = None,
) -> tuple[list[Statement], list[Annotation]]:
    """Statements and provenance annotations for one result.

    When ``paper`` is given, items whose spans fall outside the field bounds
    are dropped and reported into ``rejected`` as (result_id, index, reason).
    Duplicate (s, p, o) within the result collapse to one statement carrying
    every item's annotations.
    """
    paper_iri = mint_iri("paper", result.paper_id)
    lengths = None
    if paper is not None:
        lengths = {"title": len(paper.title), "abstract": len(paper.abstract)}
    statements: dict[str, Statement] = {}
    annotations: dict[tuple, Annotation] = {}

    def attach(ann: Annotation) -> None:
        annotations.setdefault(ann.sort_key(), ann)

    for index, item in enumerate(result.items):
        if lengths is not None:
            bad = [
                (fld, start, end)
                for fld, start, end in item.get("spans", [])
                if end > lengths[fld]
            ]
            if bad:
                if rejected is not None:
                    rejected.append(
                        (result.result_id, index, f"span {bad[0]} outside {bad[0][0]} bounds")
                    )
                continue
        for st, labels in _item_statements(result.tool, item, paper_iri):
            statements.setdefault(st.statement_id, st)
            sid = st.statement_id
            attach(Annotation(sid, vocab.TG_EXTRACTED_BY, Literal(result.tool.value)))
            attach(Annotation(sid, vocab.TG_RUN, Literal(result.run_id)))
            attach(Annotation(sid, vocab.TG_CONFIDENCE, Literal(float(item["confidence"]), "real")))
            for fld, start, end in item.get("spans", []):
                attach(Annotation(sid, vocab.TG_SPAN, Literal(f"{fld}:{start}-{end}")))
            attach(Annotation(sid, vocab.TG_EXTRACTED_AT, Literal(result.produced_at)))
            attach(Annotation(sid, vocab.TG_PAPER, paper_iri))
            for predicate, obj in labels:
                attach(Annotation(sid, predicate, obj))

    ordered = sorted(statements.values(), key=Statement.sort_key)
    return ordered, [annotations[k] for k in sorted(annotations)]


def semantify_corpus(
    papers: Iterable[Paper],
    store: Optional[DocStore] = None,
    rejected: Optional[list] = None,
) -> tuple[list[Statement], list[Annotation]]:
    """Full semantification: metadata triples for every paper plus content
    statements for every stored result, globally deduplicated and sorted.

    Output depends only on the papers and the docstore contents, so two runs
    over the same store are byte-identical.
    """
    papers = list(papers)
    by_id: Mapping[str, Paper] = {p.paper_id: p for p in papers}
    statements: dict[str, Statement] = {}
    annotations: dict[tuple, Annotation] = {}
    for paper in papers:
        for st in paper_to_triples(paper):
            statements.setdefault(st.statement_id, st)
    if store is not None:
        for result in store.iter_results():
            sts, anns = result_to_triples(result, by_id.get(result.paper_id), rejected)
            for st in sts:
                statements.setdefault(st.statement_id, st)
            for ann in anns:
                annotations.setdefault(ann.sort_key(), ann)
    ordered = sorted(statements.values(), key=Statement.sort_key)
    return ordered, [annotations[k] for k in sorted(annotations)]
