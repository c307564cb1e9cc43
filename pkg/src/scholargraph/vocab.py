"""Namespace table and predicate vocabulary.

The IRIs here are a wire contract: exports, statement ids, and the HTTP API
all depend on them byte-for-byte. The same table ships as machine-readable
package data (``data/vocabulary.json``); a unit test keeps the two in sync.
"""

from __future__ import annotations

import json
from importlib import resources

BASE = "http://tinygenius.local/resource/"
VOCAB = "http://tinygenius.local/vocab#"
DCTERMS = "http://purl.org/dc/terms/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

DCTERMS_TITLE = DCTERMS + "title"
DCTERMS_ABSTRACT = DCTERMS + "abstract"

# Classes
TG_PAPER_CLASS = VOCAB + "Paper"

# Paper metadata predicates
TG_YEAR = VOCAB + "year"
TG_SOURCE = VOCAB + "source"
TG_CATEGORY = VOCAB + "category"

# Content-statement predicates
TG_HAS_TOPIC = VOCAB + "hasTopic"
TG_SAME_AS_CONCEPT = VOCAB + "sameAsConcept"
TG_PRESENTS_ENTITY = VOCAB + "presentsEntity"
TG_ENTITY_TYPE = VOCAB + "entityType"
TG_SUMMARY = VOCAB + "summary"

# Provenance annotation predicates
TG_EXTRACTED_BY = VOCAB + "extractedBy"
TG_RUN = VOCAB + "run"
TG_CONFIDENCE = VOCAB + "confidence"
TG_SPAN = VOCAB + "span"
TG_EXTRACTED_AT = VOCAB + "extractedAt"
TG_PAPER = VOCAB + "paper"

# Slot-value annotation predicates (carry the exact strings microtask
# questions substitute; resource IRI slugs are lossy on case)
TG_TOPIC_LABEL = VOCAB + "topicLabel"
TG_SURFACE_FORM = VOCAB + "surfaceForm"
TG_CONCEPT_LABEL = VOCAB + "conceptLabel"
TG_ENTITY_LABEL = VOCAB + "entityLabel"
TG_TYPE_LABEL = VOCAB + "typeLabel"
TG_SENTENCE_INDICES = VOCAB + "sentenceIndices"

# Curation annotation predicates
TG_VOTE = VOCAB + "vote"
TG_SCORE = VOCAB + "score"

# Predicates whose statements count as paper metadata; everything else in
# the graph is extraction-origin. Membership decides Statement.origin.
METADATA_PREDICATES = frozenset(
    {
        RDF_TYPE,
        DCTERMS_TITLE,
        DCTERMS_ABSTRACT,
        TG_YEAR,
        TG_SOURCE,
        TG_CATEGORY,
    }
)


def namespaces() -> dict:
    return {
        "base": BASE,
        "vocab": VOCAB,
        "dcterms": DCTERMS,
        "rdf-type": RDF_TYPE,
    }


def vocabulary_table() -> dict:
    """The full predicate/class table as plain data."""
    return {
        "namespaces": namespaces(),
        "classes": {"Paper": TG_PAPER_CLASS},
        "metadata_predicates": {
            "type": RDF_TYPE,
            "title": DCTERMS_TITLE,
            "abstract": DCTERMS_ABSTRACT,
            "year": TG_YEAR,
            "source": TG_SOURCE,
            "category": TG_CATEGORY,
        },
        "content_predicates": {
            "hasTopic": TG_HAS_TOPIC,
            "sameAsConcept": TG_SAME_AS_CONCEPT,
            "presentsEntity": TG_PRESENTS_ENTITY,
            "entityType": TG_ENTITY_TYPE,
            "summary": TG_SUMMARY,
        },
        "provenance_predicates": {
            "extractedBy": TG_EXTRACTED_BY,
            "run": TG_RUN,
            "confidence": TG_CONFIDENCE,
            "span": TG_SPAN,
            "extractedAt": TG_EXTRACTED_AT,
            "paper": TG_PAPER,
            "topicLabel": TG_TOPIC_LABEL,
            "surfaceForm": TG_SURFACE_FORM,
            "conceptLabel": TG_CONCEPT_LABEL,
            "entityLabel": TG_ENTITY_LABEL,
            "typeLabel": TG_TYPE_LABEL,
            "sentenceIndices": TG_SENTENCE_INDICES,
            "vote": TG_VOTE,
            "score": TG_SCORE,
        },
    }


def shipped_vocabulary() -> dict:
    """The vocabulary file bundled as package data."""
    with resources.files("scholargraph.data").joinpath("vocabulary.json").open(
        "r", encoding="utf-8"
    ) as fh:
        return json.load(fh)
