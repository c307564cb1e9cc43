"""scholargraph: scholarly knowledge-graph construction with statement-level
provenance and microtask vote curation."""

__version__ = "0.1.0"

from .corpus import Paper, RecordError, filter_by_category, normalize_text, parse_corpus
from .curation import (
    CurationService,
    MicrotaskCard,
    SimConfig,
    SimReport,
    Snippet,
    Vote,
    VoteTally,
    context_snippet,
    is_hidden,
    render_question,
    score,
    simulate,
)
from .docstore import DocStore, RunInfo
from .extract import ExtractionResult, ExtractorConfig, Tool, run_extractor
from .graphstore import Graph, StatsReport, from_ntstar, papers_from_graph, stats, to_ntstar
from .semantify import Annotation, Statement, mint_iri, paper_to_triples, result_to_triples
from .terms import Literal

__all__ = [
    "Annotation",
    "CurationService",
    "DocStore",
    "ExtractionResult",
    "ExtractorConfig",
    "Graph",
    "Literal",
    "MicrotaskCard",
    "Paper",
    "RecordError",
    "RunInfo",
    "SimConfig",
    "SimReport",
    "Snippet",
    "Statement",
    "StatsReport",
    "Tool",
    "Vote",
    "VoteTally",
    "context_snippet",
    "filter_by_category",
    "from_ntstar",
    "is_hidden",
    "mint_iri",
    "normalize_text",
    "paper_to_triples",
    "papers_from_graph",
    "parse_corpus",
    "render_question",
    "result_to_triples",
    "run_extractor",
    "score",
    "simulate",
    "stats",
    "to_ntstar",
]
