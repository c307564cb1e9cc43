"""Deterministic reference extractors over paper titles and abstracts."""

from .config import (
    DATASET_RELATION,
    DEFAULT_CUE_RULES,
    DEFAULT_TITLE_TYPES,
    CueRule,
    ExtractorConfig,
    MissingDictionaryError,
)
from .gazetteer import DictEntry, Dictionary, Match, load_dictionary, match_ngrams
from .model import ExtractionResult, SchemaError, Tool, validate_items, validate_result
from .runner import corpus_digest, logical_timestamp, mint_run_id, run_tool, run_tools
from .text import split_sentences, tokenize
from .tools import (
    annotate_abstract,
    extract_abstract_ner,
    extract_entity_links,
    extract_summary,
    extract_title_ner,
    extract_topics,
    parse_title,
    run_extractor,
    summarize,
)

__all__ = [
    "DATASET_RELATION",
    "DEFAULT_CUE_RULES",
    "DEFAULT_TITLE_TYPES",
    "CueRule",
    "DictEntry",
    "Dictionary",
    "ExtractionResult",
    "ExtractorConfig",
    "Match",
    "MissingDictionaryError",
    "SchemaError",
    "Tool",
    "annotate_abstract",
    "corpus_digest",
    "extract_abstract_ner",
    "extract_entity_links",
    "extract_summary",
    "extract_title_ner",
    "extract_topics",
    "load_dictionary",
    "logical_timestamp",
    "match_ngrams",
    "mint_run_id",
    "parse_title",
    "run_extractor",
    "run_tool",
    "run_tools",
    "split_sentences",
    "summarize",
    "tokenize",
    "validate_items",
    "validate_result",
]
