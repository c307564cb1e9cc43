from __future__ import annotations

from pathlib import Path

import pytest

from scholargraph.corpus import parse_corpus
from scholargraph.docstore import DocStore
from scholargraph.extract import ExtractorConfig, Tool, run_tools
from scholargraph.graphstore import Graph
from scholargraph.semantify import semantify_corpus

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS_50 = FIXTURES / "corpus_50.jsonl"


@pytest.fixture(scope="session")
def papers():
    with open(CORPUS_50, "rb") as fh:
        papers, errors = parse_corpus(fh, source="arxiv")
    assert not errors
    assert len(papers) == 50
    return papers


@pytest.fixture(scope="session")
def extractor_config():
    config = ExtractorConfig.from_settings({})
    config.seed = 42
    return config


@pytest.fixture(scope="session")
def built_store(tmp_path_factory, papers, extractor_config):
    """Docstore with one committed run per tool over the 50-paper fixture."""
    store = DocStore(tmp_path_factory.mktemp("docstore"))
    infos = run_tools(list(Tool), papers, extractor_config, store)
    return store, infos


@pytest.fixture(scope="session")
def pipeline_parts(papers, built_store):
    store, _infos = built_store
    rejected: list = []
    statements, annotations = semantify_corpus(papers, store, rejected)
    assert not rejected
    return statements, annotations


@pytest.fixture()
def fresh_graph(pipeline_parts):
    """A per-test graph of the fixture pipeline (tests may vote on it)."""
    statements, annotations = pipeline_parts
    graph = Graph()
    graph.insert(statements, annotations)
    return graph
