from __future__ import annotations

import random

import pytest

from scholargraph import vocab
from scholargraph.corpus import Paper
from scholargraph.docstore import RunInfo
from scholargraph.extract import Tool
from scholargraph.graphstore import (
    DanglingAnnotationError,
    Graph,
    ParseError,
    UnknownStatementError,
    from_ntstar,
    papers_from_graph,
    stats,
    to_ntstar,
)
from scholargraph.semantify import Annotation, make_statement, mint_iri, paper_to_triples
from scholargraph.terms import Literal


def st(s="http://x/s", p="http://x/p", o="o"):
    obj = o if isinstance(o, (Literal, str)) and str(o).startswith("http") else Literal(o)
    return make_statement(s, p, obj)


class TestInsert:
    def test_set_semantics(self):
        g = Graph()
        batch = [st(o=f"v{i}") for i in range(3)]
        assert g.insert(batch, []) == (3, 0)
        assert g.insert(batch, []) == (0, 0)
        assert g.statement_count() == 3

    def test_annotation_dedup_on_full_equality(self):
        g = Graph()
        base = st()
        g.insert([base], [])
        ann = Annotation(base.statement_id, "http://x/a", Literal("v"))
        assert g.insert([], [ann]) == (0, 1)
        assert g.insert([], [ann]) == (0, 0)

    def test_dangling_annotation_rejected_atomically(self):
        g = Graph()
        good = st()
        bad_ann = Annotation("deadbeef" * 4, "http://x/a", Literal("v"))
        with pytest.raises(DanglingAnnotationError):
            g.insert([good], [bad_ann])
        assert g.statement_count() == 0
        assert g.annotation_count() == 0

    def test_annotation_may_target_statement_in_same_batch(self):
        g = Graph()
        base = st()
        ann = Annotation(base.statement_id, "http://x/a", Literal("v"))
        assert g.insert([base], [ann]) == (1, 1)

    def test_pipeline_counts_match_semantify_output(self, pipeline_parts):
        statements, annotations = pipeline_parts
        g = Graph()
        new_st, new_ann = g.insert(statements, annotations)
        assert new_st == len(statements)
        assert new_ann == len(annotations)


class TestAnnotate:
    def test_round_trip(self):
        g = Graph()
        base = st()
        g.insert([base], [])
        g.annotate(base.statement_id, vocab.TG_CONFIDENCE, Literal(0.9, "real"))
        (ann,) = g.annotations_for(base.statement_id)
        assert ann.object == Literal(0.9, "real")

    def test_unknown_statement_rejected(self):
        with pytest.raises(UnknownStatementError):
            Graph().annotate("nope", vocab.TG_CONFIDENCE, Literal(1.0, "real"))

    def test_exact_duplicate_deduplicated(self):
        g = Graph()
        base = st()
        g.insert([base], [])
        g.annotate(base.statement_id, vocab.TG_VOTE, Literal("u|correct|t"))
        g.annotate(base.statement_id, vocab.TG_VOTE, Literal("u|correct|t"))
        assert len(g.annotations_for(base.statement_id)) == 1

    def test_set_annotation_replaces(self):
        g = Graph()
        base = st()
        g.insert([base], [])
        g.set_annotation(base.statement_id, vocab.TG_SCORE, Literal(0.5, "real"))
        g.set_annotation(base.statement_id, vocab.TG_SCORE, Literal(0.25, "real"))
        scores = [a for a in g.annotations_for(base.statement_id) if a.predicate == vocab.TG_SCORE]
        assert scores == [Annotation(base.statement_id, vocab.TG_SCORE, Literal(0.25, "real"))]
        assert g.score_of(base.statement_id) == 0.25


class TestMatchPattern:
    def test_paper_metadata_lookup(self):
        paper = Paper("2101.00001", "T", "A", ("cs.LG",), 2021, "arxiv")
        g = Graph()
        g.insert(paper_to_triples(paper), [])
        iri = mint_iri("paper", "2101.00001")
        assert len(g.match_pattern(s=iri)) == 6  # type+title+abstract+year+source+category

    def test_min_score_filters_below_threshold(self):
        g = Graph()
        low, high, unvoted = st(o="low"), st(o="high"), st(o="none")
        g.insert([low, high, unvoted], [])
        g.set_annotation(low.statement_id, vocab.TG_SCORE, Literal(0.2, "real"))
        g.set_annotation(high.statement_id, vocab.TG_SCORE, Literal(0.8, "real"))
        got = {x.statement_id for x in g.match_pattern(min_score=0.4)}
        assert got == {high.statement_id, unvoted.statement_id}

    def test_boundary_score_not_dropped(self):
        g = Graph()
        s = st()
        g.insert([s], [])
        g.set_annotation(s.statement_id, vocab.TG_SCORE, Literal(0.4, "real"))
        assert g.match_pattern(min_score=0.4) == [s]

    def test_exclude_unvoted(self):
        g = Graph()
        s = st()
        g.insert([s], [])
        assert g.match_pattern(min_score=0.4, include_unvoted=False) == []
        assert g.match_pattern(min_score=0.4, include_unvoted=True) == [s]

    def test_results_ordered_by_statement_id(self, fresh_graph):
        out = fresh_graph.match_pattern()
        ids = [s.statement_id for s in out]
        assert ids == sorted(ids)

    def test_all_eight_patterns_equal_brute_force_on_random_graphs(self):
        rng = random.Random(1234)
        subjects = [f"http://x/s{i}" for i in range(8)]
        predicates = [f"http://x/p{i}" for i in range(5)]
        objects = [f"http://x/o{i}" for i in range(6)] + [Literal(i) for i in range(4)]
        for _ in range(30):
            g = Graph()
            all_statements = []
            for _ in range(rng.randrange(0, 120)):
                stmt = make_statement(
                    rng.choice(subjects), rng.choice(predicates), rng.choice(objects)
                )
                all_statements.append(stmt)
            g.insert(all_statements, [])
            stored = {x.statement_id: x for x in g.statements()}
            for _ in range(40):
                qs = rng.choice([None, rng.choice(subjects)])
                qp = rng.choice([None, rng.choice(predicates)])
                qo = rng.choice([None, rng.choice(objects)])
                expected = sorted(
                    (
                        x.statement_id
                        for x in stored.values()
                        if (qs is None or x.subject == qs)
                        and (qp is None or x.predicate == qp)
                        and (qo is None or x.object == qo)
                    ),
                )
                got = [x.statement_id for x in g.match_pattern(qs, qp, qo)]
                assert got == expected


EXPECTED_TITLE_LINE = (
    "<http://tinygenius.local/resource/paper/2101.00001> "
    "<http://purl.org/dc/terms/title> "
    '"FooNet: a framework for graph learning" .'
)


class TestExportImport:
    def test_metadata_triple_line_exact(self):
        g = Graph()
        g.insert(
            [
                make_statement(
                    mint_iri("paper", "2101.00001"),
                    vocab.DCTERMS_TITLE,
                    Literal("FooNet: a framework for graph learning"),
                )
            ],
            [],
        )
        assert to_ntstar(g) == EXPECTED_TITLE_LINE + "\n"

    def test_annotation_line_exact(self):
        g = Graph()
        base = make_statement("http://x/s", "http://x/p", "http://x/o")
        g.insert([base], [])
        g.annotate(base.statement_id, vocab.TG_CONFIDENCE, Literal(0.9, "real"))
        lines = to_ntstar(g).splitlines()
        assert (
            "<< <http://x/s> <http://x/p> <http://x/o> >> "
            "<http://tinygenius.local/vocab#confidence> "
            '"0.9"^^<http://www.w3.org/2001/XMLSchema#double> .'
        ) in lines

    def test_round_trip_byte_identical(self, fresh_graph):
        text = to_ntstar(fresh_graph)
        assert to_ntstar(from_ntstar(text)) == text

    def test_shuffled_import_equal_graph(self, fresh_graph):
        text = to_ntstar(fresh_graph)
        lines = text.splitlines()
        random.Random(99).shuffle(lines)
        shuffled = from_ntstar("\n".join(lines) + "\n")
        assert shuffled.equal_content(fresh_graph)
        assert to_ntstar(shuffled) == text

    def test_annotation_before_base_triple_is_legal(self):
        text = (
            '<< <http://x/s> <http://x/p> "o" >> <http://x/a> "v" .\n'
            '<http://x/s> <http://x/p> "o" .\n'
        )
        g = from_ntstar(text)
        assert g.statement_count() == 1 and g.annotation_count() == 1

    def test_malformed_iri_names_line(self):
        text = (
            '<http://x/s> <http://x/p> "o" .\n'
            '<http://x/s2> <http://x/p> "o" .\n'
            '<http bad iri> <http://x/p> "o" .\n'
        )
        with pytest.raises(ParseError, match="line 3"):
            from_ntstar(text)

    def test_literal_escaping_round_trip(self):
        tricky = 'quote " backslash \\ newline \n tab \t end'
        g = Graph()
        g.insert([make_statement("http://x/s", "http://x/p", Literal(tricky))], [])
        text = to_ntstar(g)
        again = from_ntstar(text)
        (got,) = again.statements()
        assert got.object == Literal(tricky)
        assert to_ntstar(again) == text

    def test_numeric_literal_round_trip(self):
        g = Graph()
        g.insert(
            [
                make_statement("http://x/s", "http://x/y", Literal(2021, "integer")),
                make_statement("http://x/s", "http://x/c", Literal(0.30000000000000004, "real")),
            ],
            [],
        )
        text = to_ntstar(g)
        assert to_ntstar(from_ntstar(text)) == text

    def test_export_independent_of_insertion_order(self, pipeline_parts):
        statements, annotations = pipeline_parts
        g1 = Graph()
        g1.insert(statements, annotations)
        g2 = Graph()
        g2.insert(list(reversed(statements)), list(reversed(annotations)))
        assert to_ntstar(g1) == to_ntstar(g2)

    def test_dangling_annotation_in_file_rejected(self):
        text = '<< <http://x/s> <http://x/p> "o" >> <http://x/a> "v" .\n'
        with pytest.raises(Exception, match="unknown statement"):
            from_ntstar(text)

    def test_unsupported_syntax_rejected(self):
        with pytest.raises(ParseError):
            from_ntstar('_:blank <http://x/p> "o" .\n')
        with pytest.raises(ParseError):
            from_ntstar('<http://x/s> <http://x/p> "o"@en .\n')


class TestStats:
    def test_empty_graph(self):
        report = stats(Graph())
        assert report.processed_articles == 0
        assert report.triples_total == 0
        assert report.avg_triples_per_article == 0

    def test_fixture_arithmetic(self):
        g = Graph()
        papers = [Paper(f"p{i}", "T", "A", ("c",), 2020, "s") for i in range(2)]
        statements = [t for p in papers for t in paper_to_triples(p)]
        g.insert(statements, [])
        content = make_statement("http://x/s", vocab.TG_HAS_TOPIC, "http://x/topic")
        g.insert([content], [Annotation(content.statement_id, vocab.TG_RUN, Literal("r"))])
        report = stats(g)
        assert report.processed_articles == 2
        assert report.triples_metadata == 12
        assert report.triples_statements == 1
        assert report.triples_provenance == 1
        assert report.triples_total == 14
        assert report.avg_triples_per_article == 7.0

    def test_accounting_identity_on_pipeline(self, fresh_graph, built_store):
        _, infos = built_store
        report = stats(fresh_graph, infos)
        assert report.triples_total == (
            report.triples_metadata + report.triples_statements + report.triples_provenance
        )
        assert set(report.per_tool_duration_seconds) == {t.value for t in Tool}

    def test_identity_survives_votes(self, fresh_graph):
        target = fresh_graph.match_pattern(p=vocab.TG_HAS_TOPIC)[0]
        fresh_graph.annotate(target.statement_id, vocab.TG_VOTE, Literal("u|correct|t"))
        fresh_graph.set_annotation(target.statement_id, vocab.TG_SCORE, Literal(1.0, "real"))
        report = stats(fresh_graph)
        assert report.triples_total == (
            report.triples_metadata + report.triples_statements + report.triples_provenance
        )

    def test_text_report_shape(self, fresh_graph, built_store):
        _, infos = built_store
        text = stats(fresh_graph, infos).to_text()
        assert "triples_total=" in text
        assert "duration_seconds_topics=" in text
        assert text.startswith("#")  # residual definition documented up front

    def test_run_durations_copied(self):
        report = stats(Graph(), [RunInfo("r", Tool.TOPICS, 0.0, 1.0, 5, 3, 2.5)])
        assert report.per_tool_duration_seconds == {"topics": 2.5}


def test_papers_from_graph_round_trip(papers, fresh_graph):
    rebuilt = papers_from_graph(fresh_graph)
    assert len(rebuilt) == len(papers)
    by_id = {p.paper_id: p for p in papers}
    for got in rebuilt:
        want = by_id[got.paper_id]
        assert got.title == want.title
        assert got.abstract == want.abstract
        assert got.year == want.year
        assert got.source == want.source
        assert sorted(got.categories) == sorted(want.categories)
