"""Embedded triple store with quoted-triple annotations.

Statements are indexed SPO/POS/OSP for pattern matching; annotations hang off
statement ids and include materialized vote scores used by the min-score
filter. Export/import speak a sorted N-Triples-star dialect so equal graphs
serialize byte-identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional
from urllib.parse import unquote

from . import vocab
from .corpus import Paper
from .docstore import RunInfo
from .semantify import Annotation, Statement, make_statement
from .terms import (
    XSD_DOUBLE,
    XSD_INTEGER,
    Literal,
    Term,
    statement_id,
    term_key,
    term_to_ntriples,
    unescape_literal,
)


class GraphError(Exception):
    pass


class UnknownStatementError(GraphError):
    pass


class DanglingAnnotationError(GraphError):
    pass


class ParseError(GraphError):
    def __init__(self, line_no: int, message: str) -> None:
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class Graph:
    def __init__(self) -> None:
        self._statements: dict[str, Statement] = {}
        self._annotations: dict[str, list[Annotation]] = {}
        self._annotation_keys: set[tuple] = set()
        self._spo: dict[tuple, dict[tuple, set[str]]] = {}
        self._pos: dict[tuple, dict[tuple, set[str]]] = {}
        self._osp: dict[tuple, dict[tuple, set[str]]] = {}
        self._scores: dict[str, float] = {}

    # -- mutation ---------------------------------------------------------

    def insert(
        self,
        statements: Iterable[Statement] = (),
        annotations: Iterable[Annotation] = (),
    ) -> tuple[int, int]:
        """Set-semantics batch insert; returns (new statements, new annotations).

        The whole batch is rejected atomically if any annotation targets a
        statement absent from the graph after this batch.
        """
        statements = list(statements)
        annotations = list(annotations)
        known = set(self._statements)
        known.update(st.statement_id for st in statements)
        for ann in annotations:
            if ann.target not in known:
                raise DanglingAnnotationError(
                    f"annotation targets unknown statement {ann.target}"
                )
        new_statements = 0
        for st in statements:
            if st.statement_id in self._statements:
                continue
            self._add_statement(st)
            new_statements += 1
        new_annotations = 0
        for ann in annotations:
            if self._add_annotation(ann):
                new_annotations += 1
        return new_statements, new_annotations

    def _add_statement(self, st: Statement) -> None:
        self._statements[st.statement_id] = st
        ks, kp, ko = term_key(st.subject), term_key(st.predicate), term_key(st.object)
        self._spo.setdefault(ks, {}).setdefault(kp, set()).add(st.statement_id)
        self._pos.setdefault(kp, {}).setdefault(ko, set()).add(st.statement_id)
        self._osp.setdefault(ko, {}).setdefault(ks, set()).add(st.statement_id)

    def _add_annotation(self, ann: Annotation) -> bool:
        key = ann.sort_key()
        if key in self._annotation_keys:
            return False
        self._annotation_keys.add(key)
        self._annotations.setdefault(ann.target, []).append(ann)
        if ann.predicate == vocab.TG_SCORE and isinstance(ann.object, Literal):
            self._scores[ann.target] = float(ann.object.value)
        return True

    def annotate(self, statement_id: str, predicate: str, obj: Term) -> None:
        """Append one annotation to an existing statement."""
        if statement_id not in self._statements:
            raise UnknownStatementError(f"unknown statement {statement_id}")
        self._add_annotation(Annotation(statement_id, predicate, obj))

    def set_annotation(self, statement_id: str, predicate: str, obj: Term) -> None:
        """Replace any existing (statement, predicate, *) annotations with one
        value; used for materialized facts like the vote score."""
        if statement_id not in self._statements:
            raise UnknownStatementError(f"unknown statement {statement_id}")
        old = self._annotations.get(statement_id, [])
        kept = [a for a in old if a.predicate != predicate]
        for a in old:
            if a.predicate == predicate:
                self._annotation_keys.discard(a.sort_key())
        self._annotations[statement_id] = kept
        self._add_annotation(Annotation(statement_id, predicate, obj))

    # -- access -----------------------------------------------------------

    def statements(self) -> list[Statement]:
        return [self._statements[sid] for sid in sorted(self._statements)]

    def get_statement(self, statement_id: str) -> Optional[Statement]:
        return self._statements.get(statement_id)

    def annotations_for(self, statement_id: str) -> list[Annotation]:
        return sorted(self._annotations.get(statement_id, []), key=Annotation.sort_key)

    def score_of(self, statement_id: str) -> Optional[float]:
        return self._scores.get(statement_id)

    def statement_count(self) -> int:
        return len(self._statements)

    def annotation_count(self) -> int:
        return len(self._annotation_keys)

    def match_pattern(
        self,
        s: Optional[str] = None,
        p: Optional[str] = None,
        o: Optional[Term] = None,
        min_score: Optional[float] = None,
        include_unvoted: bool = True,
    ) -> list[Statement]:
        """Triple-pattern query; None positions are wildcards.

        With ``min_score``, statements whose materialized score is defined and
        below it are dropped; statements with no score are kept only when
        ``include_unvoted``. Results are ordered by statement id.
        """
        sids = self._match_ids(s, p, o)
        out = []
        for sid in sorted(sids):
            if min_score is not None:
                score = self._scores.get(sid)
                if score is None:
                    if not include_unvoted:
                        continue
                elif score < min_score:
                    continue
            out.append(self._statements[sid])
        return out

    def _match_ids(self, s, p, o) -> set[str]:
        ks = term_key(s) if s is not None else None
        kp = term_key(p) if p is not None else None
        ko = term_key(o) if o is not None else None
        if ks is not None and kp is not None:
            sids = set(self._spo.get(ks, {}).get(kp, ()))
            if ko is not None:
                sids &= set(self._osp.get(ko, {}).get(ks, ()))
            return sids
        if kp is not None and ko is not None:
            return set(self._pos.get(kp, {}).get(ko, ()))
        if ks is not None and ko is not None:
            return set(self._osp.get(ko, {}).get(ks, ()))
        if ks is not None:
            return {sid for bucket in self._spo.get(ks, {}).values() for sid in bucket}
        if kp is not None:
            return {sid for bucket in self._pos.get(kp, {}).values() for sid in bucket}
        if ko is not None:
            return {sid for bucket in self._osp.get(ko, {}).values() for sid in bucket}
        return set(self._statements)

    def equal_content(self, other: "Graph") -> bool:
        return (
            set(self._statements) == set(other._statements)
            and self._annotation_keys == other._annotation_keys
        )


# -- serialization ---------------------------------------------------------


def ntstar_lines(statements: Iterable[Statement], annotations: Iterable[Annotation]) -> str:
    """Sorted N-Triples-star text for explicit statement/annotation lists.

    Every annotation target must be among the statements."""
    by_id = {st.statement_id: st for st in statements}
    lines = [
        f"{term_to_ntriples(st.subject)} {term_to_ntriples(st.predicate)} "
        f"{term_to_ntriples(st.object)} ."
        for st in by_id.values()
    ]
    for ann in annotations:
        base = by_id.get(ann.target)
        if base is None:
            raise DanglingAnnotationError(f"annotation targets unknown statement {ann.target}")
        lines.append(
            f"<< {term_to_ntriples(base.subject)} {term_to_ntriples(base.predicate)} "
            f"{term_to_ntriples(base.object)} >> {term_to_ntriples(ann.predicate)} "
            f"{term_to_ntriples(ann.object)} ."
        )
    if not lines:
        return ""
    return "\n".join(sorted(lines)) + "\n"


def to_ntstar(graph: Graph) -> str:
    """Serialize a graph to N-Triples-star: one sorted line per statement and
    per annotation (quoted-triple subject)."""
    annotations = [ann for anns in graph._annotations.values() for ann in anns]
    return ntstar_lines(graph._statements.values(), annotations)


def _skip_ws(line: str, pos: int) -> int:
    while pos < len(line) and line[pos] in " \t":
        pos += 1
    return pos


_BAD_IRI_CHARS = set('<>"{}|^`\\') | {chr(c) for c in range(0x21)}


def _parse_term(line: str, pos: int, line_no: int) -> tuple[Term, int]:
    pos = _skip_ws(line, pos)
    if pos >= len(line):
        raise ParseError(line_no, "unexpected end of line, expected a term")
    ch = line[pos]
    if ch == "<":
        end = line.find(">", pos + 1)
        if end < 0:
            raise ParseError(line_no, "unterminated IRI")
        iri = line[pos + 1 : end]
        if not iri or any(c in _BAD_IRI_CHARS for c in iri):
            raise ParseError(line_no, f"malformed IRI <{iri}>")
        return iri, end + 1
    if ch == '"':
        i = pos + 1
        while i < len(line):
            if line[i] == "\\":
                i += 2
                continue
            if line[i] == '"':
                break
            i += 1
        if i >= len(line):
            raise ParseError(line_no, "unterminated literal")
        try:
            body = unescape_literal(line[pos + 1 : i])
        except ValueError as exc:
            raise ParseError(line_no, str(exc))
        i += 1
        if line[i : i + 2] == "^^":
            if line[i + 2 : i + 3] != "<":
                raise ParseError(line_no, "expected datatype IRI after ^^")
            end = line.find(">", i + 3)
            if end < 0:
                raise ParseError(line_no, "unterminated datatype IRI")
            datatype = line[i + 3 : end]
            if datatype == XSD_INTEGER:
                try:
                    return Literal(int(body), "integer"), end + 1
                except ValueError:
                    raise ParseError(line_no, f"bad integer literal {body!r}")
            if datatype == XSD_DOUBLE:
                try:
                    return Literal(float(body), "real"), end + 1
                except ValueError:
                    raise ParseError(line_no, f"bad double literal {body!r}")
            raise ParseError(line_no, f"unsupported datatype <{datatype}>")
        return Literal(body, "text"), i
    raise ParseError(line_no, f"expected IRI or literal at column {pos + 1}")


def _expect(line: str, pos: int, token: str, line_no: int) -> int:
    pos = _skip_ws(line, pos)
    if not line.startswith(token, pos):
        raise ParseError(line_no, f"expected {token!r} at column {pos + 1}")
    return pos + len(token)


def _parse_triple_terms(line: str, pos: int, line_no: int) -> tuple[str, str, Term, int]:
    s, pos = _parse_term(line, pos, line_no)
    if not isinstance(s, str):
        raise ParseError(line_no, "subject must be an IRI")
    p, pos = _parse_term(line, pos, line_no)
    if not isinstance(p, str):
        raise ParseError(line_no, "predicate must be an IRI")
    o, pos = _parse_term(line, pos, line_no)
    return s, p, o, pos


def from_ntstar(text: str) -> Graph:
    """Parse an N-Triples-star document; annotations may precede their base
    triple in the file (two-pass load)."""
    statements: list[Statement] = []
    annotations: list[Annotation] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("<<"):
            pos = 2
            s, p, o, pos = _parse_triple_terms(line, pos, line_no)
            pos = _expect(line, pos, ">>", line_no)
            ap, pos = _parse_term(line, pos, line_no)
            if not isinstance(ap, str):
                raise ParseError(line_no, "annotation predicate must be an IRI")
            ao, pos = _parse_term(line, pos, line_no)
            pos = _expect(line, pos, ".", line_no)
            annotations.append(Annotation(statement_id(s, p, o), ap, ao))
        else:
            s, p, o, pos = _parse_triple_terms(line, 0, line_no)
            pos = _expect(line, pos, ".", line_no)
            statements.append(make_statement(s, p, o))
        trailing = line[pos:].strip()
        if trailing:
            raise ParseError(line_no, f"unexpected trailing content {trailing!r}")
    graph = Graph()
    try:
        graph.insert(statements, annotations)
    except DanglingAnnotationError as exc:
        raise GraphError(f"import failed: {exc}")
    return graph


# -- statistics -------------------------------------------------------------


@dataclass
class StatsReport:
    processed_articles: int
    triples_metadata: int
    triples_statements: int
    triples_provenance: int
    per_tool_duration_seconds: dict[str, float] = field(default_factory=dict)

    @property
    def triples_total(self) -> int:
        return self.triples_metadata + self.triples_statements + self.triples_provenance

    @property
    def avg_triples_per_article(self) -> float:
        return self.triples_total / max(1, self.processed_articles)

    def to_text(self) -> str:
        lines = [
            "# triples_statements counts extraction-origin content statements;",
            "# triples_total = triples_metadata + triples_statements + triples_provenance",
            f"processed_articles={self.processed_articles}",
            f"triples_metadata={self.triples_metadata}",
            f"triples_statements={self.triples_statements}",
            f"triples_provenance={self.triples_provenance}",
            f"triples_total={self.triples_total}",
            f"avg_triples_per_article={self.avg_triples_per_article:.4f}",
        ]
        for tool in sorted(self.per_tool_duration_seconds):
            lines.append(
                f"duration_seconds_{tool}={self.per_tool_duration_seconds[tool]:.4f}"
            )
        return "\n".join(lines) + "\n"


def papers_from_graph(graph: Graph) -> list[Paper]:
    """Rebuild Paper records from metadata triples (category order is lost to
    set semantics and comes back sorted)."""
    prefix = vocab.BASE + "paper/"
    papers = []
    for st in graph.match_pattern(None, vocab.RDF_TYPE, vocab.TG_PAPER_CLASS):
        iri = st.subject
        if not iri.startswith(prefix):
            continue

        def first(predicate: str):
            hits = graph.match_pattern(iri, predicate, None)
            return hits[0].object.value if hits else None

        title = first(vocab.DCTERMS_TITLE)
        year = first(vocab.TG_YEAR)
        if title is None or year is None:
            continue
        categories = sorted(
            str(hit.object.value)
            for hit in graph.match_pattern(iri, vocab.TG_CATEGORY, None)
        )
        papers.append(
            Paper(
                paper_id=unquote(iri[len(prefix) :]),
                title=str(title),
                abstract=str(first(vocab.DCTERMS_ABSTRACT) or ""),
                categories=tuple(categories),
                year=int(year),
                source=str(first(vocab.TG_SOURCE) or "corpus"),
            )
        )
    papers.sort(key=lambda p: p.paper_id)
    return papers


def stats(graph: Graph, runs: Iterable[RunInfo] = ()) -> StatsReport:
    metadata = 0
    extraction = 0
    for st in graph._statements.values():
        if st.origin == "metadata":
            metadata += 1
        else:
            extraction += 1
    processed = len(
        graph.match_pattern(None, vocab.RDF_TYPE, vocab.TG_PAPER_CLASS)
    )
    durations: dict[str, float] = {}
    for info in runs:
        durations[info.tool.value] = durations.get(info.tool.value, 0.0) + info.duration_seconds
    return StatsReport(
        processed_articles=processed,
        triples_metadata=metadata,
        triples_statements=extraction,
        triples_provenance=graph.annotation_count(),
        per_tool_duration_seconds=durations,
    )
