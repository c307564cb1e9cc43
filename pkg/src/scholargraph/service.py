"""HTTP/JSON facade over the graph and curation loop.

Endpoints:
  GET  /papers?offset&limit
  GET  /papers/{id}
  GET  /papers/{id}/statements?includeHidden
  GET  /tasks/next?userId[&seed]
  POST /votes {userId, statementId, value}
  GET  /statements/{id}
  GET  /resources/{iri}/usage-by-year
  GET  /stats
  GET  /config

Hidden statements are filtered out of listings server-side by default;
includeHidden=true is the escape hatch. Errors use a fixed body shape
{status, code, message} with code from a closed set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional
from urllib.parse import unquote

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import vocab
from .corpus import Paper
from .curation import (
    VOTE_VALUES,
    CurationService,
    DuplicateVoteError,
    InvalidVoteError,
    MicrotaskCard,
    Vote,
    is_hidden,
    score,
    statement_tool,
)
from .docstore import RunInfo
from .extract.model import Tool
from .extract.tools import now_utc_iso
from .graphstore import Graph, UnknownStatementError, papers_from_graph, stats
from .semantify import Statement, mint_iri
from .terms import Literal, Term


class ApiProblem(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)

    def body(self) -> dict:
        return {"status": self.status, "code": self.code, "message": self.message}


@dataclass
class ServiceState:
    graph: Graph
    curation: CurationService
    papers: list[Paper]
    runs: list[RunInfo] = field(default_factory=list)
    threshold: float = 0.40
    rng: random.Random = field(default_factory=random.Random)

    def __post_init__(self) -> None:
        self.papers_by_id = {p.paper_id: p for p in self.papers}
        self.papers_by_iri = {mint_iri("paper", p.paper_id): p for p in self.papers}
        # paper IRI -> content statement ids, via the paper provenance annotation
        self.paper_statements: dict[str, list[str]] = {}
        for st in self.graph.statements():
            if st.origin != "extraction":
                continue
            for ann in self.graph.annotations_for(st.statement_id):
                if ann.predicate == vocab.TG_PAPER and isinstance(ann.object, str):
                    self.paper_statements.setdefault(ann.object, []).append(st.statement_id)


def build_state(
    graph: Graph,
    papers: Optional[list[Paper]] = None,
    runs: Optional[list[RunInfo]] = None,
    threshold: float = 0.40,
    seed: Optional[int] = None,
) -> ServiceState:
    if papers is None:
        papers = papers_from_graph(graph)
    curation = CurationService(graph, papers, threshold)
    rng = random.Random(seed) if seed is not None else random.Random()
    return ServiceState(graph, curation, papers, runs or [], threshold, rng)


def _term_json(term: Term) -> dict:
    if isinstance(term, Literal):
        return {"type": "literal", "value": term.value, "kind": term.kind}
    return {"type": "iri", "value": term}


def _display_term(term: Term) -> str:
    if isinstance(term, Literal):
        return str(term.value)
    tail = term.rsplit("#", 1)[-1].rsplit("/", 1)[-1]
    return unquote(tail).replace("-", " ")


class VotePayload(BaseModel):
    userId: str
    statementId: str
    value: str


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="scholargraph", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiProblem)
    async def _problem_handler(_request: Request, exc: ApiProblem):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(_request: Request, exc: RequestValidationError):
        problem = ApiProblem(400, "bad_request", str(exc.errors()[:1]))
        return JSONResponse(status_code=400, content=problem.body())

    def statement_payload(st: Statement) -> dict:
        sid = st.statement_id
        annotations = state.graph.annotations_for(sid)
        tally = state.curation.tally_of(sid)
        value = score(tally)
        tool = statement_tool(annotations)
        return {
            "id": sid,
            "subject": _term_json(st.subject),
            "predicate": _term_json(st.predicate),
            "object": _term_json(st.object),
            "origin": st.origin,
            "tool": tool.value if tool else None,
            "text": " ".join(
                (_display_term(st.subject), _display_term(st.predicate), _display_term(st.object))
            ),
            "score": value,
            "hidden": is_hidden(value, state.threshold),
            "tally": {
                "correct": tally.n_correct,
                "incorrect": tally.n_incorrect,
                "unknown": tally.n_unknown,
            },
            "annotations": [
                {"predicate": ann.predicate, "object": _term_json(ann.object)}
                for ann in annotations
            ],
        }

    def paper_payload(paper: Paper) -> dict:
        return {
            "id": paper.paper_id,
            "title": paper.title,
            "abstract": paper.abstract,
            "categories": list(paper.categories),
            "year": paper.year,
            "source": paper.source,
        }

    def grouped_statements(paper: Paper, include_hidden: bool) -> dict:
        iri = mint_iri("paper", paper.paper_id)
        groups: dict[str, list[dict]] = {tool.value: [] for tool in Tool}
        for sid in state.paper_statements.get(iri, ()):
            st = state.graph.get_statement(sid)
            payload = statement_payload(st)
            if payload["hidden"] and not include_hidden:
                continue
            bucket = payload["tool"]
            if bucket is None:
                continue
            groups[bucket].append(payload)
        return groups

    def require_paper(paper_id: str) -> Paper:
        paper = state.papers_by_id.get(paper_id)
        if paper is None:
            raise ApiProblem(404, "not_found", f"unknown paper {paper_id}")
        return paper

    @app.get("/papers")
    def list_papers(offset: int = 0, limit: int = 50):
        if offset < 0 or limit < 0:
            raise ApiProblem(400, "bad_request", "offset and limit must be >= 0")
        window = state.papers[offset : offset + limit]
        return {
            "total": len(state.papers),
            "offset": offset,
            "papers": [paper_payload(p) for p in window],
        }

    @app.get("/papers/{paper_id}")
    def get_paper(paper_id: str, includeHidden: bool = False):
        paper = require_paper(paper_id)
        return {
            "paper": paper_payload(paper),
            "statements": grouped_statements(paper, includeHidden),
        }

    @app.get("/papers/{paper_id}/statements")
    def get_paper_statements(paper_id: str, includeHidden: bool = False):
        paper = require_paper(paper_id)
        return {"statements": grouped_statements(paper, includeHidden)}

    @app.get("/tasks/next")
    def next_task(userId: str, seed: Optional[int] = None):
        if not userId:
            raise ApiProblem(400, "bad_request", "userId must be nonempty")
        rng = random.Random(seed) if seed is not None else state.rng
        card = state.curation.next_task(userId, rng)
        if card is None:
            return Response(status_code=204)
        return _card_json(card)

    @app.post("/votes")
    def post_vote(payload: VotePayload):
        if payload.value not in VOTE_VALUES:
            raise ApiProblem(
                400, "bad_request", f"value must be one of {list(VOTE_VALUES)}"
            )
        vote = Vote(payload.userId, payload.statementId, payload.value, now_utc_iso())
        try:
            tally = state.curation.submit_vote(vote)
        except DuplicateVoteError as exc:
            raise ApiProblem(409, "duplicate_vote", str(exc))
        except UnknownStatementError as exc:
            raise ApiProblem(404, "not_found", str(exc))
        except InvalidVoteError as exc:
            raise ApiProblem(400, "bad_request", str(exc))
        value = score(tally)
        return {
            "statementId": payload.statementId,
            "tally": {
                "correct": tally.n_correct,
                "incorrect": tally.n_incorrect,
                "unknown": tally.n_unknown,
            },
            "score": value,
            "hidden": is_hidden(value, state.threshold),
        }

    @app.get("/statements/{statement_id}")
    def get_statement(statement_id: str):
        st = state.graph.get_statement(statement_id)
        if st is None:
            raise ApiProblem(404, "not_found", f"unknown statement {statement_id}")
        return statement_payload(st)

    @app.get("/resources/{iri:path}/usage-by-year")
    def usage_by_year_endpoint(iri: str):
        return {"resource": iri, "usage": usage_by_year(state, iri)}

    @app.get("/stats")
    def get_stats():
        report = stats(state.graph, state.runs)
        return {
            "processedArticles": report.processed_articles,
            "triplesMetadata": report.triples_metadata,
            "triplesStatements": report.triples_statements,
            "triplesProvenance": report.triples_provenance,
            "triplesTotal": report.triples_total,
            "avgTriplesPerArticle": report.avg_triples_per_article,
            "perToolDurationSeconds": report.per_tool_duration_seconds,
        }

    @app.get("/config")
    def get_config():
        return {
            "threshold": state.threshold,
            "namespaces": vocab.namespaces(),
            "tools": [tool.value for tool in Tool],
            "voteValues": list(VOTE_VALUES),
        }

    return app


def _card_json(card: MicrotaskCard) -> dict:
    return {
        "statementId": card.statement_id,
        "question": card.question,
        "tool": card.tool,
        "paperId": card.paper_id,
        "context": {
            "sourceField": card.context.source_field,
            "excerpt": card.context.excerpt,
            "highlightRanges": [list(r) for r in card.context.highlight_ranges],
            "tool": card.context.tool,
            "confidence": card.context.confidence,
            "runId": card.context.run_id,
        },
    }


def usage_by_year(state: ServiceState, resource: str) -> list[dict]:
    """Distinct papers per year having any visible statement that mentions the
    resource as subject or object."""
    seen: set[str] = set()
    matches = state.graph.match_pattern(s=resource) + state.graph.match_pattern(o=resource)
    papers_per_year: dict[int, set[str]] = {}
    for st in matches:
        if st.statement_id in seen:
            continue
        seen.add(st.statement_id)
        if state.curation.hidden(st.statement_id):
            continue
        paper_iri = None
        for ann in state.graph.annotations_for(st.statement_id):
            if ann.predicate == vocab.TG_PAPER and isinstance(ann.object, str):
                paper_iri = ann.object
                break
        if paper_iri is None and st.subject in state.papers_by_iri:
            paper_iri = st.subject
        paper = state.papers_by_iri.get(paper_iri) if paper_iri else None
        if paper is None:
            continue
        papers_per_year.setdefault(paper.year, set()).add(paper.paper_id)
    return [
        {"year": year, "paperCount": len(papers_per_year[year])}
        for year in sorted(papers_per_year)
    ]
