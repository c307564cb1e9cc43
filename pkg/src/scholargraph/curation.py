"""Vote collection, score aggregation, threshold hiding, microtask scheduling,
question rendering, context snippets, and the worker simulation harness.

Votes live twice: an in-memory log (the recomputation source of truth) and
``vote`` annotations on the statement, with the aggregated score materialized
as a ``score`` annotation so visibility filtering stays index-friendly.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import vocab
from .corpus import Paper
from .extract.model import Tool
from .extract.text import split_sentences
from .graphstore import Graph, UnknownStatementError
from .semantify import ORIGIN_EXTRACTION, Annotation, Statement, mint_iri
from .terms import Literal

logger = logging.getLogger(__name__)

VOTE_VALUES = ("correct", "incorrect", "unknown")

DEFAULT_THRESHOLD = 0.40

QUESTION_TEMPLATES = {
    Tool.TOPICS: "Is this paper related to the topic {topic}?",
    Tool.ENTITY_LINKS: "Is the term {entity} related to {wikidata concept}?",
    Tool.ABSTRACT_NER: "Is this statement correct? This paper {type} {entity}",
    Tool.TITLE_NER: "Is {entity} a {type} presented in this paper?",
    Tool.SUMMARY: "Does this summarize the paper correctly?",
}


class CurationError(Exception):
    pass


class DuplicateVoteError(CurationError):
    pass


class InvalidVoteError(CurationError):
    pass


class MissingSlotError(CurationError):
    """A question template slot has no recoverable value."""


class SnippetError(CurationError):
    pass


@dataclass(frozen=True)
class Vote:
    user_id: str
    statement_id: str
    value: str
    cast_at: str


@dataclass
class VoteTally:
    statement_id: str
    n_correct: int = 0
    n_incorrect: int = 0
    n_unknown: int = 0

    def add(self, value: str) -> None:
        if value == "correct":
            self.n_correct += 1
        elif value == "incorrect":
            self.n_incorrect += 1
        else:
            self.n_unknown += 1


@dataclass
class Snippet:
    source_field: str
    excerpt: str
    highlight_ranges: list[tuple[int, int]]
    tool: str
    confidence: Optional[float]
    run_id: Optional[str]


@dataclass
class MicrotaskCard:
    statement_id: str
    question: str
    context: Snippet
    tool: str
    paper_id: str


def score(tally: VoteTally) -> Optional[float]:
    """Fraction of correct among correct+incorrect votes; None when no such
    votes exist. Unknown votes never move the score."""
    voted = tally.n_correct + tally.n_incorrect
    if voted == 0:
        return None
    return tally.n_correct / voted


def is_hidden(score_value: Optional[float], threshold: float) -> bool:
    """Hidden iff the score is defined and strictly below the threshold;
    unvoted statements stay visible."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    return score_value is not None and score_value < threshold


# -- annotation helpers ------------------------------------------------------


def annotation_values(annotations: Iterable[Annotation], predicate: str) -> list:
    out = []
    for ann in annotations:
        if ann.predicate == predicate:
            out.append(ann.object.value if isinstance(ann.object, Literal) else ann.object)
    return out


def first_annotation(annotations: Iterable[Annotation], predicate: str):
    values = annotation_values(annotations, predicate)
    return values[0] if values else None


def parse_span_literal(value: str) -> tuple[str, int, int]:
    field_name, _, rest = value.partition(":")
    start_s, _, end_s = rest.partition("-")
    return field_name, int(start_s), int(end_s)


def statement_tool(annotations: Iterable[Annotation]) -> Optional[Tool]:
    name = first_annotation(annotations, vocab.TG_EXTRACTED_BY)
    try:
        return Tool(name) if name else None
    except ValueError:
        return None


# -- question rendering ------------------------------------------------------


def render_question(statement: Statement, annotations: list[Annotation]) -> str:
    """Fill the extracting tool's question template from the statement and its
    provenance; raises MissingSlotError when a slot value is unrecoverable."""
    tool = statement_tool(annotations)
    if tool is None:
        raise MissingSlotError(f"statement {statement.statement_id} has no tool annotation")
    template = QUESTION_TEMPLATES[tool]
    slots: dict[str, Optional[str]] = {}
    if tool is Tool.TOPICS:
        slots["topic"] = first_annotation(annotations, vocab.TG_TOPIC_LABEL)
    elif tool is Tool.ENTITY_LINKS:
        slots["entity"] = first_annotation(annotations, vocab.TG_SURFACE_FORM)
        slots["wikidata concept"] = first_annotation(annotations, vocab.TG_CONCEPT_LABEL)
    elif tool is Tool.ABSTRACT_NER:
        slots["entity"] = first_annotation(annotations, vocab.TG_ENTITY_LABEL)
        local = statement.predicate.removeprefix(vocab.VOCAB)
        slots["type"] = local.replace("-", " ") if local else None
    elif tool is Tool.TITLE_NER:
        slots["entity"] = first_annotation(annotations, vocab.TG_ENTITY_LABEL)
        slots["type"] = first_annotation(annotations, vocab.TG_TYPE_LABEL)
    question = template
    for name, value in slots.items():
        if value is None:
            raise MissingSlotError(
                f"statement {statement.statement_id}: no value for slot {{{name}}}"
            )
        question = question.replace("{" + name + "}", str(value))
    if "{" in question:
        raise MissingSlotError(f"unfilled placeholder in question: {question}")
    return question


# -- context snippets --------------------------------------------------------

_WINDOW = 120
_SENTENCE_SNAP = 200


def context_snippet(
    statement: Statement, paper: Paper, annotations: list[Annotation]
) -> Snippet:
    """Excerpt around the statement's first extraction span with every in-window
    span highlighted; summaries show the whole abstract with the selected
    sentences highlighted."""
    tool = statement_tool(annotations)
    if tool is None:
        raise SnippetError(f"statement {statement.statement_id} has no tool annotation")
    provenance = {
        "tool": tool.value,
        "confidence": first_annotation(annotations, vocab.TG_CONFIDENCE),
        "run_id": first_annotation(annotations, vocab.TG_RUN),
    }

    if tool is Tool.SUMMARY:
        raw = first_annotation(annotations, vocab.TG_SENTENCE_INDICES)
        if raw is None:
            raise SnippetError("summary statement lacks sentence indices")
        indices = [int(x) for x in str(raw).split(",") if x != ""]
        sentences = split_sentences(paper.abstract)
        highlights = []
        for idx in indices:
            if idx >= len(sentences):
                raise SnippetError(f"sentence index {idx} out of range")
            highlights.append(sentences[idx])
        return Snippet("abstract", paper.abstract, highlights, **provenance)

    spans = [parse_span_literal(str(v)) for v in annotation_values(annotations, vocab.TG_SPAN)]
    if not spans:
        raise SnippetError(f"statement {statement.statement_id} has no span annotation")
    spans.sort(key=lambda sp: (sp[0] != "title", sp[1]))
    field_name, start, end = spans[0]
    text = paper.title if field_name == "title" else paper.abstract
    if end > len(text):
        raise SnippetError(f"span {field_name}:{start}-{end} outside field bounds")

    if field_name == "title":
        window = (0, len(text))
    else:
        lo = max(0, start - _WINDOW)
        hi = min(len(text), end + _WINDOW)
        # widen the raw window edges to sentence boundaries when close enough
        for sent_start, sent_end in split_sentences(text):
            if sent_start <= lo < sent_end and lo - sent_start <= _SENTENCE_SNAP:
                lo = sent_start
            if sent_start <= hi - 1 < sent_end and sent_end - hi <= _SENTENCE_SNAP:
                hi = sent_end
        window = (lo, hi)

    excerpt = text[window[0] : window[1]]
    highlights = [
        (s - window[0], e - window[0])
        for f, s, e in spans
        if f == field_name and s >= window[0] and e <= window[1]
    ]
    return Snippet(field_name, excerpt, highlights, **provenance)


# -- the curation service ----------------------------------------------------


class CurationService:
    """Vote intake and microtask scheduling over a graph.

    Existing ``vote`` annotations are replayed at construction so a service
    rebuilt from an exported graph resumes with the same tallies.
    """

    def __init__(
        self,
        graph: Graph,
        papers: Iterable[Paper] = (),
        threshold: float = DEFAULT_THRESHOLD,
    ) -> None:
        self.graph = graph
        self.threshold = threshold
        self.papers_by_iri = {mint_iri("paper", p.paper_id): p for p in papers}
        self.votes: list[Vote] = []
        self.tallies: dict[str, VoteTally] = {}
        self._voted: set[tuple[str, str]] = set()
        self._replay_graph_votes()

    def _replay_graph_votes(self) -> None:
        for st in self.graph.statements():
            for ann in self.graph.annotations_for(st.statement_id):
                if ann.predicate != vocab.TG_VOTE or not isinstance(ann.object, Literal):
                    continue
                user_id, _, rest = str(ann.object.value).partition("|")
                value, _, cast_at = rest.partition("|")
                if value not in VOTE_VALUES or (user_id, st.statement_id) in self._voted:
                    continue
                self._record(Vote(user_id, st.statement_id, value, cast_at))

    def _record(self, vote: Vote) -> VoteTally:
        self.votes.append(vote)
        self._voted.add((vote.user_id, vote.statement_id))
        tally = self.tallies.setdefault(vote.statement_id, VoteTally(vote.statement_id))
        tally.add(vote.value)
        return tally

    def submit_vote(self, vote: Vote) -> VoteTally:
        """Record one vote; writes the vote annotation and refreshes the
        materialized score. One vote per (user, statement), no edits."""
        if vote.value not in VOTE_VALUES:
            raise InvalidVoteError(f"vote value must be one of {VOTE_VALUES}")
        if not vote.user_id or "|" in vote.user_id:
            raise InvalidVoteError("user_id must be nonempty and must not contain '|'")
        if self.graph.get_statement(vote.statement_id) is None:
            raise UnknownStatementError(f"unknown statement {vote.statement_id}")
        if (vote.user_id, vote.statement_id) in self._voted:
            raise DuplicateVoteError(
                f"user {vote.user_id} already voted on {vote.statement_id}"
            )
        tally = self._record(vote)
        self.graph.annotate(
            vote.statement_id,
            vocab.TG_VOTE,
            Literal(f"{vote.user_id}|{vote.value}|{vote.cast_at}"),
        )
        value = score(tally)
        if value is not None:
            self.graph.set_annotation(vote.statement_id, vocab.TG_SCORE, Literal(value, "real"))
        return VoteTally(tally.statement_id, tally.n_correct, tally.n_incorrect, tally.n_unknown)

    def tally_of(self, statement_id: str) -> VoteTally:
        tally = self.tallies.get(statement_id)
        if tally is None:
            return VoteTally(statement_id)
        return VoteTally(statement_id, tally.n_correct, tally.n_incorrect, tally.n_unknown)

    def score_of(self, statement_id: str) -> Optional[float]:
        return score(self.tally_of(statement_id))

    def hidden(self, statement_id: str) -> bool:
        return is_hidden(self.score_of(statement_id), self.threshold)

    def recompute_tallies(self) -> dict[str, VoteTally]:
        """Rebuild tallies from the vote log (the recomputation oracle)."""
        out: dict[str, VoteTally] = {}
        for vote in self.votes:
            out.setdefault(vote.statement_id, VoteTally(vote.statement_id)).add(vote.value)
        return out

    # -- scheduling --------------------------------------------------------

    def eligible_statements(self, user_id: str) -> list[str]:
        """Extraction-origin statements this user has not voted on, hidden or
        not; hiding is a display default, not a scheduling filter."""
        return [
            st.statement_id
            for st in self.graph.statements()
            if st.origin == ORIGIN_EXTRACTION and (user_id, st.statement_id) not in self._voted
        ]

    def next_task(
        self, user_id: str, rng: random.Random | int | None = None
    ) -> Optional[MicrotaskCard]:
        """A uniformly random microtask among this user's eligible statements,
        or None when exhausted. Pass an int or Random for reproducibility."""
        if rng is None:
            rng = random.Random()
        elif isinstance(rng, int):
            rng = random.Random(rng)
        candidates = self.eligible_statements(user_id)
        while candidates:
            statement_id = rng.choice(candidates)
            card = self._render_card(statement_id)
            if card is not None:
                return card
            candidates.remove(statement_id)
        return None

    def _render_card(self, statement_id: str) -> Optional[MicrotaskCard]:
        statement = self.graph.get_statement(statement_id)
        annotations = self.graph.annotations_for(statement_id)
        tool = statement_tool(annotations)
        paper_iri = first_annotation(annotations, vocab.TG_PAPER)
        paper = self.papers_by_iri.get(paper_iri) if paper_iri else None
        if tool is None or paper is None:
            logger.warning("statement %s not renderable (missing tool or paper)", statement_id)
            return None
        try:
            question = render_question(statement, annotations)
            snippet = context_snippet(statement, paper, annotations)
        except (MissingSlotError, SnippetError) as exc:
            logger.warning("skipping statement %s: %s", statement_id, exc)
            return None
        return MicrotaskCard(statement_id, question, snippet, tool.value, paper.paper_id)


# -- worker simulation -------------------------------------------------------


@dataclass
class SimConfig:
    n_statements: int
    true_correct_fraction: float
    worker_accuracy: float
    votes_per_statement: int
    threshold: float = DEFAULT_THRESHOLD
    seed: int = 0


@dataclass
class SimReport:
    precision: float
    recall: float
    hidden_count: int

    def to_text(self) -> str:
        return (
            f"precision={self.precision:.6f}\n"
            f"recall={self.recall:.6f}\n"
            f"hidden_count={self.hidden_count}\n"
        )


def simulate(config: SimConfig) -> SimReport:
    """Monte Carlo of the voting loop: workers vote correctly with probability
    ``worker_accuracy`` on true statements (and err symmetrically on false
    ones); precision/recall measure the visible set against ground truth."""
    for name in ("true_correct_fraction", "worker_accuracy", "threshold"):
        value = getattr(config, name)
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be in [0, 1]")
    if config.n_statements < 1 or config.votes_per_statement < 1:
        raise ValueError("counts must be >= 1")
    rng = random.Random(config.seed)
    hidden_count = 0
    visible_true = 0
    visible_total = 0
    true_total = 0
    for _ in range(config.n_statements):
        truth = rng.random() < config.true_correct_fraction
        p_correct = config.worker_accuracy if truth else 1.0 - config.worker_accuracy
        n_correct = sum(
            rng.random() < p_correct for _ in range(config.votes_per_statement)
        )
        tally = VoteTally(
            "sim", n_correct, config.votes_per_statement - n_correct, 0
        )
        if is_hidden(score(tally), config.threshold):
            hidden_count += 1
        else:
            visible_total += 1
            visible_true += int(truth)
        true_total += int(truth)
    return SimReport(
        precision=visible_true / max(1, visible_total),
        recall=visible_true / max(1, true_total),
        hidden_count=hidden_count,
    )
