"""Extraction output model: tools, results, and item schema validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Tool(str, Enum):
    TOPICS = "topics"
    ENTITY_LINKS = "entity_links"
    ABSTRACT_NER = "abstract_ner"
    TITLE_NER = "title_ner"
    SUMMARY = "summary"


SPAN_FIELDS = ("title", "abstract")


class SchemaError(ValueError):
    """An extraction record violated its tool's item schema."""

    def __init__(self, path: str, message: str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class ExtractionResult:
    """One tool's native output for one paper."""

    result_id: str
    paper_id: str
    tool: Tool
    run_id: str
    produced_at: str  # ISO-8601, logical run timestamp
    duration_seconds: float
    items: list[dict] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "result_id": self.result_id,
            "paper_id": self.paper_id,
            "tool": self.tool.value,
            "run_id": self.run_id,
            "produced_at": self.produced_at,
            "duration_seconds": self.duration_seconds,
            "items": self.items,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ExtractionResult":
        return cls(
            result_id=record["result_id"],
            paper_id=record["paper_id"],
            tool=Tool(record["tool"]),
            run_id=record["run_id"],
            produced_at=record["produced_at"],
            duration_seconds=record["duration_seconds"],
            items=record["items"],
        )


_ITEM_FIELDS: dict[Tool, dict[str, type]] = {
    Tool.TOPICS: {"topic": str, "confidence": float, "spans": list},
    Tool.ENTITY_LINKS: {
        "surface": str,
        "concept_id": str,
        "concept_label": str,
        "confidence": float,
        "spans": list,
    },
    Tool.ABSTRACT_NER: {"entity": str, "type": str, "confidence": float, "spans": list},
    Tool.TITLE_NER: {"entity": str, "type": str, "confidence": float, "spans": list},
    Tool.SUMMARY: {"summary_text": str, "sentence_indices": list, "confidence": float},
}


def _check_spans(spans: Any, path: str) -> None:
    for k, span in enumerate(spans):
        sp = f"{path}.spans[{k}]"
        if not isinstance(span, (list, tuple)) or len(span) != 3:
            raise SchemaError(sp, "span must be [field, start, end]")
        fld, start, end = span
        if fld not in SPAN_FIELDS:
            raise SchemaError(sp, f"span field must be one of {SPAN_FIELDS}")
        if not isinstance(start, int) or not isinstance(end, int) or isinstance(start, bool):
            raise SchemaError(sp, "span offsets must be integers")
        if not 0 <= start < end:
            raise SchemaError(sp, f"need 0 <= start < end, got ({start}, {end})")


def validate_items(tool: Tool, items: list[dict], path: str = "items") -> None:
    """Check item payload shape for ``tool``; raises SchemaError with a field path.

    Span upper bounds depend on the paper's text and are checked where the
    paper is in hand (extraction and semantification), not here.
    """
    fields = _ITEM_FIELDS[tool]
    for i, item in enumerate(items):
        ip = f"{path}[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(ip, "item must be an object")
        for name, typ in fields.items():
            if name not in item:
                raise SchemaError(f"{ip}.{name}", "missing field")
            value = item[name]
            if typ is float:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise SchemaError(f"{ip}.{name}", "must be a number")
            elif not isinstance(value, typ):
                raise SchemaError(f"{ip}.{name}", f"must be {typ.__name__}")
        extra = set(item) - set(fields)
        if extra:
            raise SchemaError(f"{ip}.{sorted(extra)[0]}", "unknown field")
        if not 0.0 <= float(item["confidence"]) <= 1.0:
            raise SchemaError(f"{ip}.confidence", "must be in [0, 1]")
        if "spans" in fields:
            _check_spans(item["spans"], ip)
        if tool is Tool.SUMMARY:
            for k, idx in enumerate(item["sentence_indices"]):
                if not isinstance(idx, int) or isinstance(idx, bool) or idx < 0:
                    raise SchemaError(f"{ip}.sentence_indices[{k}]", "must be a nonnegative integer")


def validate_result(result: ExtractionResult) -> None:
    if not isinstance(result.tool, Tool):
        raise SchemaError("tool", f"unknown tool {result.tool!r}")
    for name in ("result_id", "paper_id", "run_id", "produced_at"):
        if not getattr(result, name):
            raise SchemaError(name, "must be nonempty")
    validate_items(result.tool, result.items)
