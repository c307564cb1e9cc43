"""Extractor configuration: dictionaries, vocabularies, and cue rules."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .gazetteer import Dictionary, load_dictionary

DEFAULT_TITLE_TYPES = (
    "method",
    "methodology",
    "framework",
    "system",
    "tool",
    "dataset",
    "benchmark",
    "model",
    "algorithm",
    "approach",
)


@dataclass(frozen=True)
class CueRule:
    """Cue phrases mapped to a verb relation ("This paper {relation} {entity}")."""

    cues: tuple[str, ...]
    relation: str


DEFAULT_CUE_RULES = (
    CueRule(("we propose", "we present", "we introduce"), "presents"),
    CueRule(("we use", "using", "based on"), "uses"),
    CueRule(("we evaluate on", "evaluated on"), "evaluates on"),
)

DATASET_RELATION = "uses dataset"


class MissingDictionaryError(KeyError):
    def __init__(self, name: str) -> None:
        self.dictionary = name
        super().__init__(f"extractor needs dictionary {name!r} but none is configured")


def _packaged(name: str) -> Path:
    return Path(str(resources.files("scholargraph.data").joinpath(name)))


@dataclass
class ExtractorConfig:
    topics_dictionary: Dictionary | None = None
    concepts_dictionary: Dictionary | None = None
    title_type_vocabulary: tuple[str, ...] = DEFAULT_TITLE_TYPES
    cue_rules: tuple[CueRule, ...] = DEFAULT_CUE_RULES
    dataset_rule: bool = True
    summary_sentences: int = 2
    seed: int | None = None

    def require_dictionary(self, which: str) -> Dictionary:
        dictionary = getattr(self, f"{which}_dictionary")
        if dictionary is None:
            raise MissingDictionaryError(which)
        return dictionary

    def digest(self) -> str:
        """Stable content hash over everything that shapes extraction output."""
        payload = {
            "topics": _dict_payload(self.topics_dictionary),
            "concepts": _dict_payload(self.concepts_dictionary),
            "title_types": list(self.title_type_vocabulary),
            "cues": [[list(r.cues), r.relation] for r in self.cue_rules],
            "dataset_rule": self.dataset_rule,
            "k": self.summary_sentences,
        }
        blob = json.dumps(payload, sort_keys=True, ensure_ascii=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    @classmethod
    def from_settings(cls, settings: dict, base_dir: Path | None = None) -> "ExtractorConfig":
        """Build from the ``extractors`` section of the configuration file.

        Omitted dictionary paths fall back to the packaged defaults; relative
        paths resolve against ``base_dir`` (the config file's directory).
        """

        def resolve(key: str, default_name: str) -> Dictionary:
            raw = settings.get(key)
            if raw is None:
                return load_dictionary(_packaged(default_name), name=default_name.split(".")[0])
            path = Path(raw)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return load_dictionary(path)

        cue_rules = tuple(
            CueRule(tuple(entry["cues"]), entry["relation"])
            for entry in settings.get("cue_rules", [])
        ) or DEFAULT_CUE_RULES
        return cls(
            topics_dictionary=resolve("topics_dictionary", "topics.tsv"),
            concepts_dictionary=resolve("concepts_dictionary", "concepts.tsv"),
            title_type_vocabulary=tuple(
                settings.get("title_type_vocabulary", DEFAULT_TITLE_TYPES)
            ),
            cue_rules=cue_rules,
            dataset_rule=bool(settings.get("dataset_rule", True)),
            summary_sentences=int(settings.get("summary_sentences", 2)),
            seed=settings.get("seed"),
        )


def _dict_payload(dictionary: Dictionary | None) -> list | None:
    if dictionary is None:
        return None
    return [
        [e.surface, e.canonical_id, e.canonical_label] for e in dictionary.entries
    ] + [["max_ngram", str(dictionary.max_ngram), ""]]
