"""Application configuration: one JSON file covering pipeline and service.

Schema (all keys optional):
{
  "workspace": "workspace",          // pipeline state directory
  "threshold": 0.40,                 // statement-hiding score threshold
  "corpus_source": "corpus",         // source label stamped on papers
  "extractors": {
    "topics_dictionary": "path.tsv",    // default: packaged topics.tsv
    "concepts_dictionary": "path.tsv",  // default: packaged concepts.tsv
    "title_type_vocabulary": [...],
    "cue_rules": [{"cues": [...], "relation": "..."}],
    "dataset_rule": true,
    "summary_sentences": 2,
    "seed": null
  }
}
Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .curation import DEFAULT_THRESHOLD
from .extract.config import ExtractorConfig


@dataclass
class AppConfig:
    workspace: Path = Path("workspace")
    threshold: float = DEFAULT_THRESHOLD
    corpus_source: str = "corpus"
    extractor: ExtractorConfig = field(
        default_factory=lambda: ExtractorConfig.from_settings({})
    )

    # pipeline artifact locations
    @property
    def papers_file(self) -> Path:
        return self.workspace / "papers.jsonl"

    @property
    def docstore_dir(self) -> Path:
        return self.workspace / "docstore"

    @property
    def graph_file(self) -> Path:
        return self.workspace / "graph.nt"


def load_config(path: Optional[Path | str] = None) -> AppConfig:
    if path is None:
        return AppConfig(extractor=ExtractorConfig.from_settings({}))
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not 0.0 <= float(raw.get("threshold", DEFAULT_THRESHOLD)) <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    workspace = Path(raw.get("workspace", "workspace"))
    if not workspace.is_absolute():
        workspace = path.parent / workspace
    return AppConfig(
        workspace=workspace,
        threshold=float(raw.get("threshold", DEFAULT_THRESHOLD)),
        corpus_source=str(raw.get("corpus_source", "corpus")),
        extractor=ExtractorConfig.from_settings(raw.get("extractors", {}), path.parent),
    )
