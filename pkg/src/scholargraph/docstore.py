"""Append-only document store for native extraction results.

Layout: one newline-delimited record file per (tool, run_id) plus a manifest
per run, written last. A fresh open only surfaces runs whose manifest exists;
writes made through this handle are visible to it immediately.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterator, Optional

from .extract.model import ExtractionResult, Tool, validate_result


@dataclass
class RunInfo:
    run_id: str
    tool: Tool
    started_at: float
    finished_at: float
    papers_processed: int
    items_emitted: int
    duration_seconds: float

    def __post_init__(self) -> None:
        if self.finished_at < self.started_at:
            raise ValueError("finished_at must be >= started_at")
        if min(self.papers_processed, self.items_emitted) < 0:
            raise ValueError("counts must be >= 0")

    def to_record(self) -> dict:
        record = asdict(self)
        record["tool"] = self.tool.value
        return record

    @classmethod
    def from_record(cls, record: dict) -> "RunInfo":
        record = dict(record)
        record["tool"] = Tool(record["tool"])
        return cls(**record)


class DocStoreError(Exception):
    pass


class ConflictingResultError(DocStoreError):
    """A (paper_id, tool, run_id) key was re-put with different content."""


class DocStore:
    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        # (paper_id, tool_value, run_id) -> result record
        self._results: dict[tuple[str, str, str], dict] = {}
        self._runs: dict[tuple[str, str], RunInfo] = {}
        self._load()

    def _run_file(self, tool: Tool, run_id: str) -> Path:
        return self.root / tool.value / f"{run_id}.jsonl"

    def _manifest_file(self, tool: Tool, run_id: str) -> Path:
        return self.root / tool.value / f"{run_id}.manifest.json"

    def _load(self) -> None:
        for manifest in sorted(self.root.glob("*/*.manifest.json")):
            with open(manifest, "r", encoding="utf-8") as fh:
                info = RunInfo.from_record(json.load(fh))
            self._runs[(info.tool.value, info.run_id)] = info
            data = self._run_file(info.tool, info.run_id)
            if not data.exists():
                continue
            with open(data, "r", encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    record = json.loads(line)
                    key = (record["paper_id"], record["tool"], record["run_id"])
                    self._results[key] = record

    def put_result(self, result: ExtractionResult) -> str:
        """Persist a result append-only; identical re-puts are no-ops."""
        validate_result(result)
        record = result.to_record()
        key = (result.paper_id, result.tool.value, result.run_id)
        existing = self._results.get(key)
        if existing is not None:
            if _same_payload(existing, record):
                return existing["result_id"]
            raise ConflictingResultError(
                f"result for {key} already stored with different content"
            )
        path = self._run_file(result.tool, result.run_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
        self._results[key] = record
        return result.result_id

    def finish_run(self, info: RunInfo) -> None:
        """Commit a run by writing its manifest atomically (tmp + rename)."""
        path = self._manifest_file(info.tool, info.run_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(info.to_record(), fh, sort_keys=True)
        os.replace(tmp, path)
        self._runs[(info.tool.value, info.run_id)] = info

    def get_results(
        self, paper_id: str, tool: Optional[Tool] = None
    ) -> list[ExtractionResult]:
        """All stored results for a paper, ordered by (tool, run_id)."""
        picked = [
            record
            for (pid, tool_value, _run), record in self._results.items()
            if pid == paper_id and (tool is None or tool_value == tool.value)
        ]
        picked.sort(key=lambda r: (r["tool"], r["run_id"]))
        return [ExtractionResult.from_record(r) for r in picked]

    def iter_results(self) -> Iterator[ExtractionResult]:
        """Every stored result, ordered by (tool, run_id, paper_id)."""
        for key in sorted(self._results, key=lambda k: (k[1], k[2], k[0])):
            yield ExtractionResult.from_record(self._results[key])

    def list_runs(self) -> list[RunInfo]:
        return [self._runs[key] for key in sorted(self._runs)]

    def __len__(self) -> int:
        return len(self._results)


def _same_payload(a: dict, b: dict) -> bool:
    # duration is a measurement, not content; identical re-runs may differ
    strip = ("duration_seconds",)
    return {k: v for k, v in a.items() if k not in strip} == {
        k: v for k, v in b.items() if k not in strip
    }
