"""Pipeline orchestration CLI.

One subcommand per stage (ingest, extract, semantify, load, serve, export,
stats, simulate); state lives in the configured workspace directory. All
summaries are machine-parseable key=value lines.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import AppConfig, load_config
from .corpus import CorpusError, parse_corpus, read_papers, write_papers
from .curation import SimConfig, simulate
from .docstore import DocStore
from .extract.model import Tool
from .extract.runner import run_tools
from .graphstore import (
    GraphError,
    from_ntstar,
    ntstar_lines,
    papers_from_graph,
    stats,
    to_ntstar,
)
from .semantify import semantify_corpus
from .service import build_state, create_app


class _Ctx:
    def __init__(self, config: AppConfig) -> None:
        self.config = config


def _echo_kv(**pairs) -> None:
    for key, value in pairs.items():
        click.echo(f"{key}={value}")


def _fail(message: str) -> "click.ClickException":
    return click.ClickException(message)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Configuration file (JSON); defaults are used when omitted.",
)
@click.pass_context
def main(ctx: click.Context, config_path: Path | None) -> None:
    """Build and serve a scholarly knowledge graph with vote-based curation."""
    try:
        ctx.obj = _Ctx(load_config(config_path))
    except (OSError, ValueError) as exc:
        raise _fail(f"cannot load config: {exc}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--filter-category", "categories", multiple=True, help="Keep papers in this category (repeatable; union).")
@click.option("--source", default=None, help="Source label stamped on papers.")
@click.pass_obj
def ingest(ctx: _Ctx, input_path: Path, categories: tuple[str, ...], source: str | None) -> None:
    """Parse and normalize a corpus file into the workspace."""
    cfg = ctx.config
    try:
        with open(input_path, "rb") as fh:
            papers, errors = parse_corpus(fh, source or cfg.corpus_source)
    except (OSError, CorpusError) as exc:
        raise _fail(str(exc))
    kept = papers
    if categories:
        kept = [p for p in papers if any(c in p.categories for c in categories)]
    cfg.workspace.mkdir(parents=True, exist_ok=True)
    write_papers(kept, cfg.papers_file)
    for err in errors:
        click.echo(f"record_error line={err.line_no} reason={err.reason!r}", err=True)
    _echo_kv(
        papers_parsed=len(papers),
        record_errors=len(errors),
        papers_filtered_out=len(papers) - len(kept),
        papers_loaded=len(kept),
        papers_empty_abstract=sum(1 for p in kept if not p.abstract),
    )


@main.command()
@click.option("--tools", "tool_names", default="all", help="Comma-separated tool list or 'all'.")
@click.option("--seed", type=int, default=None, help="Deterministic run ids and timestamps.")
@click.pass_obj
def extract(ctx: _Ctx, tool_names: str, seed: int | None) -> None:
    """Run extractors over ingested papers into the document store."""
    cfg = ctx.config
    if not cfg.papers_file.exists():
        raise _fail(f"no ingested papers at {cfg.papers_file}; run ingest first")
    papers = read_papers(cfg.papers_file)
    if tool_names.strip() == "all":
        tools = list(Tool)
    else:
        try:
            tools = [Tool(name.strip()) for name in tool_names.split(",") if name.strip()]
        except ValueError as exc:
            raise _fail(str(exc))
    if seed is not None:
        cfg.extractor.seed = seed
    store = DocStore(cfg.docstore_dir)
    infos = run_tools(tools, papers, cfg.extractor, store)
    for info in infos:
        click.echo(
            f"tool={info.tool.value} run_id={info.run_id} "
            f"papers_processed={info.papers_processed} items_emitted={info.items_emitted} "
            f"duration_seconds={info.duration_seconds:.4f}"
        )


@main.command()
@click.pass_obj
def semantify(ctx: _Ctx) -> None:
    """Convert stored extraction results into statements and annotations."""
    cfg = ctx.config
    if not cfg.papers_file.exists():
        raise _fail(f"no ingested papers at {cfg.papers_file}; run ingest first")
    papers = read_papers(cfg.papers_file)
    store = DocStore(cfg.docstore_dir)
    rejected: list = []
    statements, annotations = semantify_corpus(papers, store, rejected)
    out = cfg.workspace / "semantified.nt"
    out.write_text(ntstar_lines(statements, annotations), encoding="utf-8")
    for result_id, index, reason in rejected:
        click.echo(f"rejected_item result={result_id} index={index} reason={reason!r}", err=True)
    _echo_kv(
        statements=len(statements),
        annotations=len(annotations),
        rejected_items=len(rejected),
        out=out,
    )


@main.command()
@click.pass_obj
def load(ctx: _Ctx) -> None:
    """Validate semantified output and persist the graph export."""
    cfg = ctx.config
    src = cfg.workspace / "semantified.nt"
    if not src.exists():
        raise _fail(f"no semantified statements at {src}; run semantify first")
    try:
        graph = from_ntstar(src.read_text(encoding="utf-8"))
    except GraphError as exc:
        raise _fail(str(exc))
    cfg.graph_file.write_text(to_ntstar(graph), encoding="utf-8")
    _echo_kv(
        statements_loaded=graph.statement_count(),
        annotations_loaded=graph.annotation_count(),
        out=cfg.graph_file,
    )


def _load_graph(cfg: AppConfig):
    if not cfg.graph_file.exists():
        raise _fail(f"no graph at {cfg.graph_file}; run load first")
    try:
        return from_ntstar(cfg.graph_file.read_text(encoding="utf-8"))
    except GraphError as exc:
        raise _fail(str(exc))


@main.command()
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.pass_obj
def export(ctx: _Ctx, out_path: Path) -> None:
    """Write the graph as N-Triples-star."""
    graph = _load_graph(ctx.config)
    text = to_ntstar(graph)
    out_path.write_text(text, encoding="utf-8")
    _echo_kv(lines=text.count("\n"), bytes=len(text.encode("utf-8")), out=out_path)


@main.command("stats")
@click.pass_obj
def stats_command(ctx: _Ctx) -> None:
    """Print the accounting report (metadata/statements/provenance, timings)."""
    cfg = ctx.config
    graph = _load_graph(cfg)
    runs = DocStore(cfg.docstore_dir).list_runs() if cfg.docstore_dir.exists() else []
    click.echo(stats(graph, runs).to_text(), nl=False)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--threshold", type=float, default=None, help="Override configured hiding threshold.")
@click.pass_obj
def serve(ctx: _Ctx, host: str, port: int, threshold: float | None) -> None:
    """Serve the HTTP API over the persisted graph."""
    import uvicorn

    cfg = ctx.config
    graph = _load_graph(cfg)
    runs = DocStore(cfg.docstore_dir).list_runs() if cfg.docstore_dir.exists() else []
    papers = read_papers(cfg.papers_file) if cfg.papers_file.exists() else papers_from_graph(graph)
    state = build_state(
        graph,
        papers=papers,
        runs=runs,
        threshold=cfg.threshold if threshold is None else threshold,
    )
    _echo_kv(papers=len(papers), statements=graph.statement_count(), host=host, port=port)
    uvicorn.run(create_app(state), host=host, port=port, log_level="warning")


@main.command("simulate")
@click.option("--n", "n_statements", type=int, required=True)
@click.option("--true-correct", "true_correct", type=float, required=True)
@click.option("--accuracy", type=float, required=True)
@click.option("--votes", type=int, required=True)
@click.option("--threshold", type=float, default=0.4)
@click.option("--seed", type=int, default=0)
def simulate_command(
    n_statements: int,
    true_correct: float,
    accuracy: float,
    votes: int,
    threshold: float,
    seed: int,
) -> None:
    """Simulate crowd voting and report visible-set precision/recall."""
    try:
        report = simulate(
            SimConfig(
                n_statements=n_statements,
                true_correct_fraction=true_correct,
                worker_accuracy=accuracy,
                votes_per_statement=votes,
                threshold=threshold,
                seed=seed,
            )
        )
    except ValueError as exc:
        raise _fail(str(exc))
    click.echo(report.to_text(), nl=False)


if __name__ == "__main__":
    sys.exit(main())
