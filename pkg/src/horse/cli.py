"""Command-line interface.

Exit codes: 0 success, 2 malformed input (annotations, config, vocab),
3 I/O and index-format failures, 4 bad queries or unknown images.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click

from . import matcher
from .config import EngineConfig, config_to_json, load_config, snapshot_mismatches
from .errors import (
    BadGeometry,
    ConfigError,
    DuplicateImage,
    EmptyCorpus,
    EmptyScene,
    IndexCorrupt,
    IndexIoError,
    NotFound,
    ParseError,
    QueryParseError,
    QueryTooLarge,
)
from .index import build, open_index
from .ingest import (
    DEFAULT_VOCABULARY,
    GeneratorSpec,
    Vocabulary,
    generate_synthetic,
    load_annotations,
    merge_corpora,
    write_annotation_file,
)
from .priors import fit, priors_to_json, rank_by_uniqueness
from .query import parse
from .scene import Predicate
from .serialize import match_result_to_json, query_graph_to_json, report_to_json

EXIT_PARSE = 2
EXIT_IO = 3
EXIT_QUERY = 4

_GRAMMAR_HINT = (
    "queries look like: [find images with] [a] [COLOR|SHAPE|big|small]* NOUN "
    "[RELATION [a] NOUN] [and ...]"
)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    try:
        sys.stdout.flush()
    except OSError:
        # Pending output has nowhere to go (full disk, closed pipe); drop it
        # so the interpreter's exit flush cannot fail and mask *code*.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    sys.exit(code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except QueryParseError as exc:
            click.echo(f"error: {exc}", err=True)
            click.echo(_GRAMMAR_HINT, err=True)
            sys.exit(EXIT_QUERY)
        except (QueryTooLarge, NotFound) as exc:
            _fail(EXIT_QUERY, str(exc))
        except ParseError as exc:
            _fail(EXIT_PARSE, str(exc))
        except (ConfigError, BadGeometry, DuplicateImage, EmptyCorpus, EmptyScene) as exc:
            _fail(EXIT_PARSE, str(exc))
        except IndexCorrupt as exc:
            _fail(EXIT_IO, str(exc))
        except IndexIoError as exc:
            _fail(EXIT_IO, str(exc))
        except BrokenPipeError:
            # Downstream closed the pipe (e.g. `horse priors ... | head`).
            # Point stdout at devnull so the interpreter's exit flush stays
            # quiet, and report the conventional SIGPIPE status.
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
            sys.exit(128 + 13)
        except OSError as exc:
            _fail(EXIT_IO, str(exc))

    return wrapper


def _load_engine_config(config_path: str | None) -> EngineConfig:
    return load_config(config_path) if config_path else EngineConfig()


def _load_vocab(vocab_path: str | None, cfg: EngineConfig) -> Vocabulary:
    path = vocab_path or cfg.vocab_path
    return Vocabulary.load(path) if path else DEFAULT_VOCABULARY


def _open(index_dir: str, cfg: EngineConfig):
    handle = open_index(index_dir)
    for diff in snapshot_mismatches(cfg, handle.config_snapshot):
        click.echo(f"warning: config mismatch {diff}", err=True)
    return handle


@click.group()
def cli():
    """Symbolic image search over annotated scenes."""


@cli.command()
@click.option("--annotations", "annotation_files", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False), help="Annotation JSON file (repeatable).")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Index directory to create.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--vocab", "vocab_path", type=click.Path(exists=True, dir_okay=False))
@_guarded
def ingest(annotation_files, out_dir, config_path, vocab_path):
    """Load annotations, fit relation priors, and build the index."""
    cfg = _load_engine_config(config_path)
    vocab = _load_vocab(vocab_path, cfg)
    batches = []
    empty = 0
    warnings = 0
    for path in annotation_files:
        with open(path, "rb") as fh:
            result = load_annotations(
                fh, vocab, cfg.min_confidence, cfg.relations
            )
        batches.append(result.graphs)
        empty += len(result.empty_images)
        warnings += len(result.warnings)
    graphs = merge_corpora(batches)
    priors = fit(graphs, cfg.alpha)
    handle = build(graphs, priors, out_dir, config_to_json(cfg))
    s = handle.stats()
    click.echo(
        f"images={s['images']} objects={s['objects']} triples={s['triples']} terms={s['terms']}"
    )
    if empty:
        click.echo(f"empty images: {empty}", err=True)
    if warnings:
        click.echo(f"warnings: {warnings} (ignored fields or unknown attributes)", err=True)


@cli.command()
@click.argument("query")
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--k", default=20, show_default=True)
@click.option("--mode", type=click.Choice(["ranked", "strict"]), default="ranked", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable results.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@_guarded
def search(query, index_dir, k, mode, as_json, config_path):
    """Run a query and print ranked matches."""
    cfg = _load_engine_config(config_path)
    handle = _open(index_dir, cfg)
    graph = parse(query, _load_vocab(None, cfg))
    results = matcher.search(handle, graph, k, mode)
    if as_json:
        click.echo(json.dumps({
            "results": [match_result_to_json(r) for r in results],
            "parsed": query_graph_to_json(graph),
        }, indent=1))
        return
    if not results:
        click.echo("no matches")
        return
    for rank, r in enumerate(results, start=1):
        matched = "; ".join(c.description for c in r.satisfied if c.scored)
        click.echo(f"{rank}. {r.image_id} score={r.score:.3f} [{matched}]")


@cli.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--k", default=10, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@_guarded
def anomalies(index_dir, k, as_json, config_path):
    """Print the most unusual images by relation surprisal."""
    cfg = _load_engine_config(config_path)
    handle = _open(index_dir, cfg)
    reports = rank_by_uniqueness(handle.priors, handle.graphs, cfg.theta, cfg.uniqueness_top_k)[:k]
    if as_json:
        click.echo(json.dumps({"reports": [report_to_json(r) for r in reports]}, indent=1))
        return
    for r in reports:
        click.echo(f"{r.image_id} uniqueness={r.uniqueness:.3f} anomalous_triples={len(r.anomalous_triples)}")
        for s in r.anomalous_triples:
            click.echo(f"  {s.subject_label} {s.predicate.value} {s.object_label} p={s.probability:.4f}")


@cli.command()
@click.argument("query")
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--image", "image_id", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@_guarded
def explain(query, index_dir, image_id, as_json, config_path):
    """Show why one image does or does not match a query."""
    cfg = _load_engine_config(config_path)
    handle = _open(index_dir, cfg)
    graph = parse(query, _load_vocab(None, cfg))
    result = matcher.explain(handle, image_id, graph)
    if as_json:
        click.echo(json.dumps(match_result_to_json(result), indent=1))
        return
    click.echo(f"{result.image_id} score={result.score:.3f}")
    for c in result.satisfied:
        line = f"  satisfied: {c.description}"
        if c.evidence:
            line += f" {json.dumps(c.evidence, sort_keys=True)}"
        click.echo(line)
    for c in result.violated:
        line = f"  violated: {c.description}"
        if c.evidence:
            line += f" {json.dumps(c.evidence, sort_keys=True)}"
        click.echo(line)


@cli.command()
@click.option("--scenes", required=True, type=int)
@click.option("--seed", default=7, show_default=True, type=int)
@click.option("--anomaly-rate", default=0.0, show_default=True, type=float)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--labels", default=None, help="Comma-separated filler label pool.")
@_guarded
def gen(scenes, seed, anomaly_rate, out_path, labels):
    """Write a deterministic synthetic annotation file."""
    kwargs = {}
    if labels is not None:
        kwargs["label_pool"] = tuple(x.strip() for x in labels.split(",") if x.strip())
    spec = GeneratorSpec(n_scenes=scenes, seed=seed, anomaly_rate=anomaly_rate, **kwargs)
    corpus = generate_synthetic(spec)
    write_annotation_file(out_path, corpus)
    click.echo(f"scenes={scenes} anomalies={len(corpus.violations)} -> {out_path}")


@cli.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@_guarded
def serve(index_dir, host, port, config_path):
    """Serve the HTTP API over an index directory."""
    import uvicorn

    from .service import create_app

    cfg = _load_engine_config(config_path)
    handle = _open(index_dir, cfg)
    app = create_app(handle, cfg)
    uvicorn.run(app, host=host or cfg.host, port=port or cfg.port, log_level="info")


@cli.command()
@click.option("--print-defaults", is_flag=True, required=True)
@_guarded
def config(print_defaults):
    """Print the default configuration as JSON."""
    click.echo(json.dumps(config_to_json(EngineConfig()), indent=2, sort_keys=True))


@cli.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--dump", is_flag=True, help="Dump all fitted counts as JSON.")
@click.option("--subject", default=None)
@click.option("--object", "object_label", default=None)
@_guarded
def priors(index_dir, dump, subject, object_label):
    """Inspect fitted relation statistics."""
    handle = _open(index_dir, EngineConfig())
    if dump:
        click.echo(json.dumps(priors_to_json(handle.priors), indent=1))
        return
    if not subject or not object_label:
        _fail(EXIT_QUERY, "pass --dump, or both --subject and --object")
    total = handle.priors.pair_totals.get((subject, object_label), 0)
    click.echo(f"pair ({subject}, {object_label}) co-occurrences: {total}")
    for p in Predicate:
        prob = handle.priors.probability(subject, p, object_label)
        click.echo(f"  {p.value}: {prob:.4f}")


main = cli

if __name__ == "__main__":
    main()
