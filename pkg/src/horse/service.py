"""HTTP API over an opened index.

Every response body is UTF-8 JSON. Errors use one shape —
{"error": code, "message": text, "position"?: int} — with 400 for bad
queries, 404 for unknown resources, and 503 while no index is available.
"""

from __future__ import annotations

import mimetypes
import os

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse

from . import matcher
from .config import EngineConfig, snapshot_mismatches
from .errors import EngineError, NotFound, QueryParseError, QueryTooLarge
from .index import IndexHandle, open_index
from .ingest import DEFAULT_VOCABULARY, Vocabulary
from .priors import rank_by_uniqueness
from .query import parse
from .scene import Predicate
from .serialize import graph_to_json, match_result_to_json, query_graph_to_json, report_to_json


class _Unavailable(EngineError):
    pass


class _BadRequest(EngineError):
    pass


def create_app(
    handle: IndexHandle | None = None,
    cfg: EngineConfig | None = None,
    index_dir: str | None = None,
) -> FastAPI:
    """Build the service around an opened handle or an index directory.

    If the directory cannot be opened the app still starts and answers 503
    on every data endpoint, so operators see a diagnosable service rather
    than a crash loop.
    """
    cfg = cfg or EngineConfig()
    open_error: str | None = None
    if handle is None and index_dir is not None:
        try:
            handle = open_index(index_dir)
        except EngineError as exc:
            open_error = str(exc)
    if handle is None and open_error is None:
        open_error = "no index configured"

    vocab = Vocabulary.load(cfg.vocab_path) if cfg.vocab_path else DEFAULT_VOCABULARY

    app = FastAPI(title="horse", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
    )
    app.state.handle = handle
    app.state.cfg = cfg
    app.state.anomaly_reports = None
    app.state.config_warnings = (
        snapshot_mismatches(cfg, handle.config_snapshot) if handle is not None else []
    )

    def require_handle() -> IndexHandle:
        if app.state.handle is None:
            raise _Unavailable(open_error or "index unavailable")
        return app.state.handle

    def positive_int(raw: str, name: str) -> int:
        try:
            value = int(raw)
        except ValueError:
            raise _BadRequest(f"{name} must be an integer, got {raw!r}") from None
        if value < 1:
            raise _BadRequest(f"{name} must be >= 1, got {value}")
        return value

    @app.exception_handler(QueryParseError)
    async def _parse_error(request, exc: QueryParseError):
        return JSONResponse(
            status_code=400,
            content={"error": "parse_error", "message": str(exc), "position": exc.position},
        )

    @app.exception_handler(QueryTooLarge)
    async def _too_large(request, exc: QueryTooLarge):
        return JSONResponse(status_code=400, content={"error": "query_too_large", "message": str(exc)})

    @app.exception_handler(_BadRequest)
    async def _bad_request(request, exc: _BadRequest):
        return JSONResponse(status_code=400, content={"error": "bad_request", "message": str(exc)})

    @app.exception_handler(NotFound)
    async def _not_found(request, exc: NotFound):
        return JSONResponse(status_code=404, content={"error": "not_found", "message": str(exc)})

    @app.exception_handler(_Unavailable)
    async def _unavailable(request, exc: _Unavailable):
        return JSONResponse(status_code=503, content={"error": "index_unavailable", "message": str(exc)})

    @app.exception_handler(EngineError)
    async def _engine_error(request, exc: EngineError):
        return JSONResponse(status_code=500, content={"error": "engine_error", "message": str(exc)})

    @app.get("/api/search")
    def api_search(q: str | None = None, k: str = "20", mode: str = "ranked"):
        h = require_handle()
        graph = parse(q or "", vocab)
        if mode not in ("ranked", "strict"):
            raise _BadRequest(f"mode must be 'ranked' or 'strict', got {mode!r}")
        results = matcher.search(h, graph, positive_int(k, "k"), mode)
        return {
            "results": [match_result_to_json(r) for r in results],
            "parsed": query_graph_to_json(graph),
        }

    @app.get("/api/explain")
    def api_explain(image: str | None = None, q: str | None = None):
        h = require_handle()
        if not image:
            raise _BadRequest("missing 'image' parameter")
        graph = parse(q or "", vocab)
        return match_result_to_json(matcher.explain(h, image, graph))

    @app.get("/api/images/{image_id}")
    def api_image(image_id: str):
        h = require_handle()
        return graph_to_json(h.graph(image_id))

    @app.get("/api/images/{image_id}/file")
    def api_image_file(image_id: str):
        h = require_handle()
        uri = h.graph(image_id).image_uri
        if not uri or not os.path.isfile(uri):
            raise NotFound(image_id)
        media_type = mimetypes.guess_type(uri)[0] or "application/octet-stream"
        return FileResponse(uri, media_type=media_type)

    @app.get("/api/anomalies")
    def api_anomalies(k: str = "10"):
        h = require_handle()
        if app.state.anomaly_reports is None:
            app.state.anomaly_reports = rank_by_uniqueness(
                h.priors, h.graphs, cfg.theta, cfg.uniqueness_top_k
            )
        top = app.state.anomaly_reports[: positive_int(k, "k")]
        return {"reports": [report_to_json(r) for r in top]}

    @app.get("/api/stats")
    def api_stats():
        h = require_handle()
        stats = h.stats()
        stats["config_warnings"] = list(app.state.config_warnings)
        return stats

    @app.get("/api/priors")
    def api_priors(subject: str | None = None, object: str | None = None):
        h = require_handle()
        if not subject or not object:
            raise _BadRequest("missing 'subject' or 'object' parameter")
        pair_total = h.priors.pair_totals.get((subject, object), 0)
        return {
            "subject": subject,
            "object": object,
            "pair_total": pair_total,
            "probabilities": {
                p.value: h.priors.probability(subject, p, object) for p in Predicate
            },
        }

    return app
