"""FastAPI app implementing the alignment wire protocol.

POST /v1/align  {"pairs": [{"summary_prop": str, "doc_prop": str}, ...]}
                -> {"scores": [float, ...]}  (positional, each in [0, 1])
GET  /v1/health -> {"status": "ok", "model_id": str}

Malformed bodies get 400, oversized batches 413.
"""

from __future__ import annotations

from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from alignd.scoring import build_scorer

DEFAULT_MAX_BATCH = 128


@dataclass(frozen=True)
class ServerConfig:
    port: int = 9000
    model_id: str | None = None
    mode: str = "stub"
    max_batch: int = DEFAULT_MAX_BATCH

    def __post_init__(self):
        if self.mode not in ("stub", "model"):
            raise ValueError("mode must be 'stub' or 'model'")
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")


def _bad_request(message: str) -> JSONResponse:
    return JSONResponse(status_code=400, content={"error": message})


def _validate_pairs(body) -> list[tuple[str, str]] | str:
    """Returns the parsed pair list or an error message."""
    if not isinstance(body, dict):
        return "body must be a JSON object"
    if "pairs" not in body:
        return "missing field 'pairs'"
    pairs = body["pairs"]
    if not isinstance(pairs, list):
        return "'pairs' must be a list"
    parsed = []
    for i, pair in enumerate(pairs):
        if not isinstance(pair, dict):
            return f"pair {i} must be an object"
        for key in ("summary_prop", "doc_prop"):
            if key not in pair:
                return f"pair {i}: missing field '{key}'"
            if not isinstance(pair[key], str):
                return f"pair {i}: '{key}' must be a string"
        parsed.append((pair["summary_prop"], pair["doc_prop"]))
    return parsed


def create_app(config: ServerConfig, scorer=None) -> FastAPI:
    """Build the service; `scorer` overrides the config-derived one (tests)."""
    app = FastAPI(title="alignd", docs_url=None, redoc_url=None)
    if scorer is None:
        scorer = build_scorer(config.mode, config.model_id)
    app.state.scorer = scorer
    app.state.config = config

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "model_id": scorer.model_id}

    @app.post("/v1/align")
    async def align(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request("body is not valid JSON")
        parsed = _validate_pairs(body)
        if isinstance(parsed, str):
            return _bad_request(parsed)
        if len(parsed) > config.max_batch:
            return JSONResponse(
                status_code=413,
                content={
                    "error": f"batch of {len(parsed)} pairs exceeds the "
                             f"maximum of {config.max_batch}"
                },
            )
        return {"scores": scorer.score(parsed)}

    return app
