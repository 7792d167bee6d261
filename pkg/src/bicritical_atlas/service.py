"""HTTP facade over the classifier, renderer and analysis pipelines.

Tiles are synchronous and cacheable with strong validators; analyses run as
asynchronous jobs in a bounded worker pool (overflow queues FIFO inside the
pool's queue).
"""

from __future__ import annotations

import hashlib
import json
import uuid
from concurrent.futures import ThreadPoolExecutor
from threading import Lock

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .errors import OutOfWorld
from .records import (
    TIER_BUDGETS,
    arc_trace_records,
    classification_record,
    parse_family,
    parse_param,
    scan_record,
    visibility_record,
)
from .render import MAX_ZOOM, PALETTE_VERSION, TILE_SIZE, TileKey, WORLDS, cached_tile_png

DEFAULT_MAX_JOBS = 4


def _config_hash(max_zoom: int) -> str:
    doc = {"palette": PALETTE_VERSION, "tile": TILE_SIZE, "max_zoom": max_zoom,
           "worlds": {f.value: [c.real, c.imag, h]
                      for f, (c, h) in sorted(WORLDS.items(),
                                              key=lambda kv: kv[0].value)}}
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


class JobRegistry:
    """Single-process asynchronous jobs with bounded concurrency."""

    def __init__(self, max_jobs: int = DEFAULT_MAX_JOBS):
        self.pool = ThreadPoolExecutor(max_workers=max_jobs)
        self.lock = Lock()
        self.jobs: dict[str, dict] = {}

    def submit(self, fn, *args) -> str:
        job_id = uuid.uuid4().hex
        with self.lock:
            self.jobs[job_id] = {"status": "pending"}

        def run():
            try:
                result = fn(*args)
            except Exception as exc:
                with self.lock:
                    self.jobs[job_id] = {"status": "failed",
                                         "error": f"{type(exc).__name__}: {exc}"}
            else:
                with self.lock:
                    self.jobs[job_id] = {"status": "done", "result": result}
        self.pool.submit(run)
        return job_id

    def get(self, job_id: str) -> dict | None:
        with self.lock:
            doc = self.jobs.get(job_id)
            return None if doc is None else dict(doc)


def _bad(detail: str, code: int = 400) -> JSONResponse:
    return JSONResponse({"detail": detail}, status_code=code)


def create_app(max_zoom: int = MAX_ZOOM,
               max_jobs: int = DEFAULT_MAX_JOBS) -> FastAPI:
    app = FastAPI(title="bicritical-atlas")
    jobs = JobRegistry(max_jobs)
    cfg = _config_hash(max_zoom)

    @app.get("/tiles/{family}/{plane}/{zoom}/{x}/{y}")
    def tile(family: str, plane: str, zoom: int, x: int, y: int,
             tier: str = "standard", anchor: str | None = None):
        try:
            fam = parse_family(family)
        except ValueError as exc:
            return _bad(str(exc))
        if plane not in ("param", "dyn"):
            return _bad(f"unknown plane {plane!r}")
        if tier not in TIER_BUDGETS:
            return _bad(f"unknown tier {tier!r}")
        if zoom < 0:
            return _bad("zoom must be non-negative")
        if zoom > max_zoom:
            return _bad(f"zoom {zoom} beyond maximum {max_zoom}", 422)
        anchor_value = None
        if plane == "dyn":
            if anchor is None:
                return _bad("dynamical tiles need an anchor parameter")
            try:
                anchor_value = parse_param(anchor)
            except ValueError as exc:
                return _bad(str(exc))
        key = TileKey(fam, plane, zoom, x, y, tier, anchor_value)
        etag = '"' + hashlib.sha256(
            (key.cache_token() + cfg).encode()).hexdigest()[:32] + '"'
        try:
            data = cached_tile_png(key)
        except OutOfWorld as exc:
            return _bad(str(exc), 404)
        return Response(content=data, media_type="image/png",
                        headers={"ETag": etag})

    @app.get("/classify")
    def classify_endpoint(family: str, param: str, tier: str = "standard"):
        try:
            fam = parse_family(family)
            value = parse_param(param)
        except ValueError as exc:
            return _bad(str(exc))
        if tier not in TIER_BUDGETS:
            return _bad(f"unknown tier {tier!r}")
        record = classification_record(fam, value, tier)
        return {"parameter": record["parameter"], "classification": record,
                "nearest_center": None, "parabolic": None}

    @app.post("/analyze", status_code=202)
    async def analyze(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad("body is not valid JSON")
        if not isinstance(body, dict):
            return _bad("body must be a JSON object")
        kind = body.get("kind")
        try:
            fam = parse_family(body.get("family", ""))
            if kind == "visibility":
                value = _as_complex(body["param"])
                job_id = jobs.submit(visibility_record, fam, value)
            elif kind == "arc-trace":
                job_id = jobs.submit(arc_trace_records, fam,
                                     _as_complex(body["center"]),
                                     _as_complex(body["direction"]),
                                     int(body["period"]),
                                     [float(t) for t in body["targets"]])
            elif kind == "scan":
                job_id = jobs.submit(scan_record, fam,
                                     _as_complex(body["center"]),
                                     _as_complex(body["direction"]),
                                     int(body["period"]),
                                     [float(t) for t in body["targets"]],
                                     float(body.get("window", 1e-2)))
            else:
                return _bad(f"unknown analysis kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            return _bad(f"invalid body: {exc}")
        return {"id": job_id, "status": "pending"}

    @app.get("/analyze/{job_id}")
    def job_status(job_id: str):
        doc = jobs.get(job_id)
        if doc is None:
            return _bad(f"unknown job {job_id!r}", 404)
        return doc

    return app


def _as_complex(value) -> complex:
    if isinstance(value, str):
        return parse_param(value)
    re_v, im_v = value
    return complex(float(re_v), float(im_v))


def serve(port: int = 8000, cache_dir: str | None = None,
          max_zoom: int = MAX_ZOOM) -> None:
    import os

    import uvicorn
    if cache_dir is not None:
        os.environ["ATLAS_CACHE_DIR"] = cache_dir
    uvicorn.run(create_app(max_zoom=max_zoom), host="127.0.0.1", port=port)
