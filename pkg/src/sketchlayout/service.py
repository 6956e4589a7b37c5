"""Annotation service: task leasing, stroke submission, export.

A small threaded HTTP server backs the sketch-collection workflow. Tasks
(asset crops for primitives, whole layouts for full sketches) are leased to
annotators one at a time; submitted strokes are appended to a per-mode JSONL
log and fsynced before the request is acknowledged, so acknowledged records
survive restarts. The in-memory index is rebuilt by replaying the logs.

Endpoints:
    GET  /api/tasks/next?mode=<mode>&annotator=<id>
    POST /api/submissions
    GET  /api/submissions/<record_id>
    GET  /api/export?split_rule=<rule>
    GET  /            (annotation UI statics, when a UI directory is given)
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Mapping
from urllib.parse import parse_qs, urlparse

from .ink import (InkPoint, Primitive, Stroke, primitive_to_record, read_jsonl,
                  write_jsonl)
from .layout import Kind

log = logging.getLogger(__name__)

MODES = ("primitive", "full_sketch")
LEASE_SECONDS = 600.0
SPLIT_RULES = ("alternate", "all_train", "all_validation")


class ServiceError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotationTask:
    id: str
    mode: str
    target: Mapping  # asset descriptor (primitive) or {"layout_id": ...}

    def as_dict(self) -> dict:
        return {"id": self.id, "mode": self.mode, "target": dict(self.target)}


@dataclass
class _TaskState:
    task: AnnotationTask
    done: bool = False
    leased_to: str | None = None
    lease_expiry: float = 0.0


def load_tasks(path: str | Path) -> list[AnnotationTask]:
    tasks = []
    for record in read_jsonl(path):
        mode = record["mode"]
        if mode not in MODES:
            raise ServiceError(f"task {record.get('id')!r} has unknown mode {mode!r}")
        tasks.append(AnnotationTask(id=str(record["id"]), mode=mode,
                                    target=record.get("target", {})))
    if len({t.id for t in tasks}) != len(tasks):
        raise ServiceError("task ids must be unique")
    return tasks


class AnnotationStore:
    """Task queue plus append-only submission logs under one data directory."""

    def __init__(self, data_dir: str | Path,
                 tasks: list[AnnotationTask] | None = None,
                 lease_seconds: float = LEASE_SECONDS) -> None:
        self._dir = Path(data_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._lease_seconds = lease_seconds
        self._tasks: dict[str, _TaskState] = {}
        self._task_order: list[str] = []
        for task in tasks or []:
            if task.id in self._tasks:
                raise ServiceError(f"duplicate task id {task.id!r}")
            self._tasks[task.id] = _TaskState(task)
            self._task_order.append(task.id)
        self._records: dict[str, dict] = {}
        self._replay()

    def _log_path(self, mode: str) -> Path:
        return self._dir / f"submissions-{mode}.jsonl"

    def _replay(self) -> None:
        for mode in MODES:
            path = self._log_path(mode)
            if not path.exists():
                continue
            for record in read_jsonl(path):
                self._records[record["record_id"]] = record
                state = self._tasks.get(record["task_id"])
                if state is not None:
                    state.done = True

    # -- task leasing ------------------------------------------------------

    def next_task(self, mode: str, annotator: str,
                  now: float | None = None) -> AnnotationTask | None:
        if mode not in MODES:
            raise ServiceError(f"unknown mode {mode!r}")
        if not annotator:
            raise ServiceError("annotator id required")
        now = time.monotonic() if now is None else now
        with self._lock:
            for task_id in self._task_order:
                state = self._tasks[task_id]
                if state.task.mode != mode or state.done:
                    continue
                leased = (state.leased_to is not None
                          and state.lease_expiry > now
                          and state.leased_to != annotator)
                if leased:
                    continue
                state.leased_to = annotator
                state.lease_expiry = now + self._lease_seconds
                return state.task
        return None

    # -- submissions -------------------------------------------------------

    def submit(self, payload: Mapping) -> str:
        """Validate, persist (append + fsync) and mark the task done."""
        task_id = payload.get("task_id")
        annotator = payload.get("annotator")
        strokes = payload.get("strokes")
        if not task_id or not annotator:
            raise ServiceError("submission needs task_id and annotator")
        if not strokes:
            raise ServiceError("submission needs at least one stroke")
        with self._lock:
            state = self._tasks.get(task_id)
            if state is None:
                raise KeyError(task_id)
            if state.done:
                raise FileExistsError(task_id)
            if state.leased_to is not None and state.leased_to != annotator:
                if state.lease_expiry > time.monotonic():
                    raise PermissionError(
                        f"task {task_id} is leased to another annotator")
            record_id = f"rec{len(self._records):06d}"
            record = {
                "record_id": record_id,
                "task_id": task_id,
                "annotator": annotator,
                "mode": state.task.mode,
                "target": dict(state.task.target),
                "strokes": strokes,
                "stroke_durations_ms": payload.get(
                    "stroke_durations_ms",
                    [s[-1][2] - s[0][2] if len(s[0]) > 2 else 0.0
                     for s in strokes]),
                "total_ms": float(payload.get("total_ms", 0.0)),
                "received_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            }
            path = self._log_path(state.task.mode)
            with path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._records[record_id] = record
            state.done = True
            return record_id

    def get_record(self, record_id: str) -> dict:
        return self._records[record_id]

    def record_count(self) -> int:
        return len(self._records)

    # -- export ------------------------------------------------------------

    def export_pool(self, split_rule: str = "alternate"
                    ) -> tuple[list[Primitive], dict]:
        """Primitive pool from stored submissions, plus a timing summary.

        Primitive-mode strokes are normalized to the task's asset frame on
        export; points are clamped into the storage tolerance band.
        """
        if split_rule not in SPLIT_RULES:
            raise ServiceError(f"unknown split rule {split_rule!r}")
        with self._lock:
            records = [self._records[rid] for rid in sorted(self._records)]
        if not records:
            raise ServiceError("no submissions to export")
        primitives = []
        primitive_records = [r for r in records if r["mode"] == "primitive"]
        for index, record in enumerate(primitive_records):
            if split_rule == "alternate":
                split = "train" if index % 2 == 0 else "validation"
            else:
                split = "train" if split_rule == "all_train" else "validation"
            primitives.append(_record_to_primitive(record, split))
        summary = _timing_summary(records)
        return primitives, summary


def _record_to_primitive(record: Mapping, split: str) -> Primitive:
    target = record["target"]
    kind = Kind(target.get("kind", "text"))
    width = float(target.get("source_width", 1.0))
    height = float(target.get("source_height", 1.0))
    strokes = []
    for raw in record["strokes"]:
        points = []
        for p in raw:
            x = _clamp(p[0] / width if width > 0 else 0.0)
            y = _clamp(p[1] / height if height > 0 else 0.0)
            t = float(p[2]) if len(p) > 2 else 0.0
            points.append(InkPoint(x, y, t))
        strokes.append(Stroke(tuple(points)))
    return Primitive(
        id=record["record_id"],
        kind=kind,
        strokes=tuple(strokes),
        source_width=width,
        source_height=height,
        source_aspect=width / height if height > 0 else 1.0,
        source_font_size=(float(target["source_font_size"])
                          if kind is Kind.TEXT and "source_font_size" in target
                          else (height if kind is Kind.TEXT else None)),
        split=split,
    )


def _clamp(v: float, lo: float = -0.1, hi: float = 1.1) -> float:
    return min(hi, max(lo, float(v)))


def _timing_summary(records: list[Mapping]) -> dict:
    summary: dict = {"count": len(records), "modes": {}}
    for mode in MODES:
        totals = [r["total_ms"] / 1000.0 for r in records if r["mode"] == mode]
        if not totals:
            continue
        n = len(totals)
        mean = sum(totals) / n
        var = sum((v - mean) ** 2 for v in totals) / n
        durations = [
            d / 1000.0
            for r in records if r["mode"] == mode
            for d in r["stroke_durations_ms"]
        ]
        stroke_mean = sum(durations) / len(durations) if durations else 0.0
        summary["modes"][mode] = {
            "count": n,
            "mean_s": mean,
            "stddev_s": var ** 0.5,
            "mean_stroke_s": stroke_mean,
        }
    return summary


def export_pool_files(store: AnnotationStore, out_dir: str | Path,
                      split_rule: str = "alternate") -> tuple[Path, Path]:
    """Write primitives.jsonl and timing_summary.json; deterministic bytes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    primitives, summary = store.export_pool(split_rule)
    pool_path = out / "primitives.jsonl"
    summary_path = out / "timing_summary.json"
    write_jsonl(pool_path, (primitive_to_record(p) for p in primitives))
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
    return pool_path, summary_path


# --------------------------------------------------------------------------
# HTTP layer
# --------------------------------------------------------------------------

_FALLBACK_PAGE = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>annotation service</title></head>
<body><h1>Annotation service</h1>
<p>No UI build found. Point --ui-dir at the built frontend to serve it here.
The JSON API lives under <code>/api/</code>.</p></body></html>
"""


class _Handler(BaseHTTPRequestHandler):
    store: AnnotationStore
    ui_dir: Path | None = None

    # quiet down the default stderr-per-request logging
    def log_message(self, fmt: str, *args) -> None:
        log.debug("%s - %s", self.address_string(), fmt % args)

    def _send_json(self, status: int, payload: Mapping) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        url = urlparse(self.path)
        query = {k: v[0] for k, v in parse_qs(url.query).items()}
        try:
            if url.path == "/api/tasks/next":
                self._handle_next_task(query)
            elif url.path.startswith("/api/submissions/"):
                self._handle_get_submission(url.path.rsplit("/", 1)[-1])
            elif url.path == "/api/export":
                self._handle_export(query)
            else:
                self._handle_static(url.path)
        except ServiceError as exc:
            self._send_error_json(400, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            log.exception("unhandled error")
            self._send_error_json(500, str(exc))

    def do_POST(self) -> None:  # noqa: N802
        url = urlparse(self.path)
        if url.path != "/api/submissions":
            self._send_error_json(404, "unknown endpoint")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length) or b"{}")
            record_id = self.store.submit(payload)
            self._send_json(201, {"record_id": record_id})
        except KeyError as exc:
            self._send_error_json(404, f"unknown task {exc}")
        except FileExistsError as exc:
            self._send_error_json(409, f"task {exc} already submitted")
        except PermissionError as exc:
            self._send_error_json(409, str(exc))
        except (ServiceError, json.JSONDecodeError, ValueError) as exc:
            self._send_error_json(400, str(exc))

    def _handle_next_task(self, query: Mapping[str, str]) -> None:
        mode = query.get("mode", "")
        annotator = query.get("annotator", "")
        task = self.store.next_task(mode, annotator)
        if task is None:
            self._send_json(200, {"status": "none_remaining", "task": None})
        else:
            self._send_json(200, {"status": "ok", "task": task.as_dict()})

    def _handle_get_submission(self, record_id: str) -> None:
        try:
            record = self.store.get_record(record_id)
        except KeyError:
            self._send_error_json(404, f"unknown record {record_id!r}")
            return
        self._send_json(200, record)

    def _handle_export(self, query: Mapping[str, str]) -> None:
        primitives, summary = self.store.export_pool(
            query.get("split_rule", "alternate"))
        self._send_json(200, {
            "summary": summary,
            "primitives": [primitive_to_record(p) for p in primitives],
        })

    def _handle_static(self, path: str) -> None:
        if self.ui_dir is None:
            self._send_page(_FALLBACK_PAGE)
            return
        relative = path.lstrip("/") or "index.html"
        target = (self.ui_dir / relative).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) \
                or not target.is_file():
            if relative == "index.html":
                self._send_page(_FALLBACK_PAGE)
            else:
                self._send_error_json(404, "not found")
            return
        content_types = {".html": "text/html", ".js": "text/javascript",
                         ".css": "text/css", ".svg": "image/svg+xml",
                         ".png": "image/png", ".json": "application/json"}
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type",
                         content_types.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_page(self, body: bytes) -> None:
        self.send_response(200)
        self.send_header("Content-Type", "text/html")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(store: AnnotationStore, port: int = 8080,
                ui_dir: str | Path | None = None) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {
        "store": store,
        "ui_dir": Path(ui_dir) if ui_dir is not None else None,
    })
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve_forever(data_dir: str | Path, tasks_path: str | Path | None,
                  port: int = 8080, ui_dir: str | Path | None = None) -> None:
    tasks = load_tasks(tasks_path) if tasks_path else []
    store = AnnotationStore(data_dir, tasks)
    server = make_server(store, port, ui_dir)
    host, actual_port = server.server_address[:2]
    log.info("annotation service listening on http://%s:%d", host, actual_port)
    print(f"listening on http://{host}:{actual_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
