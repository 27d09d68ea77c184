"""HTTP service exposing analyses to the review client.

Endpoints (JSON request/response bodies):

    GET  /health
    GET  /analyses
    POST /analyses                      {name?, format?, content, params?}
    GET  /analyses/{id}
    GET  /analyses/{id}/frames?start&end
    GET  /analyses/{id}/streams?ids=a,b
    GET  /analyses/{id}/incidents
    GET  /analyses/{id}/report
    POST /analyses/{id}/reevaluate      rule-set document

Pipeline runs execute off the request path; a handle transitions
pending -> complete | failed exactly once and results are immutable after
publication. Errors carry {code, message, detail}. Geometry responses are
chunked by frame range with a server-set maximum (default 600 frames).
Optional persistence keeps one document per analysis id and replays it
through the (deterministic) pipeline on restart.
"""
from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import risk
from .bvh import DEFAULT_SCALE
from .kinematics import forward_kinematics_sequence
from .motion_io import parse_mocap_text, parse_pose_interchange, write_pose_interchange
from .pipeline import AnalysisResult, _round_floats, report_to_json, run_analysis

MAX_FRAME_RANGE = 600


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: str = ""):
        super().__init__(message)
        self.status = status
        self.code = code
        self.detail = detail

    def body(self) -> dict:
        return {"code": self.code, "message": str(self), "detail": self.detail}


@dataclass
class AnalysisEntry:
    id: str
    created_at: str
    source: str
    params: dict
    status: str = "pending"  # pending | complete | failed
    diagnostic: str = ""
    parent: str | None = None
    result: AnalysisResult | None = None
    motion_doc: str | None = None  # interchange text, for persistence/replay

    def handle(self, detail: bool = False) -> dict:
        doc = {
            "id": self.id,
            "status": self.status,
            "created_at": self.created_at,
            "source": self.source,
            "parent": self.parent,
        }
        if self.status == "failed":
            doc["diagnostic"] = self.diagnostic
        if self.status == "complete" and self.result is not None:
            doc["frame_count"] = self.result.sequence.frame_count
            doc["frame_rate_hz"] = self.result.sequence.frame_rate_hz
            doc["incident_count"] = len(self.result.incidents)
            if detail:
                doc["rules"] = risk.rules_to_doc(self.result.rules)
        return doc


class AnalysisStore:
    """Thread-safe id -> entry map with optional directory persistence."""

    def __init__(self, persist_dir: str | Path | None = None):
        self._lock = threading.RLock()
        self._entries: dict[str, AnalysisEntry] = {}
        self._persist_dir = Path(persist_dir) if persist_dir else None
        if self._persist_dir:
            self._persist_dir.mkdir(parents=True, exist_ok=True)

    def new_entry(self, source: str, params: dict, parent: str | None = None) -> AnalysisEntry:
        entry = AnalysisEntry(
            id=uuid.uuid4().hex,
            created_at=datetime.now(timezone.utc).isoformat(),
            source=source,
            params=params,
            parent=parent,
        )
        with self._lock:
            self._entries[entry.id] = entry
        return entry

    def get(self, analysis_id: str) -> AnalysisEntry:
        with self._lock:
            entry = self._entries.get(analysis_id)
        if entry is None:
            raise ServiceError(404, "unknown_analysis", f"no analysis with id {analysis_id!r}")
        return entry

    def list_handles(self) -> list[dict]:
        with self._lock:
            entries = sorted(self._entries.values(), key=lambda e: (e.created_at, e.id))
        return [e.handle() for e in entries]

    def publish(self, entry: AnalysisEntry, result: AnalysisResult, motion_doc: str) -> None:
        with self._lock:
            if entry.status != "pending":
                raise RuntimeError(f"analysis {entry.id} already {entry.status}")
            entry.result = result
            entry.motion_doc = motion_doc
            entry.status = "complete"
        self._persist(entry)

    def fail(self, entry: AnalysisEntry, diagnostic: str) -> None:
        with self._lock:
            if entry.status != "pending":
                raise RuntimeError(f"analysis {entry.id} already {entry.status}")
            entry.diagnostic = diagnostic
            entry.status = "failed"

    def _persist(self, entry: AnalysisEntry) -> None:
        if not self._persist_dir or entry.status != "complete":
            return
        doc = {
            "id": entry.id,
            "created_at": entry.created_at,
            "source": entry.source,
            "params": entry.params,
            "parent": entry.parent,
            "motion": entry.motion_doc,
        }
        path = self._persist_dir / f"{entry.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc), encoding="utf-8")
        tmp.replace(path)

    def restore(self) -> int:
        """Replay persisted analyses through the pipeline. Returns count."""
        if not self._persist_dir:
            return 0
        count = 0
        for path in sorted(self._persist_dir.glob("*.json")):
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
                skeleton, seq = parse_pose_interchange(doc["motion"])
                params = doc.get("params", {})
                result = _run(skeleton, seq, doc["source"], params)
                entry = AnalysisEntry(
                    id=doc["id"],
                    created_at=doc["created_at"],
                    source=doc["source"],
                    params=params,
                    parent=doc.get("parent"),
                    status="complete",
                    result=result,
                    motion_doc=doc["motion"],
                )
                with self._lock:
                    self._entries[entry.id] = entry
                count += 1
            except (ValueError, KeyError, OSError):
                continue
        return count


def _run(skeleton, seq, source: str, params: dict) -> AnalysisResult:
    rules = risk.load_rule_set(params["rules"]) if params.get("rules") else None
    return run_analysis(
        skeleton,
        seq,
        source=source,
        body_mass_kg=float(params.get("body_mass_kg", 70.0)),
        rules=rules,
    )


class AnalysisService:
    """Owns the HTTP server, the store, and the worker threads."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        persist_dir: str | Path | None = None,
        defaults: dict | None = None,
        max_frame_range: int = MAX_FRAME_RANGE,
    ):
        self.store = AnalysisStore(persist_dir)
        self.defaults = {"body_mass_kg": 70.0, "scale": DEFAULT_SCALE, **(defaults or {})}
        self.max_frame_range = max_frame_range
        self._server = ThreadingHTTPServer((host, port), _Handler)
        self._server.service = self  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None
        self.store.restore()

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def wait(self) -> None:
        if self._thread:
            self._thread.join()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    # -- request-level operations -------------------------------------

    def create_analysis(self, payload: dict) -> dict:
        if not isinstance(payload, dict):
            raise ServiceError(400, "bad_request", "expected a JSON object")
        content = payload.get("content")
        if not isinstance(content, str) or not content:
            raise ServiceError(400, "bad_request", 'missing "content" motion document')
        params = payload.get("params") or {}
        if not isinstance(params, dict):
            raise ServiceError(400, "bad_request", '"params" must be an object')
        params = {**self.defaults, **params}
        source = payload.get("name") or "upload"
        fmt = payload.get("format") or (
            "interchange" if content.lstrip().startswith("{") else "bvh"
        )

        entry = self.store.new_entry(source=source, params=params)
        try:
            if fmt == "bvh":
                skeleton, seq = parse_mocap_text(content, scale=float(params.get("scale", DEFAULT_SCALE)))
            elif fmt == "interchange":
                skeleton, seq = parse_pose_interchange(content)
            else:
                raise ValueError(f"unsupported format {fmt!r}")
        except ValueError as e:
            self.store.fail(entry, str(e))
            return entry.handle()

        def worker():
            try:
                result = _run(skeleton, seq, source, params)
                self.store.publish(entry, result, write_pose_interchange(skeleton, seq))
            except Exception as e:  # pipeline failure -> failed handle
                self.store.fail(entry, str(e))

        threading.Thread(target=worker, daemon=True).start()
        return entry.handle()

    def reevaluate(self, analysis_id: str, ruleset_doc) -> dict:
        parent = self._complete_entry(analysis_id)
        try:
            rules = risk.load_rule_set(ruleset_doc)
        except risk.RuleValidationError as e:
            raise ServiceError(400, "invalid_rules", "rule set failed validation", str(e)) from None

        entry = self.store.new_entry(
            source=parent.source, params=parent.params, parent=parent.id
        )
        base = parent.result
        try:
            incidents = risk.evaluate_session(
                base.streams, rules, base.sequence.frame_rate_hz
            )
        except (KeyError, ValueError) as e:
            self.store.fail(entry, str(e))
            raise ServiceError(
                400, "invalid_rules", "rule set does not match the session streams", str(e)
            ) from None
        report = risk.build_report(base.report.session, incidents)
        result = AnalysisResult(
            skeleton=base.skeleton,
            sequence=base.sequence,
            streams=base.streams,
            incidents=report.incidents,
            report=report,
            rules=tuple(rules),
        )
        self.store.publish(entry, result, parent.motion_doc or "")
        return entry.handle()

    def _complete_entry(self, analysis_id: str) -> AnalysisEntry:
        entry = self.store.get(analysis_id)
        if entry.status != "complete":
            raise ServiceError(
                409, "not_complete", f"analysis {analysis_id} is {entry.status}"
            )
        return entry

    def frames_payload(self, analysis_id: str, start: int, end: int) -> dict:
        entry = self._complete_entry(analysis_id)
        seq = entry.result.sequence
        n = seq.frame_count
        if start < 0 or end < start or end >= n:
            raise ServiceError(
                400, "range", f"range [{start}, {end}] outside frames [0, {n - 1}]"
            )
        if end - start + 1 > self.max_frame_range:
            raise ServiceError(
                400,
                "range_too_large",
                f"requested {end - start + 1} frames, maximum per request is {self.max_frame_range}",
            )
        skeleton = entry.result.skeleton
        positions, orientations = forward_kinematics_sequence(skeleton, seq)
        frames = [
            {
                "positions_m": positions[f].tolist(),
                "orientations_wxyz": orientations[f].tolist(),
            }
            for f in range(start, end + 1)
        ]
        return {
            "id": entry.id,
            "start": start,
            "end": end,
            "frame_count": n,
            "frame_rate_hz": seq.frame_rate_hz,
            "joint_names": skeleton.names,
            "parents": skeleton.parents.tolist(),
            "frames": frames,
        }

    def streams_payload(self, analysis_id: str, ids: list[str] | None) -> dict:
        entry = self._complete_entry(analysis_id)
        streams = entry.result.streams
        if ids:
            unknown = [i for i in ids if i not in streams]
            if unknown:
                raise ServiceError(
                    404, "unknown_measure", f"no stream for measure ids {unknown}"
                )
            selected = [streams[i] for i in ids]
        else:
            selected = list(streams.values())
        seq = entry.result.sequence
        return _round_floats(
            {
                "id": entry.id,
                "frame_rate_hz": seq.frame_rate_hz,
                "time_s": seq.times().tolist(),
                "streams": [
                    {"id": s.measure_id, "unit": s.unit, "samples": s.samples.tolist()}
                    for s in selected
                ],
            }
        )

    def incidents_payload(self, analysis_id: str) -> dict:
        entry = self._complete_entry(analysis_id)
        return _round_floats(
            {
                "id": entry.id,
                "incidents": [i.to_dict() for i in entry.result.incidents],
            }
        )

    def report_text(self, analysis_id: str) -> str:
        entry = self._complete_entry(analysis_id)
        return report_to_json(entry.result.report)


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def service(self) -> AnalysisService:
        return self.server.service  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, body: bytes, content_type="application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, doc) -> None:
        self._send(status, (json.dumps(doc, indent=2) + "\n").encode("utf-8"))

    def _read_json(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ServiceError(400, "bad_request", "request body is not valid JSON", str(e)) from None

    def do_OPTIONS(self):  # CORS preflight for the browser client
        self._send(204, b"")

    def do_GET(self):
        try:
            self._route_get()
        except ServiceError as e:
            self._send_json(e.status, e.body())

    def do_POST(self):
        try:
            self._route_post()
        except ServiceError as e:
            self._send_json(e.status, e.body())

    def _route_get(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        query = parse_qs(url.query)

        if parts == ["health"]:
            self._send_json(200, {"status": "ok"})
            return
        if parts == ["analyses"]:
            self._send_json(200, {"analyses": self.service.store.list_handles()})
            return
        if len(parts) == 2 and parts[0] == "analyses":
            self._send_json(200, self.service.store.get(parts[1]).handle(detail=True))
            return
        if len(parts) == 3 and parts[0] == "analyses":
            analysis_id, leaf = parts[1], parts[2]
            if leaf == "frames":
                start = _int_param(query, "start", 0)
                end = _int_param(query, "end", start)
                self._send_json(200, self.service.frames_payload(analysis_id, start, end))
                return
            if leaf == "streams":
                ids_raw = ",".join(query.get("ids", []))
                ids = [i for i in ids_raw.split(",") if i] or None
                self._send_json(200, self.service.streams_payload(analysis_id, ids))
                return
            if leaf == "incidents":
                self._send_json(200, self.service.incidents_payload(analysis_id))
                return
            if leaf == "report":
                self._send(200, self.service.report_text(analysis_id).encode("utf-8"))
                return
        raise ServiceError(404, "not_found", f"no route for GET {url.path}")

    def _route_post(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        if parts == ["analyses"]:
            payload = self._read_json()
            self._send_json(201, self.service.create_analysis(payload))
            return
        if len(parts) == 3 and parts[0] == "analyses" and parts[2] == "reevaluate":
            doc = self._read_json()
            self._send_json(201, self.service.reevaluate(parts[1], doc))
            return
        raise ServiceError(404, "not_found", f"no route for POST {url.path}")


def _int_param(query: dict, key: str, default: int) -> int:
    values = query.get(key)
    if not values:
        return default
    try:
        return int(values[0])
    except ValueError:
        raise ServiceError(400, "bad_request", f"query parameter {key!r} must be an integer") from None
