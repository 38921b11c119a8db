"""HTTP analysis service: POST /v1/analyze and GET /healthz.

Responses are byte-identical to batch analysis of the same text: both
paths serialize through the same canonical record formatter.  Requests
are serialized through a lock; there is one model instance.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .analyze import AnalysisError, Analyzer


class _Handler(BaseHTTPRequestHandler):
    server_version = "lmdump"

    def _send(self, status: int, payload: str) -> None:
        data = payload.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: int, message: str) -> None:
        self._send(status, json.dumps({"error": message}))

    def do_GET(self):
        if self.path == "/healthz":
            self._send(
                200,
                json.dumps(
                    {"status": "ok", "checkpoint": self.server.analyzer.config.checkpoint}
                ),
            )
        else:
            self._error(404, f"no route {self.path}")

    def do_POST(self):
        if self.path != "/v1/analyze":
            self._error(404, f"no route {self.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            self._error(400, "body must be JSON: {\"text\": string}")
            return
        if not isinstance(body, dict) or not isinstance(body.get("text"), str):
            self._error(400, "body must be JSON: {\"text\": string}")
            return
        if not body["text"]:
            self._error(400, "text must be non-empty")
            return
        doc_id = body.get("doc_id", "doc")
        try:
            with self.server.model_lock:
                record = self.server.analyzer.analyze(body["text"], doc_id=str(doc_id))
        except AnalysisError as exc:
            self._error(400, str(exc))
            return
        except Exception as exc:  # model failure
            self._error(500, f"model failure: {exc}")
            return
        self._send(200, record.to_json_line())

    def log_message(self, *args):
        pass


class AnalysisServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], analyzer: Analyzer):
        super().__init__(address, _Handler)
        self.analyzer = analyzer
        self.model_lock = threading.Lock()


def serve(analyzer: Analyzer, host: str = "127.0.0.1", port: int = 8321) -> None:
    server = AnalysisServer((host, port), analyzer)
    print(f"serving {analyzer.config.checkpoint} on http://{host}:{server.server_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
