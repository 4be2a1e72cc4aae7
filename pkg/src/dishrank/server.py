"""HTTP/JSON ranking service over one frozen model.

Endpoints:
  POST /api/rank    {"dishes": [...]} or {"menu_text": "..."}, plus "key"
  GET  /api/keys    supported search keys
  GET  /api/health  format version and model metadata

The model is loaded once and never mutated, so requests are served
concurrently without locking.  Bad requests answer 400/422 with a JSON
error body; the process survives any malformed input.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .encoding import EmptyMenuError, InvalidDishError, MenuCapacityError, parse_menu_text
from .model import RankerModel
from .ranker import UnknownKeyError

MAX_BODY_BYTES = 1 << 20


class RankingServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], model: RankerModel, cors_origin: str = "*"):
        super().__init__(address, _Handler)
        self.model = model
        self.cors_origin = cors_origin


class _Handler(BaseHTTPRequestHandler):
    server: RankingServer
    protocol_version = "HTTP/1.1"

    # Silence per-request stderr logging; the CLI prints the bind address once.
    def log_message(self, fmt, *args):
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", self.server.cors_origin)
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, status: int, message: str, **extra) -> None:
        self._send_json(status, {"error": message, **extra})

    def do_OPTIONS(self):  # CORS preflight
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", self.server.cors_origin)
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        try:
            if self.path == "/api/keys":
                self._send_json(200, {"keys": self.server.model.key_names})
            elif self.path == "/api/health":
                self._send_json(200, {"status": "ok", "model": self.server.model.metadata()})
            else:
                self._send_error(404, f"no such endpoint: {self.path}")
        except Exception as exc:  # pragma: no cover - defensive catch-all
            self._send_error(500, f"internal error: {exc}")

    def do_POST(self):
        if self.path != "/api/rank":
            self._send_error(404, f"no such endpoint: {self.path}")
            return
        try:
            request = self._read_request_json()
            if request is None:
                return
            self._handle_rank(request)
        except Exception as exc:  # pragma: no cover - defensive catch-all
            self._send_error(500, f"internal error: {exc}")

    def _read_request_json(self) -> dict | None:
        length = int(self.headers.get("Content-Length") or 0)
        if length <= 0 or length > MAX_BODY_BYTES:
            self._send_error(400, "request body required (JSON), within 1 MiB")
            return None
        try:
            parsed = json.loads(self.rfile.read(length).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            self._send_error(400, f"malformed JSON body: {exc}")
            return None
        if not isinstance(parsed, dict):
            self._send_error(400, "JSON body must be an object")
            return None
        return parsed

    def _handle_rank(self, request: dict) -> None:
        model = self.server.model
        key = request.get("key")
        if not isinstance(key, str):
            self._send_error(400, "field 'key' (string) is required", keys=model.key_names)
            return

        dishes = request.get("dishes")
        menu_text = request.get("menu_text")
        try:
            if dishes is None and isinstance(menu_text, str):
                dishes = parse_menu_text(menu_text)
            if not isinstance(dishes, list) or not all(isinstance(d, str) for d in dishes):
                self._send_error(400, "provide 'dishes' (list of strings) or 'menu_text' (string)")
                return
            results = model.ranked_dishes(dishes, key)
        except UnknownKeyError:
            self._send_error(422, f"unknown search key {key!r}", keys=model.key_names)
            return
        except (InvalidDishError, EmptyMenuError, MenuCapacityError) as exc:
            self._send_error(422, str(exc))
            return
        self._send_json(200, {"key": key, "results": results, "model": model.metadata()})


def create_server(model: RankerModel, host: str = "127.0.0.1", port: int = 8080, cors_origin: str = "*") -> RankingServer:
    return RankingServer((host, port), model, cors_origin=cors_origin)
