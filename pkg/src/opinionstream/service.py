"""HTTP surface for the interactive oracle.

Three JSON endpoints bridge the sequential experiment loop and a
labeling console: GET /api/query exposes the single pending label
request, POST /api/label answers it, GET /api/status reports progress.
Everything else is served as static console assets from a configurable
directory. Payloads carry a top-level "v" so clients can hard-fail on
format drift.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .corpus import PolarityLabel
from .harness import RunStatus
from .oracle import InteractiveOracle, StaleQueryError

logger = logging.getLogger(__name__)

PAYLOAD_VERSION = 1


def _query_payload(query) -> dict:
    return {
        "v": PAYLOAD_VERSION,
        "doc_id": query.doc_id,
        "words": list(query.words),
        "predicted": query.predicted.value,
        "score": query.score,
        "priors": {"pos": query.priors[0], "neg": query.priors[1]},
        "vocab_size": query.vocab_size,
        "kappa": query.kappa,
    }


class _Handler(BaseHTTPRequestHandler):
    """One request; the oracle and status objects do the synchronizing."""

    # Set by the server factory.
    oracle: InteractiveOracle
    status: RunStatus
    assets_dir: Path | None

    protocol_version = "HTTP/1.1"

    def log_message(self, format: str, *args) -> None:
        logger.debug("%s %s", self.address_string(), format % args)

    def _send_json(self, code: int, payload: dict) -> None:
        body = json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self) -> None:
        if self.path == "/api/query":
            query = self.oracle.current()
            if query is None:
                self.send_response(204)
                self.send_header("Content-Length", "0")
                self.end_headers()
                return
            self._send_json(200, _query_payload(query))
        elif self.path == "/api/status":
            payload = {"v": PAYLOAD_VERSION, **self.status.snapshot()}
            self._send_json(200, payload)
        else:
            self._send_static()

    def do_POST(self) -> None:
        if self.path != "/api/label":
            self._send_json(
                404, {"v": PAYLOAD_VERSION, "error": "not-found", "detail": self.path}
            )
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            data = json.loads(self.rfile.read(length) or b"{}")
            doc_id = data["doc_id"]
            raw_label = data["label"]
        except (ValueError, KeyError, TypeError) as exc:
            self._send_json(
                400,
                {"v": PAYLOAD_VERSION, "error": "bad-request", "detail": str(exc)},
            )
            return
        try:
            label = PolarityLabel(raw_label)
        except ValueError:
            self._send_json(
                400,
                {
                    "v": PAYLOAD_VERSION,
                    "error": "bad-request",
                    "detail": f"label must be 'pos' or 'neg', got {raw_label!r}",
                },
            )
            return
        if not isinstance(doc_id, int):
            self._send_json(
                400,
                {
                    "v": PAYLOAD_VERSION,
                    "error": "bad-request",
                    "detail": f"doc_id must be an integer, got {doc_id!r}",
                },
            )
            return
        try:
            self.oracle.submit(doc_id, label)
        except StaleQueryError as exc:
            self._send_json(
                409, {"v": PAYLOAD_VERSION, "error": "conflict", "detail": str(exc)}
            )
            return
        self._send_json(200, {"v": PAYLOAD_VERSION, "accepted": True, "doc_id": doc_id})

    # ------------------------------------------------------------------
    # Static console assets
    # ------------------------------------------------------------------

    def _send_static(self) -> None:
        if self.assets_dir is None:
            self._send_json(
                404,
                {
                    "v": PAYLOAD_VERSION,
                    "error": "not-found",
                    "detail": "no console assets configured",
                },
            )
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (self.assets_dir / rel).resolve()
        root = self.assets_dir.resolve()
        if root not in target.parents and target != root:
            self._send_json(
                404, {"v": PAYLOAD_VERSION, "error": "not-found", "detail": self.path}
            )
            return
        if not target.is_file():
            self._send_json(
                404, {"v": PAYLOAD_VERSION, "error": "not-found", "detail": self.path}
            )
            return
        body = target.read_bytes()
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class LabelService:
    """Owns the HTTP server thread for one serve session."""

    def __init__(
        self,
        oracle: InteractiveOracle,
        status: RunStatus,
        port: int = 0,
        assets_dir: str | Path | None = None,
    ):
        handler = type(
            "BoundHandler",
            (_Handler,),
            {
                "oracle": oracle,
                "status": status,
                "assets_dir": Path(assets_dir) if assets_dir else None,
            },
        )
        self._server = ThreadingHTTPServer(("127.0.0.1", port), handler)
        self._thread = threading.Thread(
            target=self._server.serve_forever, name="label-service", daemon=True
        )

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def start(self) -> None:
        self._thread.start()
        logger.info("label service listening on port %d", self.port)

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
