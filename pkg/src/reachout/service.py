"""Loopback JSON service over one campaign directory.

A single-threaded server doubles as the single-writer lock: every mutating
request runs to completion (including the state save) before the next is
read.  What-if requests share the read path and never touch campaign state.
On startup the event log is replayed and must reproduce the stored state
hash, otherwise the server refuses to run and reports where the chain or
state diverged.
"""

from __future__ import annotations

import json
import mimetypes
import sys
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .campaign import Campaign, load_campaign, save_campaign, tabulate_outcomes
from .errors import StateMachineError, ValidationError
from .ingest import parse_survey
from .selector import greedy_select


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class CampaignService:
    """Request-level operations; owns the campaign and its persistence."""

    def __init__(self, directory, survey_path=None):
        self.directory = Path(directory)
        self.survey_path = survey_path
        self.camp = load_campaign(directory)
        replayed = Campaign.replay(self.camp.net, self.camp.log.lines)
        if replayed.state_hash() != self.camp.state_hash():
            raise ValidationError(
                f"replay divergence: log rebuilds {replayed.state_hash()} "
                f"but state file holds {self.camp.state_hash()}")

    # -- reads -------------------------------------------------------------

    def get_network(self) -> dict:
        net = self.camp.net
        return {
            "propagation_prob": net.propagation_prob,
            "nodes": [{"id": lab} for lab in net.labels],
            "edges": [{"u": e.u, "v": e.v,
                       "existence_prob": e.existence_prob,
                       "provenance": e.provenance.value}
                      for e in net.edges],
        }

    def get_campaign(self) -> dict:
        out = self.camp.state_dict()
        out["state_hash"] = self.camp.state_hash()
        out["open_round"] = self.camp.open_round_index()
        out["exclusions"] = sorted(self.camp.exclusions())
        return out

    def get_belief(self) -> dict:
        b = self.camp.belief
        return {"per_node_prob": dict(sorted(b.per_node_prob.items())),
                "round_index": b.round_index,
                "trained": sorted(b.trained)}

    def get_report(self, complete_case: bool) -> dict:
        if not self.survey_path:
            raise ServiceError(400, "no survey file configured; start the "
                                    "server with --survey")
        records = parse_survey(self.survey_path)
        table = tabulate_outcomes(records, complete_case)
        return {"outcomes": table.to_dict(), "text": table.to_text()}

    def whatif_select(self, exclusions, k) -> dict:
        if k is None:
            k = self.camp.config.k_select
        if not isinstance(k, int) or isinstance(k, bool):
            raise ValidationError("k must be an integer")
        extra = set(exclusions or [])
        merged = self.camp.exclusions() | extra
        params = self.camp.config.selection_params(len(self.camp.rounds))
        ranked = greedy_select(self.camp.net, k, self.camp.belief, merged,
                               params)
        return {"candidates": [{"label": lab, "gain": g}
                               for lab, g in ranked.entries],
                "method": ranked.method,
                "exclusions": sorted(merged)}

    # -- mutations (single-writer: serialized by the server) ---------------

    def open_round(self) -> dict:
        ranked = self.camp.open_round()
        save_campaign(self.camp, self.directory)
        return {"round": self.camp.rounds[-1].index,
                "candidates": [{"label": lab, "gain": g}
                               for lab, g in ranked.entries]}

    def close_round(self) -> dict:
        self.camp.close_round()
        rnd = self.camp.rounds[-1]
        save_campaign(self.camp, self.directory)
        return {"round": rnd.index, "trained": sorted(rnd.trained),
                "belief": self.get_belief(),
                "state_hash": self.camp.state_hash()}

    def record_status(self, label: str, status: str) -> dict:
        self.camp.record_status(label, status)
        save_campaign(self.camp, self.directory)
        return {"round": self.camp.rounds[-1].index, "label": label,
                "status": status}

    def flush(self) -> None:
        save_campaign(self.camp, self.directory)


def make_handler(service: CampaignService, ui_dir=None):
    ui_root = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *fargs):
            pass

        def _send(self, status: int, payload: dict):
            body = json.dumps(payload, sort_keys=True).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self._cors()
            self.end_headers()
            self.wfile.write(body)

        def _cors(self):
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods",
                             "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            try:
                parsed = json.loads(self.rfile.read(length))
            except json.JSONDecodeError:
                raise ServiceError(400, "request body is not valid JSON")
            if not isinstance(parsed, dict):
                raise ServiceError(400, "request body must be a JSON object")
            return parsed

        def _static(self, path: str):
            if ui_root is None:
                raise ServiceError(404, f"unknown route {path}")
            rel = path.lstrip("/") or "index.html"
            target = (ui_root / rel).resolve()
            if not str(target).startswith(str(ui_root)) or not target.is_file():
                raise ServiceError(404, f"unknown route {path}")
            body = target.read_bytes()
            ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self._cors()
            self.end_headers()
            self.wfile.write(body)

        def _dispatch(self, method: str):
            url = urlparse(self.path)
            path = url.path.rstrip("/") or "/"
            try:
                if method == "OPTIONS":
                    self.send_response(204)
                    self._cors()
                    self.send_header("Content-Length", "0")
                    self.end_headers()
                    return
                if method == "GET":
                    if path == "/network":
                        return self._send(200, service.get_network())
                    if path == "/campaign":
                        return self._send(200, service.get_campaign())
                    if path == "/belief":
                        return self._send(200, service.get_belief())
                    if path == "/report":
                        raw = parse_qs(url.query).get("complete_case", ["false"])[0]
                        if raw not in ("true", "false", "1", "0"):
                            raise ServiceError(
                                400, "complete_case must be true or false")
                        flag = raw in ("true", "1")
                        return self._send(200, service.get_report(flag))
                    return self._static(path)
                if method == "POST":
                    if path == "/rounds/open":
                        return self._send(200, service.open_round())
                    if path == "/rounds/close":
                        return self._send(200, service.close_round())
                    if path == "/whatif/select":
                        body = self._body()
                        return self._send(200, service.whatif_select(
                            body.get("exclusions"), body.get("k")))
                    parts = path.strip("/").split("/")
                    if (len(parts) == 3 and parts[0] == "candidates"
                            and parts[2] == "status"):
                        body = self._body()
                        status = body.get("status")
                        if not isinstance(status, str):
                            raise ServiceError(400, "body must carry a status")
                        return self._send(200, service.record_status(
                            parts[1], status))
                    raise ServiceError(404, f"unknown route {path}")
                raise ServiceError(405, f"method {method} not allowed")
            except ServiceError as exc:
                self._send(exc.status, {"error": str(exc),
                                        "category": "request"})
            except ValidationError as exc:
                self._send(400, {"error": str(exc), "category": "validation"})
            except StateMachineError as exc:
                self._send(409, {"error": str(exc), "category": "state"})

        def do_GET(self):
            self._dispatch("GET")

        def do_POST(self):
            self._dispatch("POST")

        def do_OPTIONS(self):
            self._dispatch("OPTIONS")

    return Handler


def make_server(directory, host="127.0.0.1", port=0, survey_path=None,
                ui_dir=None) -> tuple[HTTPServer, CampaignService]:
    """Bound but not yet serving; port 0 picks a free port (for tests)."""
    service = CampaignService(directory, survey_path)
    httpd = HTTPServer((host, port), make_handler(service, ui_dir))
    return httpd, service


def serve(directory, host="127.0.0.1", port=8642, survey_path=None,
          ui_dir=None) -> None:
    loopback = host in ("127.0.0.1", "localhost", "::1")
    if not loopback:
        print(f"warning: binding {host} exposes the campaign beyond this "
              f"machine; there is no authentication", file=sys.stderr)
    httpd, service = make_server(directory, host, port, survey_path, ui_dir)
    print(f"serving campaign {directory} on "
          f"http://{host}:{httpd.server_address[1]}", flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        service.flush()
        httpd.server_close()
