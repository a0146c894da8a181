"""Interactive human judging: a task queue behind a local HTTP API.

The server hands out one pending task at a time, accepts verdicts in
blind option terms, translates them back into method terms, and appends
each accepted record to a JSONL file with an fsync before acknowledging.
Restarting the server on the same records file resumes exactly where
the previous session stopped. When every task is judged the server
shuts itself down.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from pathlib import Path
from typing import Sequence
from urllib.parse import parse_qs, urlparse

from ..errors import (
    DuplicateVerdict,
    TexcurveError,
    UnknownTask,
)
from .judges import option_to_winner
from .records import append_record, record_from_dict
from .types import ComparisonRecord, ComparisonTask, JudgeVerdict, record_from_verdict

logger = logging.getLogger(__name__)

WIRE_CHOICES = ("option1", "option2", "tie")


def load_instruction(dimension: str) -> str:
    """Human-readable one-paragraph instruction for a judging dimension."""
    name = f"{dimension}.human.txt"
    return (resources.files("texcurve") / "prompts" / name).read_text(
        encoding="utf-8"
    ).strip()


class HumanQueue:
    """Pending/judged bookkeeping over a fixed task list; thread-safe.

    The queue always serves the first pending task in list order, so
    refreshing a client without submitting shows the same task again.
    """

    def __init__(
        self,
        tasks: Sequence[ComparisonTask],
        judge_id: str = "human",
        done_records: Sequence[ComparisonRecord] = (),
    ):
        ids = [t.task_id for t in tasks]
        if len(set(ids)) != len(ids):
            raise ValueError("task ids must be unique")
        self._tasks = list(tasks)
        self._by_id = {t.task_id: t for t in self._tasks}
        self._judge_id = judge_id
        self._done: dict[str, ComparisonRecord] = {}
        self._lock = threading.Lock()
        for record in done_records:
            if record.task_id not in self._by_id:
                raise TexcurveError(
                    f"records file holds unknown task id {record.task_id!r}; "
                    "it does not belong to this task list"
                )
            self._done[record.task_id] = record

    @property
    def judge_id(self) -> str:
        return self._judge_id

    @property
    def tasks(self) -> list[ComparisonTask]:
        return list(self._tasks)

    def dimensions(self) -> list[str]:
        seen: dict[str, None] = {}
        for t in self._tasks:
            seen.setdefault(t.dimension)
        return list(seen)

    def get_task(self, task_id: str) -> ComparisonTask:
        try:
            return self._by_id[task_id]
        except KeyError:
            raise UnknownTask(f"no task with id {task_id!r}") from None

    def next_pending(self, dimension: str | None = None) -> ComparisonTask | None:
        with self._lock:
            for task in self._tasks:
                if task.task_id in self._done:
                    continue
                if dimension is not None and task.dimension != dimension:
                    continue
                return task
        return None

    def submit(self, task_id: str, choice: str) -> ComparisonRecord:
        """Record a verdict given in blind option terms.

        Raises :class:`UnknownTask` for an id outside the session,
        :class:`DuplicateVerdict` for an already-judged task, and
        ``ValueError`` for a choice outside ``option1/option2/tie``.
        """
        if choice not in WIRE_CHOICES:
            raise ValueError(f"choice must be one of {WIRE_CHOICES}")
        with self._lock:
            task = self.get_task(task_id)
            if task_id in self._done:
                raise DuplicateVerdict(f"task {task_id!r} already has a verdict")
            winner = option_to_winner(choice, task.position_swapped)
            record = record_from_verdict(
                task, JudgeVerdict(winner=winner, judge_id=self._judge_id)
            )
            self._done[task_id] = record
            return record

    def _retract(self, task_id: str) -> None:
        # undo an accepted verdict whose persistence failed
        with self._lock:
            self._done.pop(task_id, None)

    def progress(self) -> dict:
        with self._lock:
            by_dim: dict[str, dict[str, int]] = {}
            for task in self._tasks:
                slot = by_dim.setdefault(task.dimension, {"total": 0, "done": 0})
                slot["total"] += 1
                if task.task_id in self._done:
                    slot["done"] += 1
            done = len(self._done)
            return {
                "total": len(self._tasks),
                "done": done,
                "remaining": len(self._tasks) - done,
                "by_dimension": by_dim,
            }

    @property
    def remaining(self) -> int:
        with self._lock:
            return len(self._tasks) - len(self._done)

    def records(self) -> list[ComparisonRecord]:
        with self._lock:
            return [
                self._done[t.task_id] for t in self._tasks if t.task_id in self._done
            ]


def _load_resumable(path: Path) -> tuple[list[ComparisonRecord], int]:
    """Read a records file, tolerating a torn final line.

    Returns the intact records and the byte offset up to which the file
    is trustworthy; a partial or unparseable final line (the signature
    of a hard kill mid-write) is excluded from both. Corruption before
    the final line is refused outright.
    """
    records: list[ComparisonRecord] = []
    offset = 0
    with open(path, "rb") as fh:
        lines = fh.readlines()
    for i, line in enumerate(lines):
        is_last = i == len(lines) - 1
        stripped = line.strip()
        if line.endswith(b"\n") and stripped:
            try:
                records.append(record_from_dict(json.loads(stripped.decode("utf-8"))))
                offset += len(line)
                continue
            except (ValueError, TexcurveError) as exc:
                if not is_last:
                    raise TexcurveError(
                        f"records file {path} is corrupt at line {i + 1}: {exc}"
                    ) from exc
        elif not stripped:
            offset += len(line)
            continue
        if not is_last:
            raise TexcurveError(f"records file {path} is corrupt at line {i + 1}")
        logger.warning("dropping torn final line of %s", path)
        break
    return records, offset


_FALLBACK_PAGE = """<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>Pairwise judging</title>
<style>
body{font-family:sans-serif;margin:1rem;max-width:1400px}
img{max-width:100%;border:1px solid #999}
button{font-size:1.1rem;padding:.5rem 1.5rem;margin-right:1rem}
#status{color:#555;margin:.5rem 0}
</style></head><body>
<h2>Pairwise judging</h2>
<p id="instruction"></p>
<div id="status"></div>
<div>
<button onclick="choose('option1')">[1] Option 1</button>
<button onclick="choose('tie')">[space] Tie</button>
<button onclick="choose('option2')">[2] Option 2</button>
</div>
<p><img id="grid" alt=""></p>
<script>
let current=null;
async function refresh(){
  const r=await fetch('/api/next');
  const body=await r.json();
  current=body.task;
  const s=document.getElementById('status');
  if(!current){s.textContent='All '+body.total+' comparisons are judged. Thank you.';
    document.getElementById('grid').removeAttribute('src');
    document.getElementById('instruction').textContent='';return}
  s.textContent=(body.done+1)+' of '+body.total;
  document.getElementById('instruction').textContent=current.instruction;
  document.getElementById('grid').src=current.grid_url;
}
async function choose(c){
  if(!current)return;
  await fetch('/api/verdict',{method:'POST',headers:{'Content-Type':'application/json'},
    body:JSON.stringify({task_id:current.task_id,winner:c})});
  await refresh();
}
document.addEventListener('keydown',e=>{
  if(e.key==='1')choose('option1');
  else if(e.key==='2')choose('option2');
  else if(e.key===' '){e.preventDefault();choose('tie')}
});
refresh();
</script></body></html>
"""

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
    ".map": "application/json",
    ".json": "application/json",
}


class _JudgingHTTPServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def app(self) -> "JudgingServer":
        return self.server.app  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):
        logger.debug("%s " + fmt, self.client_address[0], *args)

    def _send_json(self, code: int, obj: dict) -> None:
        body = json.dumps(obj).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        self.wfile.flush()

    def _send_bytes(self, code: int, body: bytes, content_type: str) -> None:
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        self.wfile.flush()

    def _task_payload(self, task: ComparisonTask) -> dict:
        return {
            "task_id": task.task_id,
            "dimension": task.dimension,
            "sample_id": task.sample_id,
            "grid_url": f"/api/grid/{task.task_id}.png",
            "instruction": self.app.instruction_for(task.dimension),
        }

    def do_GET(self):
        url = urlparse(self.path)
        route = url.path
        app = self.app
        if route == "/api/session":
            progress = app.queue.progress()
            self._send_json(
                200,
                {
                    "judge_id": app.queue.judge_id,
                    "dimensions": app.queue.dimensions(),
                    "total": progress["total"],
                    "done": progress["done"],
                },
            )
        elif route == "/api/next":
            query = parse_qs(url.query)
            dimension = query.get("dimension", [None])[0]
            if dimension is not None and dimension not in app.queue.dimensions():
                self._send_json(400, {"error": f"unknown dimension {dimension!r}"})
                return
            task = app.queue.next_pending(dimension)
            progress = app.queue.progress()
            self._send_json(
                200,
                {
                    "task": self._task_payload(task) if task else None,
                    "done": progress["done"],
                    "total": progress["total"],
                },
            )
        elif route == "/api/progress":
            self._send_json(200, app.queue.progress())
        elif route.startswith("/api/grid/"):
            self._serve_grid(route)
        else:
            self._serve_static(route)

    def do_POST(self):
        if urlparse(self.path).path != "/api/verdict":
            self._send_json(404, {"error": "unknown endpoint"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length).decode("utf-8"))
            task_id = payload["task_id"]
            choice = payload["winner"]
        except (ValueError, KeyError, UnicodeDecodeError) as exc:
            self._send_json(400, {"error": f"malformed verdict body: {exc}"})
            return
        try:
            record = self.app.submit(task_id, choice)
        except UnknownTask as exc:
            self._send_json(404, {"error": str(exc)})
            return
        except DuplicateVerdict as exc:
            self._send_json(409, {"error": str(exc)})
            return
        except ValueError as exc:
            self._send_json(400, {"error": str(exc)})
            return
        progress = self.app.queue.progress()
        self._send_json(
            200,
            {
                "accepted": True,
                "task_id": record.task_id,
                "done": progress["done"],
                "total": progress["total"],
                "remaining": progress["remaining"],
            },
        )
        if progress["remaining"] == 0:
            self.app.request_shutdown(grace_s=0.5)

    def _serve_grid(self, route: str) -> None:
        name = route[len("/api/grid/"):]
        if not name.endswith(".png"):
            self._send_json(404, {"error": "grid not found"})
            return
        try:
            task = self.app.queue.get_task(name[: -len(".png")])
        except UnknownTask:
            self._send_json(404, {"error": "grid not found"})
            return
        try:
            body = Path(task.grid_path).read_bytes()
        except OSError as exc:
            self._send_json(500, {"error": f"cannot read grid image: {exc}"})
            return
        self._send_bytes(200, body, "image/png")

    def _serve_static(self, route: str) -> None:
        if route in ("", "/"):
            route = "/index.html"
        ui_dir = self.app.ui_dir
        if ui_dir is None:
            if route == "/index.html":
                self._send_bytes(200, _FALLBACK_PAGE.encode("utf-8"), _CONTENT_TYPES[".html"])
            else:
                self._send_json(404, {"error": "not found"})
            return
        root = Path(ui_dir).resolve()
        target = (root / route.lstrip("/")).resolve()
        if root not in target.parents and target != root:
            self._send_json(404, {"error": "not found"})
            return
        if not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send_bytes(200, target.read_bytes(), ctype)


class JudgingServer:
    """HTTP front door for one judging session.

    Construction loads any existing records file and counts its
    verdicts as done; :meth:`serve_forever` then blocks until the queue
    empties (or :meth:`request_shutdown` is called) and finally closes
    the records file.
    """

    def __init__(
        self,
        tasks: Sequence[ComparisonTask],
        records_path: str | Path,
        host: str = "127.0.0.1",
        port: int = 8008,
        judge_id: str = "human",
        ui_dir: str | None = None,
    ):
        records_path = Path(records_path)
        done: list[ComparisonRecord] = []
        trusted = 0
        if records_path.exists():
            done, trusted = _load_resumable(records_path)
        self.queue = HumanQueue(tasks, judge_id=judge_id, done_records=done)
        self.ui_dir = ui_dir
        self._instructions = {d: load_instruction(d) for d in self.queue.dimensions()}
        records_path.parent.mkdir(parents=True, exist_ok=True)
        self._records_fh = open(records_path, "a", encoding="utf-8")
        if records_path.stat().st_size > trusted:
            self._records_fh.truncate(trusted)
        self._write_lock = threading.Lock()
        self._httpd = _JudgingHTTPServer((host, port), _Handler)
        self._httpd.app = self  # type: ignore[attr-defined]
        self._shutdown_started = False
        self._shutdown_lock = threading.Lock()

    @property
    def address(self) -> tuple[str, int]:
        return self._httpd.server_address[0], self._httpd.server_address[1]

    def instruction_for(self, dimension: str) -> str:
        return self._instructions[dimension]

    def submit(self, task_id: str, choice: str) -> ComparisonRecord:
        """Accept one verdict and persist it before acknowledging."""
        record = self.queue.submit(task_id, choice)
        try:
            with self._write_lock:
                append_record(self._records_fh, record)
        except OSError:
            self.queue._retract(task_id)
            raise
        return record

    def request_shutdown(self, grace_s: float = 0.0) -> None:
        with self._shutdown_lock:
            if self._shutdown_started:
                return
            self._shutdown_started = True

        def stop():
            # let clients that raced the final verdict read their reply
            if grace_s > 0.0:
                time.sleep(grace_s)
            self._httpd.shutdown()

        threading.Thread(target=stop, daemon=True).start()

    def serve_forever(self) -> None:
        try:
            self._httpd.serve_forever(poll_interval=0.05)
        finally:
            self._httpd.server_close()
            self._records_fh.close()

    def close(self) -> None:
        self.request_shutdown()
        self._httpd.server_close()
        if not self._records_fh.closed:
            self._records_fh.close()
