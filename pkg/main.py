"""HTTP/WebSocket front end for the extended Boussinesq studies.

This module exposes a FastAPI app that:
- Lists the registered studies with their YAML config templates.
- Runs a study as a background job and lets clients poll or abort it.
- Publishes job lifecycle events and log records over a WebSocket stream.
- Records every finished, failed or aborted job in the run ledger
  (`xbouss.ledger`, SQLite under XBOUSS_DATA_DIR).

Studies are blocking numerical code, so each job runs on a worker thread; an
abort cancels the job task and sets the study's cancel flag, which the study
honours at its next checkpoint.

Start with an ASGI server, e.g. `uvicorn main:app`.
"""

import asyncio
import logging
import re
import threading
import time
import traceback
import uuid
from contextlib import asynccontextmanager
from typing import Any, Dict, Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware

from studies import discover_studies
from studies.study import StudyAborted, StudyWrapper
from xbouss import ledger, settings
from xbouss.errors import LabError
from xbouss.logs import LOG_FORMAT, setup_logging
from xbouss.output import jsonable

logger = logging.getLogger("service")


class WebLogHandler(logging.Handler):
    """Root logger handler that mirrors log records to WebSocket clients.

    Records may come from job worker threads, so events are handed to the
    event loop captured at startup.
    """

    def __init__(self, loop: asyncio.AbstractEventLoop):
        super().__init__()
        self.loop = loop

    def emit(self, record: logging.LogRecord) -> None:
        try:
            msg = self.format(record)
            # Drop noisy polling logs
            if msg.startswith("GET /jobs") or msg.startswith("GET /studies"):
                return
            m = re.search(r"Job\s+([0-9a-f]{12})", msg)
            event = {
                "type": "log",
                "job_id": m.group(1) if m else None,
                "level": record.levelname,
                "message": msg,
            }
            if not self.loop.is_closed():
                self.loop.call_soon_threadsafe(lambda: self.loop.create_task(publish(event)))
        except Exception:
            pass


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Logging, ledger and WebSocket log forwarding for the lifetime of the app."""
    setup_logging(logging.INFO, log_dir=settings.log_dir())
    logger.info("Starting xbouss service...")
    ledger.init()

    handler = WebLogHandler(asyncio.get_running_loop())
    handler.setLevel(logging.INFO)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.getLogger().addHandler(handler)
    logger.info("Service ready with %d studies: %s", len(study_registry), sorted(study_registry))

    yield

    logger.info("Shutdown: cancelling %d jobs", sum(1 for t in running_tasks.values() if not t.done()))
    for job_id, task in list(running_tasks.items()):
        cancel_flags[job_id].set()
        task.cancel()
    logging.getLogger().removeHandler(handler)


app = FastAPI(lifespan=lifespan)
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

study_registry: Dict[str, StudyWrapper] = discover_studies()

# Job records (status, config, results) and their tasks by job id
jobs: Dict[str, Dict[str, Any]] = {}
running_tasks: Dict[str, asyncio.Task] = {}
cancel_flags: Dict[str, threading.Event] = {}

# Finished/failed/aborted jobs kept for polling; older ones are dropped (the ledger keeps them)
MAX_FINISHED_JOBS = 64

# Set of active WebSocket connections for broadcasting events
event_subscribers: set[WebSocket] = set()


async def publish(event: Dict[str, Any]) -> None:
    """Broadcast an event to all WebSocket subscribers, dropping dead ones."""
    dead = []
    for ws in list(event_subscribers):
        try:
            # Time-bound to avoid blocking under backpressure
            await asyncio.wait_for(ws.send_json(event), timeout=0.2)
        except Exception as e:
            logger.debug("publish: send failed, marking subscriber dead: %s", e)
            dead.append(ws)
    for ws in dead:
        event_subscribers.discard(ws)
    if dead:
        logger.info("publish: removed %d dead subscribers", len(dead))


async def publish_job_event(event_type: str, job_id: str, study_name: str, error: Optional[str] = None) -> None:
    event = {"type": event_type, "job_id": job_id, "study": study_name}
    if error:
        event["error"] = error
    await publish(event)


def _record_run(job: Dict[str, Any], ok: bool, started: float, error_text: Optional[str] = None) -> None:
    try:
        ledger.log_run(
            job["study"],
            config=jsonable(job["config"]),
            ok=ok,
            summary=job.get("summary"),
            error_text=error_text,
            duration_ms=int((time.monotonic() - started) * 1000),
        )
    except Exception as e:
        logger.warning("Could not record job %s in the ledger: %s", job["id"], e)


def _evict_finished(keep: int) -> None:
    """Drop the oldest non-running jobs so at most `keep` of them remain."""
    done = [job_id for job_id, job in list(jobs.items()) if job["status"] != "running"]
    stale = done[: max(len(done) - keep, 0)]
    for job_id in stale:
        jobs.pop(job_id, None)
        running_tasks.pop(job_id, None)
        cancel_flags.pop(job_id, None)
    if stale:
        logger.debug("Evicted %d finished jobs", len(stale))


@app.get("/studies")
def list_studies():
    """Name, label and YAML config template of every registered study."""
    return [
        {"name": name, "label": wrapper.label, "config_template": wrapper.config_template}
        for name, wrapper in study_registry.items()
    ]


@app.post("/studies/{name}/execute")
async def execute_study(name: str, body: Optional[Dict[str, Any]] = None):
    """Start a study as a background job.

    Body
    - config: dict|string, optional; strings are parsed as YAML, then JSON.
      Keys overlay the study's template defaults.
    """
    logger.info("POST /studies/%s/execute body=%s", name, body)
    wrapper = study_registry.get(name)
    if not wrapper:
        raise HTTPException(404, "unknown study")
    try:
        config = wrapper.resolve((body or {}).get("config"))
    except LabError as e:
        raise HTTPException(400, str(e))

    job_id = uuid.uuid4().hex[:12]
    job: Dict[str, Any] = {"id": job_id, "study": name, "status": "running", "config": jsonable(config)}
    jobs[job_id] = job
    cancel = cancel_flags[job_id] = threading.Event()

    async def _runner():
        """Run the study on a worker thread and report its lifecycle."""
        started = time.monotonic()
        try:
            await publish_job_event("study_started", job_id, name)
            logger.info("Job %s: starting study '%s'", job_id, name)
            result = await asyncio.to_thread(wrapper.run, config, cancel)
            payload = result.to_dict()
            job.update(summary=payload["summary"], tables=payload["tables"])
            logger.info("Job %s: study '%s' finished", job_id, name)
            # ledger first: pollers treat a final status as "recorded"
            _record_run(job, True, started)
            _evict_finished(MAX_FINISHED_JOBS - 1)
            job["status"] = "finished"
            await publish_job_event("study_finished", job_id, name)
        except (asyncio.CancelledError, StudyAborted):
            cancel.set()
            logger.info("Job %s: study '%s' aborted", job_id, name)
            _record_run(job, False, started, "aborted")
            _evict_finished(MAX_FINISHED_JOBS - 1)
            job["status"] = "aborted"
            await publish_job_event("study_aborted", job_id, name)
        except Exception as e:
            err_text = f"{e}\n{traceback.format_exc()}"
            job["error"] = str(e)
            logger.error("Job %s: study '%s' failed: %s", job_id, name, err_text)
            _record_run(job, False, started, err_text)
            _evict_finished(MAX_FINISHED_JOBS - 1)
            job["status"] = "failed"
            await publish_job_event("study_failed", job_id, name, str(e))
        finally:
            running_tasks.pop(job_id, None)
            cancel_flags.pop(job_id, None)

    running_tasks[job_id] = asyncio.create_task(_runner())
    return {"accepted": True, "job_id": job_id}


@app.post("/jobs/{job_id}/abort")
async def abort_job(job_id: str):
    """Abort a running job, if any."""
    logger.info("POST /jobs/%s/abort", job_id)
    if job_id not in jobs:
        raise HTTPException(404, "unknown job")
    task = running_tasks.get(job_id)
    if task and not task.done() and jobs[job_id]["status"] == "running":
        cancel_flags[job_id].set()
        task.cancel()
        return {"aborted": True}
    return {"aborted": False}


@app.get("/jobs")
def list_jobs():
    """Status of all jobs of this session, without their tables."""
    return [{k: v for k, v in job.items() if k != "tables"} for job in list(jobs.values())]


@app.get("/jobs/{job_id}")
def job_status(job_id: str):
    job = jobs.get(job_id)
    if not job:
        raise HTTPException(404, "unknown job")
    return job


@app.get("/runs")
def list_runs(limit: int = 50):
    """Recent entries of the run ledger."""
    return ledger.list_runs(limit)


@app.websocket("/events")
async def events(ws: WebSocket):
    """Push-only stream of job events and log records; client messages are ignored."""
    await ws.accept()
    event_subscribers.add(ws)
    logger.info("/events: connected; subscribers=%d", len(event_subscribers))
    try:
        while True:
            msg = await ws.receive_text()
            logger.debug("/events: received from client: %s", msg)
    except WebSocketDisconnect:
        logger.info("/events: client disconnected")
    finally:
        event_subscribers.discard(ws)
