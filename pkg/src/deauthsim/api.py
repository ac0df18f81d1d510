"""HTTP control API driving a live simulation for the operator console.

The simulation loop stays single-threaded: a background thread advances sim
time in fixed steps paced against the wall clock, applying queued operator
commands only at step boundaries. Request handlers never touch simulation
state directly; they read the latest immutable snapshot or enqueue commands.
"""

from __future__ import annotations

import queue
import threading
import time
from contextlib import asynccontextmanager
from pathlib import Path

import anyio
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .engine import (
    AttackCommand,
    Command,
    EventRecord,
    LIVE_STEP_US,
    ScanCommand,
    Simulation,
    StopCommand,
)
from .scenario import ScenarioConfig


class LiveRunner:
    """Wall-clock paced driver around a Simulation."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.sim = Simulation(config)
        self._commands: "queue.Queue[Command]" = queue.Queue()
        self._lock = threading.Lock()
        self._snapshot: dict = {}
        self._events: list[EventRecord] = []
        self.sim.add_event_listener(self._on_event)
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, daemon=True,
                                        name="deauthsim-live")

    def _on_event(self, record: EventRecord) -> None:
        # Called from the sim thread only; list append is atomic enough for
        # index-based readers.
        self._events.append(record)

    def start(self) -> None:
        with self._lock:
            self.sim.start()
            self._snapshot = self.sim.snapshot()
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=5)

    def _run(self) -> None:
        # Each wall tick advances the clock through every 10 ms sim step that
        # has come due under time_scale; queued commands land on the next
        # step boundary. Sleeping a fixed slice bounds CPU at any time scale.
        tick_wall_s = 0.002
        start_wall = time.monotonic()
        start_sim = self.sim.now_us
        while not self._stop.is_set():
            time.sleep(tick_wall_s)
            elapsed = time.monotonic() - start_wall
            due_us = start_sim + int(elapsed * self.config.time_scale * 1e6)
            due_us = (due_us // LIVE_STEP_US) * LIVE_STEP_US
            with self._lock:
                boundary = (self.sim.now_us // LIVE_STEP_US + 1) * LIVE_STEP_US
                while True:
                    try:
                        command = self._commands.get_nowait()
                    except queue.Empty:
                        break
                    self.sim.inject_command_at(boundary, command)
                if due_us > self.sim.now_us:
                    self.sim.step_until(due_us)
                self._snapshot = self.sim.snapshot()

    def enqueue(self, command: Command) -> None:
        self._commands.put(command)

    def snapshot(self) -> dict:
        with self._lock:
            return self._snapshot

    def events_since(self, index: int) -> list[EventRecord]:
        return self._events[index:]

    @property
    def event_count(self) -> int:
        return len(self._events)


class AttackRequest(BaseModel):
    bssid: str
    duration_s: int = Field(gt=0)


def create_app(config: ScenarioConfig, assets_dir: str | None = None) -> FastAPI:
    runner = LiveRunner(config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        runner.start()
        yield
        runner.stop()

    app = FastAPI(title="deauthsim operator API", lifespan=lifespan)
    app.state.runner = runner

    @app.get("/api/status")
    def status() -> JSONResponse:
        return JSONResponse(runner.snapshot())

    @app.get("/api/aps")
    def aps() -> JSONResponse:
        return JSONResponse(runner.snapshot()["aps"])

    def require_running() -> dict:
        snap = runner.snapshot()
        if not snap["running"]:
            raise HTTPException(status_code=409,
                                detail="simulation horizon reached")
        return snap

    @app.post("/api/scan")
    def scan() -> dict:
        require_running()
        runner.enqueue(ScanCommand())
        return {"ok": True}

    @app.post("/api/attack")
    def attack(body: AttackRequest) -> dict:
        snap = require_running()
        if not snap["scanned"]:
            raise HTTPException(status_code=409, detail="scan before attacking")
        known = {ap["bssid"] for ap in snap["aps"]}
        if body.bssid not in known:
            raise HTTPException(status_code=404, detail=f"unknown BSSID {body.bssid}")
        runner.enqueue(AttackCommand(bssid=body.bssid, duration_s=body.duration_s))
        return {"ok": True}

    @app.post("/api/stop")
    def stop() -> dict:
        require_running()
        runner.enqueue(StopCommand())
        return {"ok": True}

    @app.get("/api/events")
    async def events(request: Request, from_seq: int = 0,
                     limit: int = 0) -> StreamingResponse:
        async def stream():
            index = from_seq
            sent = 0
            while True:
                if await request.is_disconnected():
                    return
                batch = runner.events_since(index)
                index += len(batch)
                for record in batch:
                    yield f"data: {record.to_json()}\n\n"
                    sent += 1
                    if limit and sent >= limit:
                        return
                if not batch:
                    await anyio.sleep(0.1)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if assets_dir is None:
        default_assets = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if default_assets.is_dir():
            assets_dir = str(default_assets)
    if assets_dir is not None:
        app.mount("/", StaticFiles(directory=assets_dir, html=True), name="console")

    return app
