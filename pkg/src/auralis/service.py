"""HTTP + WebSocket seam between the engine and the editor UI.

Endpoints:
  GET  /project           canonical project bytes, version in X-Project-Version
  POST /project           load a bundle or project file from disk
  PATCH /edits            apply one edit op against a base version
  POST /render            offline render, WAV download (?layout=&bits=)
  WS   /preview           framed live preview (?from=&layout=)

Preview frames are binary: a 24-byte little-endian header (playhead f64,
block index u64, channel count u32, frame count u32), then frame_count x
channels float32 interleaved samples, then one float32 RMS per channel.
Heartbeat frames have frame count 0. Text frames carry transport commands:
``play``, ``pause``, ``seek <t>``, ``step 1``, ``step -1``.

Concurrency: edits serialize through one lock and bump a version counter;
the preview loop reads the current snapshot reference once per block, so an
edit becomes audible at the next block boundary and no lock is ever held
across a block render.
"""

from __future__ import annotations

import asyncio
import math
import os
import struct
import threading
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Query, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response

from .errors import (
    AuralisError,
    InvalidValue,
    NoProject,
    NonFiniteValue,
    SessionLimit,
    UnknownTrack,
    ValidationFailed,
    VersionConflict,
)
from .ingest import ingest_bundle, load_stems
from .scene import (
    EditViolation,
    PositionKeyframe,
    SceneProject,
    load_project,
    remove_keyframe,
    save_project,
    set_listener_keyframe,
    set_track_property,
    upsert_keyframe,
    validate,
)
from .spatial import (
    BLOCK_SIZE_MAX,
    BLOCK_SIZE_MIN,
    DEFAULT_BLOCK_SIZE,
    get_layout,
    render_block,
    render_offline,
)
from .wav import AudioClip, write_wav

BLOCK_SIZE_ENV = "AURALIS_BLOCK_SIZE"

FRAME_HEADER = struct.Struct("<dQII")  # playhead, block index, channels, frames
HEARTBEAT_INTERVAL = 0.25


def block_size_from_env(default: int = DEFAULT_BLOCK_SIZE) -> int:
    raw = os.environ.get(BLOCK_SIZE_ENV)
    if not raw:
        return default
    try:
        size = int(raw)
    except ValueError:
        raise ValueError(f"{BLOCK_SIZE_ENV} must be an integer, got {raw!r}") from None
    if not BLOCK_SIZE_MIN <= size <= BLOCK_SIZE_MAX:
        raise ValueError(f"{BLOCK_SIZE_ENV} must be in [{BLOCK_SIZE_MIN}, {BLOCK_SIZE_MAX}], got {size}")
    return size


@dataclass
class PreviewSession:
    """Per-connection transport state; gain state threads block to block."""

    session_id: str
    playhead: float = 0.0
    playing: bool = True
    layout_id: str | None = None  # None follows the project layout
    gains: dict | None = None
    block_index: int = 0


class Engine:
    """Holds the current snapshot and serializes edits against it.

    Snapshots are immutable (project, stems) pairs; readers grab the current
    reference without locking, writers swap it under ``_lock``.
    """

    def __init__(self, block_size: int | None = None, max_sessions: int = 8):
        self._lock = threading.Lock()
        self._state: tuple[SceneProject, dict[str, AudioClip], int] | None = None
        self.block_size = block_size if block_size is not None else block_size_from_env()
        self.max_sessions = max_sessions
        self.sessions: set[str] = set()

    # -- snapshot access ---------------------------------------------------

    @property
    def state(self) -> tuple[SceneProject, dict[str, AudioClip], int]:
        state = self._state
        if state is None:
            raise NoProject("no project loaded")
        return state

    @property
    def version(self) -> int:
        return self.state[2]

    def sample_rate(self) -> int:
        _, stems, _ = self.state
        rates = {clip.sample_rate for clip in stems.values()}
        return rates.pop() if len(rates) == 1 else 48000

    # -- loading -----------------------------------------------------------

    def set_project(self, project: SceneProject, stems: dict[str, AudioClip]) -> int:
        with self._lock:
            self._state = (project, dict(stems), 1)
            return 1

    def load_project_file(self, path: Path) -> int:
        path = Path(path)
        project = load_project(path.read_bytes())
        stems = load_stems(path.parent, [t.stem_ref for t in project.tracks])
        return self.set_project(project, stems)

    def load_bundle_file(self, path: Path, layout_id: str = "stereo") -> int:
        project, stems = ingest_bundle(Path(path), layout_id=layout_id)
        return self.set_project(project, stems)

    # -- edits ---------------------------------------------------------------

    def apply_edit(self, edit: dict, base_version: int) -> int:
        """Apply one edit atomically; returns the new version."""
        with self._lock:
            project, stems, version = self.state
            if base_version != version:
                raise VersionConflict(base_version, version)
            candidate = self._edited(project, edit)
            violations = validate(candidate)
            if violations:
                raise ValidationFailed(violations)
            self._state = (candidate, stems, version + 1)
            return version + 1

    @staticmethod
    def _edited(project: SceneProject, edit: dict) -> SceneProject:
        op = edit.get("op")
        try:
            if op == "keyframe-upsert":
                kf = PositionKeyframe(
                    t=float(edit["t"]),
                    p=tuple(float(c) for c in edit["p"]),
                    origin=edit.get("origin", "user"),
                )
                return upsert_keyframe(project, edit["track_id"], kf)
            if op == "keyframe-remove":
                return remove_keyframe(
                    project, edit["track_id"], float(edit["t"]), edit.get("origin", "user")
                )
            if op == "track-property":
                return set_track_property(
                    project, edit["track_id"], edit["property"], edit["value"]
                )
            if op == "listener-pose":
                return set_listener_keyframe(
                    project,
                    float(edit["t"]),
                    tuple(float(c) for c in edit["position"]),
                    tuple(float(c) for c in edit["orientation"]),
                )
            if op == "toggle":
                flag = edit["use_model_positions"]
                if not isinstance(flag, bool):
                    raise InvalidValue(f"use_model_positions must be a boolean, got {flag!r}")
                return replace(project, use_model_positions=flag)
            if op == "layout":
                return replace(project, layout_id=edit["layout_id"])
        except (UnknownTrack, NonFiniteValue, InvalidValue) as e:
            raise ValidationFailed([EditViolation(path=str(op), message=str(e))]) from e
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationFailed([EditViolation(path=str(op), message=f"bad edit body: {e}")]) from e
        raise ValidationFailed([EditViolation(path="op", message=f"unknown edit op {op!r}")])

    # -- sessions ------------------------------------------------------------

    def open_session(self, layout_id: str | None, start: float) -> PreviewSession:
        if len(self.sessions) >= self.max_sessions:
            raise SessionLimit(f"at most {self.max_sessions} preview sessions")
        project, _, _ = self.state
        session = PreviewSession(
            session_id=uuid.uuid4().hex,
            playhead=min(max(start, 0.0), project.video.duration),
            layout_id=layout_id,
        )
        self.sessions.add(session.session_id)
        return session

    def close_session(self, session: PreviewSession) -> None:
        self.sessions.discard(session.session_id)


def _error_response(status: int, detail) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app(engine: Engine | None = None) -> FastAPI:
    engine = engine or Engine()
    app = FastAPI(title="auralis", docs_url=None, redoc_url=None)
    app.state.engine = engine

    @app.exception_handler(NoProject)
    async def _no_project(request, exc):
        return _error_response(404, "no project loaded")

    @app.get("/project")
    async def get_project():
        project, _, version = engine.state
        return Response(
            content=save_project(project),
            media_type="application/json",
            headers={"X-Project-Version": str(version)},
        )

    @app.post("/project")
    async def post_project(request: Request):
        body = await request.json()
        layout_id = body.get("layout", "stereo")
        try:
            if "bundle" in body:
                version = engine.load_bundle_file(Path(body["bundle"]), layout_id)
            elif "project" in body:
                version = engine.load_project_file(Path(body["project"]))
            else:
                return _error_response(400, "body must name a 'bundle' or 'project' path")
        except FileNotFoundError as e:
            return _error_response(400, f"missing file: {e}")
        except AuralisError as e:
            return _error_response(400, str(e))
        return {"version": version}

    @app.patch("/edits")
    async def patch_edits(request: Request):
        body = await request.json()
        if "base_version" not in body:
            return _error_response(400, "edit must carry base_version")
        try:
            version = engine.apply_edit(body, int(body["base_version"]))
        except VersionConflict as e:
            return _error_response(409, {"error": "version_conflict", "head": e.head_version})
        except ValidationFailed as e:
            return _error_response(
                422,
                {
                    "error": "validation_failed",
                    "violations": [{"path": v.path, "message": v.message} for v in e.violations],
                },
            )
        return {"version": version}

    @app.post("/render")
    async def post_render(layout: str | None = None, bits: int = 32):
        project, stems, _ = engine.state
        try:
            layout_obj = get_layout(layout or project.layout_id)
        except KeyError as e:
            return _error_response(400, str(e))
        if bits not in (16, 24, 32):
            return _error_response(400, f"bits must be 16, 24 or 32, got {bits}")
        buffer = render_offline(project, stems, layout_obj, block_size=engine.block_size)
        data = write_wav(buffer, bit_depth=bits)
        return Response(
            content=data,
            media_type="audio/wav",
            headers={"Content-Disposition": f'attachment; filename="render_{layout_obj.id}.wav"'},
        )

    @app.websocket("/preview")
    async def preview(ws: WebSocket, layout: str | None = None, start: float = Query(0.0, alias="from")):
        try:
            engine.state
        except NoProject:
            await ws.close(code=4004, reason="no project loaded")
            return
        if layout is not None:
            try:
                get_layout(layout)
            except KeyError as e:
                await ws.close(code=4000, reason=str(e))
                return
        try:
            session = engine.open_session(layout, start)
        except SessionLimit as e:
            await ws.close(code=4029, reason=str(e))
            return
        await ws.accept()
        commands: asyncio.Queue[str | None] = asyncio.Queue()

        async def reader():
            try:
                while True:
                    message = await ws.receive_text()
                    await commands.put(message)
            except (WebSocketDisconnect, RuntimeError):
                await commands.put(None)

        reader_task = asyncio.create_task(reader())
        try:
            await _stream(ws, engine, session, commands)
        except (WebSocketDisconnect, RuntimeError):
            pass
        except AuralisError as e:
            # e.g. a replacement project with a different sample rate loaded
            # mid-session; end this stream cleanly, clients reconnect.
            try:
                await ws.close(code=4005, reason=str(e)[:120])
            except RuntimeError:
                pass
        finally:
            reader_task.cancel()
            engine.close_session(session)

    return app


def _apply_command(session: PreviewSession, command: str, duration: float) -> None:
    # Unknown or malformed commands are ignored; they must not kill the stream.
    parts = command.strip().split()
    if not parts:
        return
    if parts[0] == "play":
        session.playing = True
    elif parts[0] == "pause":
        session.playing = False
    elif parts[0] in ("seek", "step") and len(parts) == 2:
        try:
            value = float(parts[1])
        except ValueError:
            return
        if not math.isfinite(value):
            return
        target = value if parts[0] == "seek" else session.playhead + value
        session.playhead = min(max(target, 0.0), duration)
        session.gains = None


def _pack_frame(session: PreviewSession, channels: int, block: np.ndarray | None, rms: np.ndarray) -> bytes:
    frames = 0 if block is None else block.shape[0]
    header = FRAME_HEADER.pack(session.playhead, session.block_index, channels, frames)
    payload = b"" if block is None else np.ascontiguousarray(block, dtype="<f4").tobytes()
    return header + payload + np.ascontiguousarray(rms, dtype="<f4").tobytes()


async def _stream(ws: WebSocket, engine: Engine, session: PreviewSession, commands: asyncio.Queue) -> None:
    loop = asyncio.get_running_loop()
    rate = engine.sample_rate()
    deadline = loop.time()
    while True:
        # Commands take effect at block granularity.
        while not commands.empty():
            command = commands.get_nowait()
            if command is None:
                return
            project, _, _ = engine.state
            _apply_command(session, command, project.video.duration)
            deadline = loop.time()

        project, stems, _ = engine.state
        layout = get_layout(session.layout_id or project.layout_id)
        duration = project.video.duration
        total_frames = round(duration * rate)
        start_frame = round(session.playhead * rate)

        if not session.playing or start_frame >= total_frames:
            if start_frame >= total_frames:
                session.playing = False
            heartbeat = _pack_frame(session, layout.channel_count, None, np.zeros(layout.channel_count))
            await ws.send_bytes(heartbeat)
            try:
                command = await asyncio.wait_for(commands.get(), timeout=HEARTBEAT_INTERVAL)
            except asyncio.TimeoutError:
                continue
            if command is None:
                return
            _apply_command(session, command, duration)
            deadline = loop.time()
            continue

        count = min(engine.block_size, total_frames - start_frame)
        block, rms, session.gains = render_block(
            project, stems, layout, start_frame / rate, count, session.gains, sample_rate=rate
        )
        frame = _pack_frame(session, layout.channel_count, block, rms)
        session.playhead = (start_frame + count) / rate
        session.block_index += 1
        await ws.send_bytes(frame)

        deadline += count / rate
        delay = deadline - loop.time()
        if delay > 0:
            await asyncio.sleep(delay)
        else:
            deadline = loop.time()  # fell behind; resynchronize instead of bursting
