"""HTTP API over the engine.

Single process, file backed: every project lives in one ``.pimproj`` file
under the data directory and is rewritten atomically on each mutation.
Mutations to one project are linearized behind a per-project lock; reads
take the same lock just long enough to build a consistent payload.
Simulation sessions are in-memory only and expire after an idle timeout.

Every engine error surfaces as a stable ``{status, code}`` pair; raw
internals never leak into responses.
"""

from __future__ import annotations

import socket
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TypeVar

import uvicorn
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict
from starlette.concurrency import run_in_threadpool
from starlette.exceptions import HTTPException as StarletteHTTPException

from .analysis import analyze_project, generate_tests
from .convert import convert
from .errors import DataDirUnwritable, DomainError, PortInUse, UnsupportedMediaType
from .formats import (
    ImageStore,
    canonical_json,
    export_dot,
    export_pim_text,
    hotspot_to_dict,
    load_project,
    save_project,
    screen_to_dict,
)
from .formats.project import project_to_dict
from .prototype import Project, Rect, create_project
from .serialize import (
    analysis_to_dict,
    conversion_report_to_dict,
    session_to_dict,
    test_suite_to_dict,
    trace_event_to_dict,
)
from .simulate import SimulationSession, start_session

T = TypeVar("T")

STATUS_BY_CODE = {
    "EmptyName": 422,
    "InvalidName": 422,
    "InvalidRect": 422,
    "InvalidPoint": 422,
    "InvalidBehaviourName": 422,
    "EmptyProject": 422,
    "NoInitialScreen": 422,
    "TargetIsInitial": 422,
    "InvalidPim": 422,
    "ParseError": 422,
    "VersionUnsupported": 422,
    "InvariantViolation": 422,
    "CorruptImage": 422,
    "DuplicateScreenName": 409,
    "DuplicateHotspotName": 409,
    "NameCollision": 409,
    "BehaviourNotEnabled": 409,
    "Conflict": 409,
    "UnknownScreen": 404,
    "UnknownHotspot": 404,
    "UnknownState": 404,
    "UnknownImage": 404,
    "NotFound": 404,
    "UnsupportedMediaType": 415,
    "BadRequest": 400,
}

CONTENT_TYPES = {
    "image/png": "png",
    "image/jpeg": "jpeg",
    "image/gif": "gif",
    "image/svg+xml": "svg",
}
MEDIA_CONTENT_TYPES = {v: k for k, v in CONTENT_TYPES.items()}


@dataclass
class ServiceConfig:
    data_dir: Path
    port: int = 8000
    host: str = "127.0.0.1"
    max_image_bytes: int = 8 * 1024 * 1024
    session_ttl: float = 30 * 60.0


class ApiException(Exception):
    """Service-level error that is not a module error (unknown id, bad body)."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _not_found(what: str, ident: str) -> ApiException:
    return ApiException(404, "NotFound", f"no {what} {ident!r}")


class CanonicalJSONResponse(Response):
    media_type = "application/json"

    def render(self, content) -> bytes:
        return canonical_json(content).encode("utf-8")


class ProjectStore:
    """File-backed project registry with per-project write linearization."""

    def __init__(self, data_dir: Path):
        self.projects_dir = Path(data_dir) / "projects"
        self.projects_dir.mkdir(parents=True, exist_ok=True)
        self._projects: dict[str, Project] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry = threading.Lock()
        for path in sorted(self.projects_dir.glob("*.pimproj")):
            project = load_project(path.read_bytes())
            self._projects[project.id] = project
            self._locks[project.id] = threading.Lock()

    def _path(self, project_id: str) -> Path:
        return self.projects_dir / f"{project_id}.pimproj"

    def create(self, name: str) -> dict:
        project = create_project(name, project_id=uuid.uuid4().hex)
        with self._registry:
            self._projects[project.id] = project
            self._locks[project.id] = threading.Lock()
        with self._locks[project.id]:
            self._save(project)
            return project_to_dict(project)["project"]

    def ids(self) -> list[str]:
        with self._registry:
            return sorted(self._projects)

    def summaries(self) -> list[dict]:
        out = []
        for pid in self.ids():
            try:
                out.append(self.read(pid, lambda p: {
                    "id": p.id, "name": p.name, "screens": len(p.screens)}))
            except ApiException:
                continue  # deleted between listing and read
        return out

    def read(self, project_id: str, fn: Callable[[Project], T]) -> T:
        lock = self._lock_for(project_id)
        with lock:
            project = self._projects.get(project_id)
            if project is None:
                raise _not_found("project", project_id)
            return fn(project)

    def mutate(self, project_id: str, fn: Callable[[Project], T]) -> T:
        lock = self._lock_for(project_id)
        with lock:
            project = self._projects.get(project_id)
            if project is None:
                raise _not_found("project", project_id)
            result = fn(project)
            self._save(project)
            return result

    def delete(self, project_id: str) -> None:
        lock = self._lock_for(project_id)
        with lock:
            if project_id not in self._projects:
                raise _not_found("project", project_id)
            del self._projects[project_id]
            self._path(project_id).unlink(missing_ok=True)

    def snapshot(self, project_id: str) -> Project:
        return self.read(project_id, lambda p: p.snapshot())

    def _lock_for(self, project_id: str) -> threading.Lock:
        with self._registry:
            if project_id not in self._locks:
                self._locks[project_id] = threading.Lock()
            return self._locks[project_id]

    def _save(self, project: Project) -> None:
        from .formats import atomic_write_bytes

        atomic_write_bytes(self._path(project.id), save_project(project))


class SessionRegistry:
    """In-memory simulation sessions with idle expiry."""

    def __init__(self, ttl: float, clock: Callable[[], float] = time.monotonic):
        self.ttl = ttl
        self.clock = clock
        self._sessions: dict[str, tuple[SimulationSession, threading.Lock, float]] = {}
        self._registry = threading.Lock()

    def create(self, project: Project) -> SimulationSession:
        session = start_session(project)
        with self._registry:
            self._sweep()
            self._sessions[session.id] = (session, threading.Lock(), self.clock())
        return session

    def use(self, session_id: str, fn: Callable[[SimulationSession], T]) -> T:
        with self._registry:
            self._sweep()
            entry = self._sessions.get(session_id)
            if entry is None:
                raise _not_found("session", session_id)
            session, lock, _ = entry
            self._sessions[session_id] = (session, lock, self.clock())
        with lock:
            return fn(session)

    def _sweep(self) -> None:
        now = self.clock()
        expired = [sid for sid, (_, _, last) in self._sessions.items()
                   if now - last > self.ttl]
        for sid in expired:
            del self._sessions[sid]


class CreateProjectBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: str


class ScreenBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: str
    image: str | None = None  # content hash of a stored image


class ScreenPatch(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: str | None = None
    image: str | None = None
    initial: bool | None = None


class RectBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    x: float
    y: float
    w: float
    h: float

    def to_rect(self) -> Rect:
        return Rect(self.x, self.y, self.w, self.h)


class HotspotBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rect: RectBody
    name: str | None = None


class HotspotPatch(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rect: RectBody | None = None
    name: str | None = None
    link_target: str | None = None
    s_behaviours: list[str] | None = None


class ClickBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    x: float
    y: float


class StepBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    behaviour: str


def create_app(config: ServiceConfig) -> FastAPI:
    config.data_dir = Path(config.data_dir)
    store = ProjectStore(config.data_dir)
    images = ImageStore(config.data_dir / "images")
    sessions = SessionRegistry(config.session_ttl)

    app = FastAPI(title="pimproto", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.sessions = sessions
    # Local tool, browser frontend may be served from any static host.
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    def error_response(status: int, code: str, message: str,
                       path: str | None = None) -> CanonicalJSONResponse:
        body = {"status": status, "code": code, "message": message, "path": path}
        return CanonicalJSONResponse(body, status_code=status)

    @app.exception_handler(DomainError)
    def on_domain_error(request: Request, exc: DomainError):
        status = STATUS_BY_CODE.get(exc.code, 500)
        return error_response(status, exc.code, exc.message, exc.path)

    @app.exception_handler(ApiException)
    def on_api_error(request: Request, exc: ApiException):
        return error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(RequestValidationError)
    def on_validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = "/".join(str(part) for part in first.get("loc", ()))
        msg = first.get("msg", "invalid request body")
        return error_response(422, "BadRequest", f"{loc}: {msg}" if loc else msg)

    @app.exception_handler(StarletteHTTPException)
    def on_http_error(request: Request, exc: StarletteHTTPException):
        code = "NotFound" if exc.status_code == 404 else "BadRequest"
        return error_response(exc.status_code, code, str(exc.detail))

    # -- meta ---------------------------------------------------------------

    @app.get("/healthz")
    def healthz():
        return CanonicalJSONResponse({"status": "ok"})

    # -- projects -------------------------------------------------------------

    @app.post("/projects", status_code=201)
    def create_project_ep(body: CreateProjectBody):
        return CanonicalJSONResponse(store.create(body.name), status_code=201)

    @app.get("/projects")
    def list_projects():
        return CanonicalJSONResponse(store.summaries())

    @app.get("/projects/{pid}")
    def get_project(pid: str):
        return CanonicalJSONResponse(
            store.read(pid, lambda p: project_to_dict(p)["project"]))

    @app.delete("/projects/{pid}", status_code=204)
    def delete_project(pid: str):
        store.delete(pid)
        return Response(status_code=204)

    # -- images ---------------------------------------------------------------

    @app.post("/projects/{pid}/images", status_code=201)
    async def upload_image(pid: str, request: Request):
        store.read(pid, lambda p: None)  # 404 before reading the body
        content_type = request.headers.get("content-type", "").split(";")[0].strip()
        media_type = CONTENT_TYPES.get(content_type)
        if media_type is None:
            raise UnsupportedMediaType(
                f"content type {content_type or '<missing>'!r} not supported")
        data = await request.body()
        if len(data) > config.max_image_bytes:
            return error_response(413, "BadRequest",
                                  f"image exceeds {config.max_image_bytes} bytes")
        ref = await run_in_threadpool(images.store, data, media_type)
        return CanonicalJSONResponse({
            "id": ref.id, "media_type": ref.media_type, "width": ref.width,
            "height": ref.height, "content_hash": ref.content_hash,
        }, status_code=201)

    @app.get("/projects/{pid}/images/{digest}")
    def get_image(pid: str, digest: str):
        store.read(pid, lambda p: None)
        ref = images.load_ref(digest)
        data = images.fetch(ref)
        return Response(content=data, media_type=MEDIA_CONTENT_TYPES[ref.media_type])

    # -- screens ---------------------------------------------------------------

    @app.post("/projects/{pid}/screens", status_code=201)
    def add_screen(pid: str, body: ScreenBody):
        image = images.load_ref(body.image) if body.image is not None else None
        screen = store.mutate(pid, lambda p: p.add_screen(body.name, image))
        return CanonicalJSONResponse(screen_to_dict(screen), status_code=201)

    @app.patch("/projects/{pid}/screens/{sid}")
    def patch_screen(pid: str, sid: str, body: ScreenPatch):
        fields = body.model_fields_set
        if "name" in fields and body.name is None:
            raise ApiException(422, "BadRequest", "name cannot be null")

        def apply(project: Project):
            if "name" in fields:
                project.rename_screen(sid, body.name)
            if "image" in fields:
                image = images.load_ref(body.image) if body.image is not None else None
                project.set_screen_image(sid, image)
            if "initial" in fields and body.initial:
                project.set_initial_screen(sid)
            return screen_to_dict(project.screen(sid))

        return CanonicalJSONResponse(store.mutate(pid, apply))

    @app.delete("/projects/{pid}/screens/{sid}")
    def delete_screen(pid: str, sid: str):
        affected = store.mutate(pid, lambda p: p.delete_screen(sid))
        return CanonicalJSONResponse({"affected_hotspots": affected})

    # -- hotspots ---------------------------------------------------------------

    @app.post("/projects/{pid}/screens/{sid}/hotspots", status_code=201)
    def add_hotspot(pid: str, sid: str, body: HotspotBody):
        hotspot = store.mutate(
            pid, lambda p: p.add_hotspot(sid, body.rect.to_rect(), body.name))
        return CanonicalJSONResponse(hotspot_to_dict(hotspot), status_code=201)

    @app.patch("/projects/{pid}/screens/{sid}/hotspots/{hid}")
    def patch_hotspot(pid: str, sid: str, hid: str, body: HotspotPatch):
        fields = body.model_fields_set
        if "name" in fields and body.name is None:
            raise ApiException(422, "BadRequest", "name cannot be null")
        if "rect" in fields and body.rect is None:
            raise ApiException(422, "BadRequest", "rect cannot be null")

        def apply(project: Project):
            if "rect" in fields:
                project.set_hotspot_rect(sid, hid, body.rect.to_rect())
            if "name" in fields:
                project.rename_hotspot(sid, hid, body.name)
            if "link_target" in fields:
                project.set_hotspot_link(sid, hid, body.link_target)
            if "s_behaviours" in fields:
                project.set_hotspot_behaviours(sid, hid, body.s_behaviours or [])
            return hotspot_to_dict(project.screen(sid).hotspot(hid))

        return CanonicalJSONResponse(store.mutate(pid, apply))

    @app.delete("/projects/{pid}/screens/{sid}/hotspots/{hid}", status_code=204)
    def delete_hotspot(pid: str, sid: str, hid: str):
        store.mutate(pid, lambda p: p.delete_hotspot(sid, hid))
        return Response(status_code=204)

    # -- model derivation ----------------------------------------------------

    @app.post("/projects/{pid}/convert")
    def convert_project(pid: str):
        report = convert(store.snapshot(pid))
        return CanonicalJSONResponse(conversion_report_to_dict(report))

    @app.get("/projects/{pid}/analysis")
    def analysis(pid: str):
        report = analyze_project(store.snapshot(pid))
        return CanonicalJSONResponse(analysis_to_dict(report))

    @app.get("/projects/{pid}/tests")
    def tests(pid: str):
        suite = generate_tests(convert(store.snapshot(pid)).pim)
        return CanonicalJSONResponse(test_suite_to_dict(suite))

    @app.get("/projects/{pid}/export.dot")
    def export_dot_ep(pid: str):
        data = export_dot(convert(store.snapshot(pid)).pim)
        return Response(content=data, media_type="text/vnd.graphviz; charset=utf-8")

    @app.get("/projects/{pid}/export.pim")
    def export_pim_ep(pid: str):
        data = export_pim_text(convert(store.snapshot(pid)).pim)
        return Response(content=data, media_type="text/plain; charset=utf-8")

    # -- sessions ---------------------------------------------------------------

    @app.post("/projects/{pid}/sessions", status_code=201)
    def create_session(pid: str):
        session = sessions.create(store.snapshot(pid))
        return CanonicalJSONResponse(session_to_dict(session), status_code=201)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return CanonicalJSONResponse(sessions.use(sid, session_to_dict))

    def _with_event(session: SimulationSession, event) -> dict:
        return {"event": trace_event_to_dict(event) if event else None,
                "session": session_to_dict(session)}

    @app.post("/sessions/{sid}/click")
    def click(sid: str, body: ClickBody):
        return CanonicalJSONResponse(sessions.use(
            sid, lambda s: _with_event(s, s.click(body.x, body.y))))

    @app.post("/sessions/{sid}/step")
    def step(sid: str, body: StepBody):
        return CanonicalJSONResponse(sessions.use(
            sid, lambda s: _with_event(s, s.step(body.behaviour))))

    @app.post("/sessions/{sid}/reset")
    def reset(sid: str):
        return CanonicalJSONResponse(sessions.use(
            sid, lambda s: _with_event(s, s.reset())))

    return app


def check_data_dir(data_dir: Path) -> None:
    data_dir = Path(data_dir)
    try:
        data_dir.mkdir(parents=True, exist_ok=True)
        probe = data_dir / ".write-probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise DataDirUnwritable(f"cannot write to {data_dir}: {exc}") from exc


def build_server(config: ServiceConfig) -> tuple[uvicorn.Server, socket.socket]:
    """Bind the listen socket up front so a taken port fails fast."""
    check_data_dir(config.data_dir)
    app = create_app(config)
    try:
        sock = socket.create_server((config.host, config.port), backlog=128)
    except OSError as exc:
        raise PortInUse(
            f"cannot listen on {config.host}:{config.port}: {exc}") from exc
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    return server, sock


def serve(config: ServiceConfig) -> None:
    """Run the API until interrupted; pending writes all happen synchronously
    inside request handlers, so shutdown cannot tear a project file."""
    server, sock = build_server(config)
    try:
        server.run(sockets=[sock])
    finally:
        sock.close()
