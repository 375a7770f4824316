"""HTTP front for the engine.

Every handler is a thin adapter: decode the request, call one engine
method, encode the result. Domain errors reach the client as
``{"code", "message", "details"}`` with a status from ERROR_STATUS;
nothing here re-implements pipeline rules.

Generate and cascade normally answer synchronously. When a provider is
slow the handler gives up waiting after ``sync_wait`` seconds and
answers 202 with an operation id; the work keeps running and its result
is collected from GET /operations/{op_id}.
"""

from __future__ import annotations

import uuid
from concurrent.futures import Future, ThreadPoolExecutor, TimeoutError as FutureTimeout
from typing import Callable

from fastapi import Body, FastAPI, Header, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import analytics
from .engine import Engine, stage_from_key
from .errors import CooperaError, ValidationError
from .model import ScriptProject, Stage
from .validation import Violation

DEFAULT_SYNC_WAIT = 10.0

ERROR_STATUS = {
    "VALIDATION": 400,
    "STAGE_ORDER": 409,
    "REVISION_CONFLICT": 409,
    "NOT_FOUND": 404,
    "PROVIDER": 502,
    "SCHEMA_INVALID": 502,
    "STORAGE": 500,
}


def _error_response(exc: CooperaError) -> JSONResponse:
    status = ERROR_STATUS.get(exc.code, 500)
    return JSONResponse(status_code=status, content=exc.to_dict())


def _expected_revision(body: dict | None) -> int | None:
    if not body or body.get("expected_revision") is None:
        return None
    value = body["expected_revision"]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(
            "expected_revision must be an integer",
            violations=[Violation("BAD_PAYLOAD", None, f"expected_revision {value!r}")],
        )
    return value


def _int_header(value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ValidationError(
            "If-Match-Revision must be an integer",
            violations=[Violation("BAD_PAYLOAD", None, f"If-Match-Revision {value!r}")],
        ) from None


def create_app(engine: Engine | None = None, sync_wait: float = DEFAULT_SYNC_WAIT) -> FastAPI:
    engine = engine if engine is not None else Engine()
    app = FastAPI(title="coopera", docs_url=None, redoc_url=None)
    # the browser front end may be hosted anywhere; there is no login to protect
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.engine = engine
    app.state.operations: dict[str, Future] = {}
    app.state.executor = ThreadPoolExecutor(max_workers=4, thread_name_prefix="coopera-op")

    @app.exception_handler(CooperaError)
    async def _domain_error(request: Request, exc: CooperaError) -> JSONResponse:
        return _error_response(exc)

    def _run_or_defer(work: Callable[[], ScriptProject]) -> Response:
        future = app.state.executor.submit(work)
        try:
            project = future.result(timeout=sync_wait)
        except FutureTimeout:
            op_id = uuid.uuid4().hex[:12]
            app.state.operations[op_id] = future
            return JSONResponse(
                status_code=202,
                content={"operation": op_id, "poll": f"/operations/{op_id}"},
            )
        except CooperaError as exc:
            return _error_response(exc)
        return JSONResponse(content=project.to_dict())

    @app.get("/healthz")
    def healthz() -> dict:
        from . import __version__

        return {"status": "ok", "version": __version__}

    @app.post("/projects", status_code=201)
    def create_project(body: dict = Body(...)) -> dict:
        if not isinstance(body.get("logline_draft", ""), str):
            raise ValidationError(
                "logline_draft must be text",
                violations=[Violation("BAD_PAYLOAD", None, "logline_draft must be a string")],
            )
        project = engine.create_project(
            logline_draft=body.get("logline_draft", ""),
            title=str(body.get("title", "") or ""),
        )
        return project.to_dict()

    @app.get("/projects")
    def list_projects() -> list[dict]:
        return engine.list_projects()

    @app.get("/projects/{project_id}")
    def get_project(project_id: str) -> dict:
        return engine.get_project(project_id).to_dict()

    @app.get("/projects/{project_id}/history")
    def history(project_id: str, stage: str | None = Query(None)) -> list[dict]:
        parsed = stage_from_key(stage) if stage else None
        return [entry.to_dict() for entry in engine.history(project_id, parsed)]

    @app.post("/projects/{project_id}/stages/{stage}/tutor")
    def tutor(project_id: str, stage: str, body: dict = Body(...)) -> dict:
        message = body.get("message")
        if not isinstance(message, str):
            raise ValidationError(
                "body must carry a text message",
                violations=[Violation("BAD_PAYLOAD", None, "message must be a string")],
            )
        reply, session = engine.tutor_message(project_id, stage_from_key(stage), message)
        return {"reply": reply, "session": session.to_dict()}

    @app.post("/projects/{project_id}/stages/{stage}/generate")
    def generate(project_id: str, stage: str, body: dict | None = Body(None)) -> Response:
        body = body or {}
        parsed = stage_from_key(stage)
        expected = _expected_revision(body)
        return _run_or_defer(
            lambda: engine.generate(
                project_id,
                parsed,
                seed=body.get("seed"),
                count_hint=body.get("count_hint"),
                style_notes=body.get("style_notes"),
                expected_revision=expected,
            )
        )

    @app.post("/projects/{project_id}/stages/{stage}/confirm")
    def confirm(project_id: str, stage: str, body: dict | None = Body(None)) -> dict:
        body = body or {}
        project = engine.confirm(
            project_id,
            stage_from_key(stage),
            body.get("payload"),
            expected_revision=_expected_revision(body),
        )
        return project.to_dict()

    @app.post("/projects/{project_id}/stages/{stage}/cascade")
    def cascade(project_id: str, stage: str, body: dict | None = Body(None)) -> Response:
        body = body or {}
        parsed = stage_from_key(stage)
        expected = _expected_revision(body)
        return _run_or_defer(
            lambda: engine.cascade(
                project_id, parsed, seed=body.get("seed"), expected_revision=expected
            )
        )

    @app.patch("/projects/{project_id}/elements/{element_id}")
    def patch_element(
        project_id: str,
        element_id: str,
        body: dict = Body(...),
        if_match_revision: str | None = Header(None, alias="If-Match-Revision"),
    ) -> Response:
        if if_match_revision is None:
            return JSONResponse(
                status_code=428,
                content={
                    "code": "PRECONDITION_REQUIRED",
                    "message": "PATCH requires the If-Match-Revision header",
                    "details": {},
                },
            )
        project = engine.edit(
            project_id, element_id, body, expected_revision=_int_header(if_match_revision)
        )
        return JSONResponse(content=project.to_dict())

    @app.get("/projects/{project_id}/staleness")
    def staleness(project_id: str) -> dict:
        return engine.staleness(project_id).to_dict()

    @app.get("/projects/{project_id}/diff/{stage}")
    def diff(project_id: str, stage: str) -> dict:
        return engine.diff(project_id, stage_from_key(stage)).to_dict()

    @app.get("/projects/{project_id}/export")
    def export(project_id: str, format: str = Query("json")) -> Response:
        text = engine.export(project_id, format)
        if format == "screenplay":
            return PlainTextResponse(content=text)
        return Response(content=text, media_type="application/json")

    @app.post("/analytics/sus")
    def sus(body: dict = Body(...)) -> dict:
        rows = body.get("responses")
        if not isinstance(rows, list):
            raise ValidationError(
                "body must carry a responses array",
                violations=[Violation("BAD_PAYLOAD", None, "responses must be a list")],
            )
        report = analytics.sus_score(analytics.responses_from_rows(rows))
        return report.to_dict()

    @app.get("/operations/{op_id}")
    def operation(op_id: str) -> Response:
        future = app.state.operations.get(op_id)
        if future is None:
            return JSONResponse(
                status_code=404,
                content={"code": "NOT_FOUND", "message": f"no operation {op_id!r}", "details": {}},
            )
        if not future.done():
            return JSONResponse(content={"status": "running"})
        del app.state.operations[op_id]
        try:
            project = future.result()
        except CooperaError as exc:
            return JSONResponse(content={"status": "failed", "error": exc.to_dict()})
        return JSONResponse(content={"status": "done", "result": project.to_dict()})

    return app
