"""Orchestration: ties the pipeline, agents, analytics, and store
together behind one object that the HTTP service and CLI both call.

Every mutating call runs under a per-project lock and follows
load -> pure pipeline operation -> save, so the store always holds a
validated project and concurrent requests against one project
serialize. Concurrency across different projects is unrestricted.

Tutor transcripts are intentionally not persisted: they are coaching
conversations, not script content, and a fresh session per process is
the desired behavior.
"""

from __future__ import annotations

import os
import threading
import uuid
from datetime import datetime, timezone
from typing import Callable

from . import analytics, pipeline, rendering
from .agents.mock import MockProvider
from .agents.prompts import GenerateOptions
from .agents.provider import ENV_BASE_URL, HttpProvider, Provider
from .agents.runtime import AgentSettings, FunctionalAgent, TutorSession, tutor_reply
from .errors import CascadeError, ValidationError
from .model import RevisionEntry, ScriptProject, Stage, new_project
from .store import FileStore
from .validation import Violation


def resolve_provider(force_mock: bool = False, mock_seed: int = 0) -> Provider:
    """MockProvider unless a real endpoint is configured in the environment."""
    if not force_mock and os.environ.get(ENV_BASE_URL):
        return HttpProvider.from_env()
    return MockProvider(seed=mock_seed)


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def stage_from_key(key: str) -> Stage:
    try:
        return Stage.from_key(key)
    except ValueError:
        raise ValidationError(
            f"unknown stage {key!r}",
            violations=[Violation("UNKNOWN_STAGE", None, f"stage must be one of {[s.key for s in Stage]}")],
        ) from None


class Engine:
    def __init__(
        self,
        store=None,
        provider: Provider | None = None,
        settings: AgentSettings | None = None,
        clock: Callable[[], str] | None = None,
    ):
        self.store = store if store is not None else FileStore()
        self.provider = provider if provider is not None else resolve_provider()
        self.settings = settings or AgentSettings()
        self.clock = clock or _utcnow
        self._agent = FunctionalAgent(self.provider, self.settings)
        self._sessions: dict[tuple[str, Stage], TutorSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    # -- project lifecycle -------------------------------------------------

    def create_project(
        self, logline_draft: str = "", title: str = "", project_id: str | None = None
    ) -> ScriptProject:
        project = new_project(
            project_id or uuid.uuid4().hex[:12], logline_text=logline_draft, title=title
        )
        self.store.save(project)
        return project

    def get_project(self, project_id: str) -> ScriptProject:
        return self.store.load(project_id)

    def list_projects(self) -> list[dict]:
        return self.store.list()

    def history(self, project_id: str, stage: Stage | None = None) -> list[RevisionEntry]:
        return self.store.history(project_id, stage)

    # -- agents ------------------------------------------------------------

    def tutor_message(self, project_id: str, stage: Stage, user_message: str) -> tuple[str, TutorSession]:
        project = self.store.load(project_id)
        key = (project_id, stage)
        session = self._sessions.get(key) or TutorSession(project_id=project_id, stage=stage)
        reply, session = tutor_reply(
            session, user_message, project, self.provider, self.settings, now=self.clock()
        )
        self._sessions[key] = session
        return reply, session

    def generate(
        self,
        project_id: str,
        stage: Stage,
        *,
        seed: int | None = None,
        count_hint: int | None = None,
        style_notes: str | None = None,
        expected_revision: int | None = None,
    ) -> ScriptProject:
        options = GenerateOptions(seed=seed, count_hint=count_hint, style_notes=style_notes)
        with self._lock(project_id):
            project = self.store.load(project_id)
            updated = pipeline.generate_stage(
                project,
                stage,
                self._agent,
                options=options,
                expected_revision=expected_revision,
                now=self.clock(),
            )
            self.store.save(updated)
        return updated

    # -- user actions ------------------------------------------------------

    def confirm(
        self,
        project_id: str,
        stage: Stage,
        payload=None,
        *,
        expected_revision: int | None = None,
    ) -> ScriptProject:
        with self._lock(project_id):
            project = self.store.load(project_id)
            updated = pipeline.confirm_stage(
                project, stage, payload, expected_revision=expected_revision, now=self.clock()
            )
            self.store.save(updated)
        return updated

    def edit(
        self,
        project_id: str,
        element_id: str,
        patch: dict,
        *,
        expected_revision: int | None = None,
    ) -> ScriptProject:
        with self._lock(project_id):
            project = self.store.load(project_id)
            updated = pipeline.edit_element(
                project, element_id, patch, expected_revision=expected_revision, now=self.clock()
            )
            self.store.save(updated)
        return updated

    def cascade(
        self,
        project_id: str,
        from_stage: Stage,
        *,
        seed: int | None = None,
        expected_revision: int | None = None,
    ) -> ScriptProject:
        options = GenerateOptions(seed=seed)
        with self._lock(project_id):
            project = self.store.load(project_id)
            try:
                updated = pipeline.regenerate_cascade(
                    project,
                    from_stage,
                    self._agent,
                    options=options,
                    expected_revision=expected_revision,
                    now=self.clock(),
                )
            except CascadeError as exc:
                # Keep the stages that did regenerate; the caller learns
                # which stage failed and can retry from there.
                self.store.save(exc.project)
                raise
            self.store.save(updated)
        return updated

    # -- read models ---------------------------------------------------------

    def staleness(self, project_id: str) -> pipeline.StalenessReport:
        return pipeline.staleness(self.store.load(project_id))

    def diff(self, project_id: str, stage: Stage) -> analytics.DiffReport:
        return analytics.project_diff_report(self.store.load(project_id), stage)

    def export(self, project_id: str, fmt: str = "json") -> str:
        project = self.store.load(project_id)
        if fmt == "json":
            return rendering.export_json(project)
        if fmt == "screenplay":
            return rendering.export_screenplay(project)
        raise ValidationError(
            f"unknown export format {fmt!r}",
            violations=[Violation("UNKNOWN_FORMAT", None, "format must be json or screenplay")],
        )


def demo(seed: int = 7, logline: str | None = None) -> tuple[Engine, str, list[str]]:
    """Run the whole five-stage flow in memory with the mock provider.

    Returns the engine, the project id, and the printable transcript.
    Deterministic for a given seed.
    """
    from .store import MemoryStore

    counter = iter(range(1, 10_000))

    def clock() -> str:
        return f"2024-01-01T00:00:00.{next(counter):06d}+00:00"

    engine = Engine(store=MemoryStore(), provider=MockProvider(seed=seed), clock=clock)
    text = logline or (
        "A night-shift radio host starts taking calls from a listener "
        "who describes tomorrow's news, one night early."
    )
    lines: list[str] = []
    project = engine.create_project(logline_draft=text, title="The Late Line", project_id=f"demo-{seed}")
    pid = project.id
    lines.append(f"project {pid}: logline drafted")
    reply, _ = engine.tutor_message(pid, Stage.LOGLINE, "Does this logline have a clear dramatic question?")
    lines.append(f"logline tutor: {reply}")
    engine.confirm(pid, Stage.LOGLINE)
    lines.append("logline confirmed")
    for stage in (Stage.CHARACTERS, Stage.PLOTS, Stage.SCENES, Stage.DIALOGUES):
        project = engine.generate(pid, stage, seed=seed)
        lines.append(f"{stage.key} generated: {len(project.elements_of(stage))} elements (revision {project.revision})")
        project = engine.confirm(pid, stage)
        lines.append(f"{stage.key} confirmed")
    lines.append("")
    lines.append(engine.export(pid, "screenplay").rstrip("\n"))
    return engine, pid, lines
