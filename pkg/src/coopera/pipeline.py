"""The five-stage state machine.

Operations never mutate their input: each returns a new project value
with the revision incremented and an entry appended to the log. Callers
that need serialized writes (the engine) hold a per-project lock around
load-op-save; the functions themselves are pure.

Stage rules: generating or confirming stage k requires stages 0..k-1
all Confirmed. Generation replaces the stage's content with re-keyed
elements and clears everything downstream (regenerated ids would orphan
downstream references). Edits never change stage states; downstream
stages become Stale through fingerprint drift, which is advisory, not
blocking.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Protocol, Sequence

from .canonical import canonical_json, elements_snapshot, upstream_fingerprint
from .errors import (
    CascadeError,
    ConflictError,
    CooperaError,
    NotFoundError,
    StageOrderError,
    ValidationError,
)
from .model import (
    Actor,
    Relationship,
    RevisionEntry,
    RevisionKind,
    ScriptProject,
    Stage,
    StageState,
    StageStatus,
    StalenessFlag,
    element_from_dict,
)
from .validation import Violation, validate_project

ACTIONS = ("generate", "confirm", "edit", "cascade")


@dataclass(frozen=True)
class StageTransition:
    stage: Stage
    action: str
    resulting_state: StageState


@dataclass
class StalenessReport:
    flags: dict[Stage, StalenessFlag]

    def of(self, stage: Stage) -> StalenessFlag:
        return self.flags[stage]

    def to_dict(self) -> dict[str, str]:
        return {stage.key: self.flags[stage].value for stage in Stage}


class AgentRunner(Protocol):
    """What the pipeline needs from the agents module: produce validated,
    re-keyed elements for a stage. ``element_seq`` is the project id
    counter after allocation, replayed onto the project on apply."""

    def __call__(self, project: ScriptProject, stage: Stage, options) -> "GeneratedElements": ...


class GeneratedElements(Protocol):
    elements: Sequence
    element_seq: int
    raw_text: str


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def _clone(project: ScriptProject) -> ScriptProject:
    return ScriptProject.from_dict(project.to_dict())


def _check_revision(project: ScriptProject, expected_revision: int | None) -> None:
    if expected_revision is not None and expected_revision != project.revision:
        raise ConflictError(
            f"expected revision {expected_revision}, but project {project.id} is at revision {project.revision}"
        )


def _append_entry(
    project: ScriptProject,
    *,
    actor: Actor,
    stage: Stage,
    kind: RevisionKind,
    before: str | None,
    after: str | None,
    now: str,
) -> None:
    project.revision += 1
    project.revision_log.append(
        RevisionEntry(
            revision=project.revision,
            timestamp=now,
            actor=actor,
            stage=stage,
            kind=kind,
            before_text=before,
            after_text=after,
        )
    )


def _require_valid(project: ScriptProject) -> None:
    report = validate_project(project)
    if not report.ok:
        summary = "; ".join(f"{v.code}({v.element_id or '-'})" for v in report.violations)
        raise ValidationError(f"project invariants violated: {summary}", violations=report.violations)


def transition(project: ScriptProject, stage: Stage, action: str) -> StageTransition:
    """Check the stage-order rules for an intended action; raises
    StageOrderError when they forbid it."""
    if action not in ACTIONS:
        raise ValueError(f"unknown action {action!r}")
    if action in ("generate", "cascade") and stage == Stage.LOGLINE:
        raise StageOrderError("the logline is written by the user, not generated")
    if action in ("generate", "confirm", "cascade"):
        for upstream in stage.upstream():
            if project.state_of(upstream) != StageState.CONFIRMED:
                raise StageOrderError(
                    f"cannot {action} {stage.key}: stage {upstream.key} is not confirmed"
                )
    resulting = {
        "generate": StageState.DRAFT,
        "confirm": StageState.CONFIRMED,
        "cascade": StageState.CONFIRMED,
        "edit": project.state_of(stage),
    }[action]
    return StageTransition(stage=stage, action=action, resulting_state=resulting)


def staleness(project: ScriptProject) -> StalenessReport:
    """Pure function of project content; Stale means the recorded
    upstream fingerprint no longer matches the confirmed upstream."""
    flags: dict[Stage, StalenessFlag] = {}
    for stage in Stage:
        if project.state_of(stage) == StageState.EMPTY:
            flags[stage] = StalenessFlag.EMPTY
        else:
            recorded = project.stage_status[stage].upstream_fingerprint
            current = upstream_fingerprint(project, stage)
            flags[stage] = StalenessFlag.FRESH if recorded == current else StalenessFlag.STALE
    return StalenessReport(flags=flags)


def place_generated(project: ScriptProject, stage: Stage, elements: Sequence, element_seq: int) -> None:
    """Install generated elements on a project in place: replace the
    stage content, clear all downstream stages, mark the stage Draft.
    Shared by apply and by the agent's pre-flight candidate check."""
    project.set_elements(stage, list(elements))
    project.element_seq = max(project.element_seq, element_seq)
    for downstream in stage.downstream():
        project.set_elements(downstream, [])
        project.stage_status[downstream] = StageStatus()
    project.stage_status[stage] = StageStatus(
        state=StageState.DRAFT,
        upstream_fingerprint=upstream_fingerprint(project, stage),
    )


def generate_stage(
    project: ScriptProject,
    stage: Stage,
    agent: AgentRunner,
    *,
    options=None,
    expected_revision: int | None = None,
    now: str | None = None,
) -> ScriptProject:
    """Run the stage's functional agent and install its output as a
    draft. Downstream content is cleared; see module docstring."""
    _check_revision(project, expected_revision)
    transition(project, stage, "generate")
    outcome = agent(project, stage, options)
    now = now or _utcnow()
    updated = _clone(project)
    before = elements_snapshot(updated, stage)
    place_generated(updated, stage, outcome.elements, outcome.element_seq)
    _append_entry(
        updated,
        actor=Actor.AGENT,
        stage=stage,
        kind=RevisionKind.GENERATE,
        before=before,
        after=elements_snapshot(updated, stage),
        now=now,
    )
    _require_valid(updated)
    return updated


def _payload_elements(project: ScriptProject, stage: Stage, payload: Sequence[dict]) -> list:
    """Canonical element dicts from a confirm payload, with engine-issued
    ids (and positional ordinals) filled in where the caller left them out."""
    elements = []
    dialogue_counters: dict[str, int] = {}
    for position, raw in enumerate(payload, start=1):
        if not isinstance(raw, dict):
            raise ValidationError(
                f"{stage.key} payload entries must be objects",
                violations=[Violation("BAD_PAYLOAD", None, f"entry {position} is not an object")],
            )
        record = dict(raw)
        if not record.get("id"):
            record["id"] = project.next_element_id(stage)
        if "ordinal" not in record or record["ordinal"] in (None, ""):
            if stage == Stage.DIALOGUES:
                scene_id = record.get("scene_id", "")
                dialogue_counters[scene_id] = dialogue_counters.get(scene_id, 0) + 1
                record["ordinal"] = dialogue_counters[scene_id]
            else:
                record["ordinal"] = position
        try:
            elements.append(element_from_dict(stage, record))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(
                f"{stage.key} payload entry {position} is malformed: {exc}",
                violations=[Violation("BAD_PAYLOAD", record.get("id"), str(exc))],
            ) from exc
    return elements


def confirm_stage(
    project: ScriptProject,
    stage: Stage,
    payload=None,
    *,
    expected_revision: int | None = None,
    now: str | None = None,
) -> ScriptProject:
    """Confirm a stage, optionally replacing its content with the given
    payload first (logline: text; other stages: element dicts). Without
    a payload this blesses the current draft, or re-blesses confirmed
    content whose upstream drifted."""
    _check_revision(project, expected_revision)
    transition(project, stage, "confirm")
    now = now or _utcnow()
    updated = _clone(project)
    before = elements_snapshot(updated, stage)

    if stage == Stage.LOGLINE:
        if payload is not None:
            if not isinstance(payload, str):
                raise ValidationError(
                    "logline payload must be text",
                    violations=[Violation("BAD_PAYLOAD", None, "expected a string")],
                )
            updated.logline.text = payload
        if not updated.logline.text.strip():
            raise ValidationError(
                "cannot confirm an empty logline",
                violations=[Violation("EMPTY_LOGLINE", None, "logline text is empty after trimming")],
            )
        updated.logline.confirmed_at = now
    else:
        if payload is not None:
            updated.set_elements(stage, _payload_elements(updated, stage, payload))
        if updated.stage_is_empty(stage):
            raise ValidationError(
                f"cannot confirm {stage.key} with no content",
                violations=[Violation("CONFIRMED_EMPTY", stage.key, "stage has no elements")],
            )

    updated.stage_status[stage] = StageStatus(
        state=StageState.CONFIRMED,
        upstream_fingerprint=upstream_fingerprint(updated, stage),
    )
    _append_entry(
        updated,
        actor=Actor.USER,
        stage=stage,
        kind=RevisionKind.CONFIRM,
        before=before,
        after=elements_snapshot(updated, stage),
        now=now,
    )
    _require_valid(updated)
    return updated


_PATCHABLE: dict[Stage, dict[str, Callable]] = {
    Stage.CHARACTERS: {
        "name": str,
        "personality": str,
        "background": str,
        "relationships": lambda v: [Relationship.from_dict(r) for r in v],
    },
    Stage.PLOTS: {
        "ordinal": int,
        "title": str,
        "summary": str,
        "cause_ids": lambda v: [str(x) for x in v],
        "involved_character_ids": lambda v: [str(x) for x in v],
    },
    Stage.SCENES: {
        "ordinal": int,
        "setting": str,
        "time": str,
        "plot_ids": lambda v: [str(x) for x in v],
        "participant_ids": lambda v: [str(x) for x in v],
    },
    Stage.DIALOGUES: {
        "ordinal": int,
        "scene_id": str,
        "speaker_id": str,
        "line": str,
        "note": lambda v: None if v is None else str(v),
    },
}


def edit_element(
    project: ScriptProject,
    element_id: str,
    patch: dict,
    *,
    expected_revision: int | None = None,
    now: str | None = None,
) -> ScriptProject:
    """Apply a field-level patch to one element (or to the logline via
    the pseudo-id "logline"). Stage states are untouched; staleness of
    downstream stages follows from the fingerprint change."""
    _check_revision(project, expected_revision)
    if not isinstance(patch, dict) or not patch:
        raise ValidationError(
            "patch must be a non-empty object",
            violations=[Violation("BAD_PAYLOAD", element_id, "empty or non-object patch")],
        )
    now = now or _utcnow()
    updated = _clone(project)

    if element_id == "logline":
        unknown = set(patch) - {"text"}
        if unknown:
            raise ValidationError(
                f"logline has no fields {sorted(unknown)}",
                violations=[Violation("UNKNOWN_FIELD", element_id, f"unknown fields {sorted(unknown)}")],
            )
        before = elements_snapshot(updated, Stage.LOGLINE)
        updated.logline.text = str(patch["text"])
        status = updated.stage_status[Stage.LOGLINE]
        if status.state == StageState.EMPTY and updated.logline.text.strip():
            status.state = StageState.DRAFT
        _append_entry(
            updated,
            actor=Actor.USER,
            stage=Stage.LOGLINE,
            kind=RevisionKind.EDIT,
            before=before,
            after=elements_snapshot(updated, Stage.LOGLINE),
            now=now,
        )
        _require_valid(updated)
        return updated

    stage, element = updated.find_element(element_id)
    if stage is None or element is None:
        raise NotFoundError(f"no element {element_id!r} in project {project.id}")
    coercers = _PATCHABLE[stage]
    unknown = set(patch) - set(coercers)
    if unknown:
        raise ValidationError(
            f"{stage.key} elements have no fields {sorted(unknown)}",
            violations=[Violation("UNKNOWN_FIELD", element_id, f"unknown fields {sorted(unknown)}")],
        )
    before = _element_snapshot(element)
    for name, value in patch.items():
        try:
            setattr(element, name, coercers[name](value))
        except (TypeError, ValueError, KeyError) as exc:
            raise ValidationError(
                f"field {name!r}: cannot apply value {value!r}",
                violations=[Violation("WRONG_TYPE", element_id, f"field {name!r}: {exc}")],
            ) from exc
    _append_entry(
        updated,
        actor=Actor.USER,
        stage=stage,
        kind=RevisionKind.EDIT,
        before=before,
        after=_element_snapshot(element),
        now=now,
    )
    _require_valid(updated)
    return updated


def _element_snapshot(element) -> str:
    return canonical_json(element.to_dict())


def delete_element(
    project: ScriptProject,
    element_id: str,
    *,
    expected_revision: int | None = None,
    now: str | None = None,
) -> ScriptProject:
    """Remove one element. Ordinals of the remaining siblings (and, for
    dialogue, of the owning scene's remaining lines) are compacted so the
    contiguity invariant survives; anything still referencing the element
    makes the delete fail validation."""
    _check_revision(project, expected_revision)
    now = now or _utcnow()
    updated = _clone(project)
    stage, element = updated.find_element(element_id)
    if stage is None or element is None:
        raise NotFoundError(f"no element {element_id!r} in project {project.id}")
    before = _element_snapshot(element)
    remaining = [el for el in updated.elements_of(stage) if el.id != element_id]
    if stage == Stage.DIALOGUES:
        counters: dict[str, int] = {}
        for line in remaining:
            counters[line.scene_id] = counters.get(line.scene_id, 0) + 1
            line.ordinal = counters[line.scene_id]
    elif stage in (Stage.PLOTS, Stage.SCENES):
        for position, el in enumerate(sorted(remaining, key=lambda e: e.ordinal), start=1):
            el.ordinal = position
    updated.set_elements(stage, remaining)
    _append_entry(
        updated,
        actor=Actor.USER,
        stage=stage,
        kind=RevisionKind.DELETE,
        before=before,
        after=None,
        now=now,
    )
    _require_valid(updated)
    return updated


def regenerate_cascade(
    project: ScriptProject,
    from_stage: Stage,
    agent: AgentRunner,
    *,
    options=None,
    expected_revision: int | None = None,
    now: str | None = None,
) -> ScriptProject:
    """Generate and auto-confirm every stage from ``from_stage`` down,
    bracketed by CascadeRegenerate log entries. A mid-cascade failure
    raises CascadeError carrying the partial project: completed stages
    stay confirmed, nothing is rolled back."""
    _check_revision(project, expected_revision)
    transition(project, from_stage, "cascade")
    now = now or _utcnow()
    updated = _clone(project)
    _append_entry(
        updated,
        actor=Actor.USER,
        stage=from_stage,
        kind=RevisionKind.CASCADE_REGENERATE,
        before=None,
        after=None,
        now=now,
    )
    run = [from_stage, *from_stage.downstream()]
    for stage in run:
        try:
            updated = generate_stage(updated, stage, agent, options=options, now=now)
            updated = _auto_confirm(updated, stage, now=now)
        except CooperaError as exc:
            raise CascadeError(
                f"cascade failed at stage {stage.key}: {exc.message}",
                failed_stage=stage,
                cause=exc,
                project=updated,
            ) from exc
    _append_entry(
        updated,
        actor=Actor.USER,
        stage=from_stage,
        kind=RevisionKind.CASCADE_REGENERATE,
        before=None,
        after=None,
        now=now,
    )
    return updated


def _auto_confirm(project: ScriptProject, stage: Stage, *, now: str) -> ScriptProject:
    return confirm_stage(project, stage, None, now=now)
