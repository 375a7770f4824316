"""Project-wide invariant checking.

``validate_project`` never raises: it walks the whole aggregate and
reports machine-readable violations (code + element id + message), in a
deterministic order. An empty report means every invariant holds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .model import (
    PARENTHETICAL_MAX_LEN,
    Actor,
    RevisionKind,
    ScriptProject,
    Stage,
    StageState,
)


@dataclass
class Violation:
    code: str
    element_id: str | None
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "element_id": self.element_id, "message": self.message}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def validate_project(project: ScriptProject) -> ValidationReport:
    out: list[Violation] = []
    _check_stage_status(project, out)
    _check_logline(project, out)
    _check_unique_ids(project, out)
    _check_characters(project, out)
    _check_plots(project, out)
    _check_scenes(project, out)
    _check_dialogues(project, out)
    _check_revision_log(project, out)
    return ValidationReport(out)


def _check_stage_status(project: ScriptProject, out: list[Violation]) -> None:
    for stage in Stage:
        status = project.stage_status.get(stage)
        if status is None:
            out.append(Violation("MISSING_STAGE_STATUS", stage.key, f"no status entry for stage {stage.key}"))
            continue
        if status.state == StageState.CONFIRMED and project.stage_is_empty(stage):
            out.append(Violation("CONFIRMED_EMPTY", stage.key, f"stage {stage.key} is confirmed but has no content"))


def _check_logline(project: ScriptProject, out: list[Violation]) -> None:
    status = project.stage_status.get(Stage.LOGLINE)
    if status and status.state == StageState.CONFIRMED and not project.logline.text.strip():
        out.append(Violation("EMPTY_LOGLINE", None, "confirmed logline text is empty"))


def _check_unique_ids(project: ScriptProject, out: list[Violation]) -> None:
    seen: set[str] = set()
    for stage in (Stage.CHARACTERS, Stage.PLOTS, Stage.SCENES, Stage.DIALOGUES):
        for el in project.elements_of(stage):
            if el.id in seen:
                out.append(Violation("DUPLICATE_ID", el.id, f"element id {el.id} appears more than once"))
            seen.add(el.id)


def _check_characters(project: ScriptProject, out: list[Violation]) -> None:
    ids = {c.id for c in project.characters}
    names_seen: set[str] = set()
    for ch in project.characters:
        if not ch.name.strip():
            out.append(Violation("EMPTY_NAME", ch.id, "character name is empty"))
        lowered = ch.name.strip().lower()
        if lowered and lowered in names_seen:
            out.append(Violation("DUPLICATE_NAME", ch.id, f"character name {ch.name!r} is not unique (case-insensitive)"))
        names_seen.add(lowered)
        for rel in ch.relationships:
            if rel.character_id not in ids:
                out.append(
                    Violation("UNKNOWN_CHARACTER", ch.id, f"relationship targets unknown character {rel.character_id!r}")
                )


def _check_ordinals(elements, label: str, out: list[Violation]) -> None:
    seen: set[int] = set()
    for el in elements:
        if el.ordinal in seen:
            out.append(Violation("DUPLICATE_ORDINAL", el.id, f"{label} ordinal {el.ordinal} duplicated"))
        seen.add(el.ordinal)
    expected = set(range(1, len(elements) + 1))
    if seen != expected and len(seen) == len(elements):
        # Report gaps only when there are no duplicates, to keep one cause per report.
        missing = sorted(expected - seen)
        out.append(Violation("ORDINAL_GAP", None, f"{label} ordinals are not contiguous 1..{len(elements)} (missing {missing})"))


def _check_plots(project: ScriptProject, out: list[Violation]) -> None:
    _check_ordinals(project.plots, "plot", out)
    by_id = {p.id: p for p in project.plots}
    character_ids = {c.id for c in project.characters}
    for plot in project.plots:
        if not plot.title.strip():
            out.append(Violation("EMPTY_TITLE", plot.id, "plot title is empty"))
        if not plot.involved_character_ids:
            out.append(Violation("EMPTY_INVOLVED", plot.id, "plot element involves no characters"))
        for cause_id in plot.cause_ids:
            cause = by_id.get(cause_id)
            if cause is None:
                out.append(Violation("UNKNOWN_PLOT", plot.id, f"cause {cause_id!r} does not resolve to a plot element"))
            elif cause.ordinal >= plot.ordinal:
                out.append(
                    Violation(
                        "CAUSE_NOT_EARLIER",
                        plot.id,
                        f"cause {cause_id} has ordinal {cause.ordinal}, not earlier than {plot.ordinal}",
                    )
                )
        for cid in plot.involved_character_ids:
            if cid not in character_ids:
                out.append(Violation("UNKNOWN_CHARACTER", plot.id, f"involved character {cid!r} does not resolve"))


def _user_added_participant(project: ScriptProject, scene_id: str, participant_id: str) -> bool:
    """A participant outside the scene's plots is allowed when a user edit
    to that scene deliberately introduced it (recorded in the revision log)."""
    for entry in project.revision_log:
        if entry.kind != RevisionKind.EDIT or entry.actor != Actor.USER or entry.stage != Stage.SCENES:
            continue
        if not entry.after_text:
            continue
        try:
            snap = json.loads(entry.after_text)
        except ValueError:
            continue
        if isinstance(snap, dict) and snap.get("id") == scene_id and participant_id in snap.get("participant_ids", []):
            return True
    return False


def _check_scenes(project: ScriptProject, out: list[Violation]) -> None:
    _check_ordinals(project.scenes, "scene", out)
    plot_by_id = {p.id: p for p in project.plots}
    character_ids = {c.id for c in project.characters}
    for scene in project.scenes:
        if not scene.setting.strip():
            out.append(Violation("EMPTY_SETTING", scene.id, "scene setting is empty"))
        if not scene.plot_ids:
            out.append(Violation("EMPTY_PLOT_REFS", scene.id, "scene references no plot elements"))
        if not scene.participant_ids:
            out.append(Violation("EMPTY_PARTICIPANTS", scene.id, "scene has no participants"))
        involved: set[str] = set()
        for pid in scene.plot_ids:
            plot = plot_by_id.get(pid)
            if plot is None:
                out.append(Violation("UNKNOWN_PLOT", scene.id, f"plot {pid!r} does not resolve"))
            else:
                involved.update(plot.involved_character_ids)
        for cid in scene.participant_ids:
            if cid not in character_ids:
                out.append(Violation("UNKNOWN_CHARACTER", scene.id, f"participant {cid!r} does not resolve"))
            elif cid not in involved and not _user_added_participant(project, scene.id, cid):
                out.append(
                    Violation(
                        "PARTICIPANT_NOT_IN_PLOTS",
                        scene.id,
                        f"participant {cid} is in none of the scene's plot elements and was not added by a user edit",
                    )
                )


def _check_dialogues(project: ScriptProject, out: list[Violation]) -> None:
    scene_by_id = {s.id: s for s in project.scenes}
    character_ids = {c.id for c in project.characters}
    per_scene: dict[str, list] = {}
    for line in project.dialogues:
        per_scene.setdefault(line.scene_id, []).append(line)
        scene = scene_by_id.get(line.scene_id)
        if scene is None:
            out.append(Violation("UNKNOWN_SCENE", line.id, f"scene {line.scene_id!r} does not resolve"))
        if line.speaker_id not in character_ids:
            out.append(Violation("UNKNOWN_CHARACTER", line.id, f"speaker {line.speaker_id!r} does not resolve"))
        elif scene is not None and line.speaker_id not in scene.participant_ids:
            out.append(
                Violation(
                    "SPEAKER_NOT_IN_SCENE",
                    line.id,
                    f"speaker {line.speaker_id} is not a participant of scene {line.scene_id}",
                )
            )
        if not line.line.strip():
            out.append(Violation("EMPTY_LINE", line.id, "dialogue line text is empty"))
        if line.note is not None and len(line.note) > PARENTHETICAL_MAX_LEN:
            out.append(
                Violation(
                    "NOTE_TOO_LONG",
                    line.id,
                    f"delivery note is {len(line.note)} chars (max {PARENTHETICAL_MAX_LEN})",
                )
            )
    for scene_id, lines in sorted(per_scene.items()):
        if scene_id in scene_by_id:
            _check_ordinals(lines, f"dialogue (scene {scene_id})", out)


def _check_revision_log(project: ScriptProject, out: list[Violation]) -> None:
    prev = 0
    for entry in project.revision_log:
        if entry.revision != prev + 1:
            out.append(
                Violation(
                    "REVISION_NOT_MONOTONIC",
                    None,
                    f"revision log jumps from {prev} to {entry.revision}; must increase by exactly 1",
                )
            )
        prev = entry.revision
        if entry.kind == RevisionKind.GENERATE and entry.actor != Actor.AGENT:
            out.append(Violation("BAD_ACTOR", None, f"generate entry at revision {entry.revision} must have actor=agent"))
        if entry.kind in (RevisionKind.EDIT, RevisionKind.CONFIRM) and entry.actor != Actor.USER:
            out.append(
                Violation("BAD_ACTOR", None, f"{entry.kind.value} entry at revision {entry.revision} must have actor=user")
            )
    if project.revision_log and project.revision != project.revision_log[-1].revision:
        out.append(
            Violation(
                "REVISION_MISMATCH",
                None,
                f"project revision {project.revision} does not match last log entry {project.revision_log[-1].revision}",
            )
        )
