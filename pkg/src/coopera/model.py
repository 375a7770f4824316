"""Typed data model for a dramatic script and its project container.

A script is built in five ordered stages (logline, characters, plots,
scenes, dialogues). The project aggregate keeps per-stage status, a
monotonically increasing revision counter, and an append-only revision
log whose snapshots feed the revision analytics.

Plot advances only through speaker-attributed dialogue: a dialogue line
stores the utterance plus at most a short parenthetical delivery note,
never narration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

PARENTHETICAL_MAX_LEN = 80


class Stage(enum.IntEnum):
    """The five pipeline steps, in the only order they may be generated."""

    LOGLINE = 0
    CHARACTERS = 1
    PLOTS = 2
    SCENES = 3
    DIALOGUES = 4

    @property
    def key(self) -> str:
        return self.name.lower()

    @classmethod
    def from_key(cls, key: str) -> "Stage":
        try:
            return cls[key.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown stage: {key!r}") from None

    def upstream(self) -> tuple["Stage", ...]:
        return tuple(Stage(i) for i in range(self.value))

    def downstream(self) -> tuple["Stage", ...]:
        return tuple(Stage(i) for i in range(self.value + 1, len(Stage)))


class StageState(str, enum.Enum):
    EMPTY = "empty"
    DRAFT = "draft"
    CONFIRMED = "confirmed"


class StalenessFlag(str, enum.Enum):
    FRESH = "fresh"
    STALE = "stale"
    EMPTY = "empty"


class Actor(str, enum.Enum):
    USER = "user"
    AGENT = "agent"


class RevisionKind(str, enum.Enum):
    GENERATE = "generate"
    EDIT = "edit"
    CONFIRM = "confirm"
    DELETE = "delete"
    CASCADE_REGENERATE = "cascade_regenerate"


@dataclass
class Logline:
    text: str = ""
    confirmed_at: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"text": self.text, "confirmed_at": self.confirmed_at}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Logline":
        return cls(text=d.get("text", ""), confirmed_at=d.get("confirmed_at"))


@dataclass
class Relationship:
    character_id: str
    description: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"character_id": self.character_id, "description": self.description}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Relationship":
        return cls(character_id=d["character_id"], description=d.get("description", ""))


@dataclass
class Character:
    id: str
    name: str
    personality: str = ""
    background: str = ""
    relationships: list[Relationship] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "personality": self.personality,
            "background": self.background,
            "relationships": [r.to_dict() for r in self.relationships],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Character":
        return cls(
            id=d["id"],
            name=d["name"],
            personality=d.get("personality", ""),
            background=d.get("background", ""),
            relationships=[Relationship.from_dict(r) for r in d.get("relationships", [])],
        )


@dataclass
class PlotElement:
    id: str
    ordinal: int
    title: str
    summary: str = ""
    cause_ids: list[str] = field(default_factory=list)
    involved_character_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "ordinal": self.ordinal,
            "title": self.title,
            "summary": self.summary,
            "cause_ids": list(self.cause_ids),
            "involved_character_ids": list(self.involved_character_ids),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PlotElement":
        return cls(
            id=d["id"],
            ordinal=int(d["ordinal"]),
            title=d["title"],
            summary=d.get("summary", ""),
            cause_ids=list(d.get("cause_ids", [])),
            involved_character_ids=list(d.get("involved_character_ids", [])),
        )


@dataclass
class Scene:
    id: str
    ordinal: int
    setting: str
    time: str = ""
    plot_ids: list[str] = field(default_factory=list)
    participant_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "ordinal": self.ordinal,
            "setting": self.setting,
            "time": self.time,
            "plot_ids": list(self.plot_ids),
            "participant_ids": list(self.participant_ids),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Scene":
        return cls(
            id=d["id"],
            ordinal=int(d["ordinal"]),
            setting=d["setting"],
            time=d.get("time", ""),
            plot_ids=list(d.get("plot_ids", [])),
            participant_ids=list(d.get("participant_ids", [])),
        )


@dataclass
class DialogueLine:
    """One speaker-attributed utterance. ``note`` is the only stage-direction
    concession: a parenthetical delivery cue capped at 80 characters."""

    id: str
    scene_id: str
    ordinal: int
    speaker_id: str
    line: str
    note: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "scene_id": self.scene_id,
            "ordinal": self.ordinal,
            "speaker_id": self.speaker_id,
            "line": self.line,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DialogueLine":
        return cls(
            id=d["id"],
            scene_id=d["scene_id"],
            ordinal=int(d["ordinal"]),
            speaker_id=d["speaker_id"],
            line=d["line"],
            note=d.get("note"),
        )


@dataclass
class StageStatus:
    state: StageState = StageState.EMPTY
    # Hash of upstream confirmed content at the moment this stage was last
    # generated or confirmed; None for the logline (no upstream) and for
    # stages never touched.
    upstream_fingerprint: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"state": self.state.value, "upstream_fingerprint": self.upstream_fingerprint}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "StageStatus":
        return cls(state=StageState(d.get("state", "empty")), upstream_fingerprint=d.get("upstream_fingerprint"))


@dataclass
class RevisionEntry:
    revision: int
    timestamp: str
    actor: Actor
    stage: Stage
    kind: RevisionKind
    before_text: str | None = None
    after_text: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "revision": self.revision,
            "timestamp": self.timestamp,
            "actor": self.actor.value,
            "stage": self.stage.key,
            "kind": self.kind.value,
            "before_text": self.before_text,
            "after_text": self.after_text,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RevisionEntry":
        return cls(
            revision=int(d["revision"]),
            timestamp=d["timestamp"],
            actor=Actor(d["actor"]),
            stage=Stage.from_key(d["stage"]),
            kind=RevisionKind(d["kind"]),
            before_text=d.get("before_text"),
            after_text=d.get("after_text"),
        )


ELEMENT_STAGES = (Stage.CHARACTERS, Stage.PLOTS, Stage.SCENES, Stage.DIALOGUES)

_ELEMENT_TYPES = {
    Stage.CHARACTERS: Character,
    Stage.PLOTS: PlotElement,
    Stage.SCENES: Scene,
    Stage.DIALOGUES: DialogueLine,
}


@dataclass
class ScriptProject:
    """Root aggregate: one script under construction.

    Treated as an immutable value: pipeline operations deep-copy, mutate the
    copy, bump ``revision`` by exactly one per mutation, and return the new
    value. ``element_seq`` backs engine-issued, lexicographically sortable
    element ids (providers never supply ids; agent output is re-keyed).
    """

    id: str
    title: str = ""
    logline: Logline = field(default_factory=Logline)
    characters: list[Character] = field(default_factory=list)
    plots: list[PlotElement] = field(default_factory=list)
    scenes: list[Scene] = field(default_factory=list)
    dialogues: list[DialogueLine] = field(default_factory=list)
    stage_status: dict[Stage, StageStatus] = field(default_factory=dict)
    revision: int = 0
    revision_log: list[RevisionEntry] = field(default_factory=list)
    element_seq: int = 0

    def __post_init__(self):
        for stage in Stage:
            self.stage_status.setdefault(stage, StageStatus())

    # -- element access -------------------------------------------------

    def elements_of(self, stage: Stage) -> list:
        if stage == Stage.CHARACTERS:
            return self.characters
        if stage == Stage.PLOTS:
            return self.plots
        if stage == Stage.SCENES:
            return self.scenes
        if stage == Stage.DIALOGUES:
            return self.dialogues
        raise ValueError(f"{stage.key} has no element collection")

    def set_elements(self, stage: Stage, elements: list) -> None:
        if stage == Stage.CHARACTERS:
            self.characters = list(elements)
        elif stage == Stage.PLOTS:
            self.plots = list(elements)
        elif stage == Stage.SCENES:
            self.scenes = list(elements)
        elif stage == Stage.DIALOGUES:
            self.dialogues = list(elements)
        else:
            raise ValueError(f"{stage.key} has no element collection")

    def find_element(self, element_id: str):
        """Return (stage, element) for an element id, or (None, None)."""
        for stage in ELEMENT_STAGES:
            for el in self.elements_of(stage):
                if el.id == element_id:
                    return stage, el
        return None, None

    def character_by_id(self, character_id: str) -> Character | None:
        for ch in self.characters:
            if ch.id == character_id:
                return ch
        return None

    def next_element_id(self, stage: Stage) -> str:
        """Issue a fresh sortable element id (``ch-000001`` style)."""
        prefix = {Stage.CHARACTERS: "ch", Stage.PLOTS: "pl", Stage.SCENES: "sc", Stage.DIALOGUES: "dl"}[stage]
        self.element_seq += 1
        return f"{prefix}-{self.element_seq:06d}"

    def state_of(self, stage: Stage) -> StageState:
        return self.stage_status[stage].state

    def stage_is_empty(self, stage: Stage) -> bool:
        if stage == Stage.LOGLINE:
            return not self.logline.text.strip()
        return not self.elements_of(stage)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "logline": self.logline.to_dict(),
            "characters": [c.to_dict() for c in self.characters],
            "plots": [p.to_dict() for p in self.plots],
            "scenes": [s.to_dict() for s in self.scenes],
            "dialogues": [d.to_dict() for d in self.dialogues],
            "stage_status": {stage.key: st.to_dict() for stage, st in sorted(self.stage_status.items())},
            "revision": self.revision,
            "revision_log": [e.to_dict() for e in self.revision_log],
            "element_seq": self.element_seq,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ScriptProject":
        return cls(
            id=d["id"],
            title=d.get("title", ""),
            logline=Logline.from_dict(d.get("logline", {})),
            characters=[Character.from_dict(c) for c in d.get("characters", [])],
            plots=[PlotElement.from_dict(p) for p in d.get("plots", [])],
            scenes=[Scene.from_dict(s) for s in d.get("scenes", [])],
            dialogues=[DialogueLine.from_dict(x) for x in d.get("dialogues", [])],
            stage_status={Stage.from_key(k): StageStatus.from_dict(v) for k, v in d.get("stage_status", {}).items()},
            revision=int(d.get("revision", 0)),
            revision_log=[RevisionEntry.from_dict(e) for e in d.get("revision_log", [])],
            element_seq=int(d.get("element_seq", 0)),
        )


def element_from_dict(stage: Stage, d: dict[str, Any]):
    return _ELEMENT_TYPES[stage].from_dict(d)


def new_project(project_id: str, logline_text: str = "", title: str = "") -> ScriptProject:
    """Create an empty project; a non-empty logline draft starts that stage in Draft."""
    project = ScriptProject(id=project_id, title=title, logline=Logline(text=logline_text))
    if logline_text.strip():
        project.stage_status[Stage.LOGLINE].state = StageState.DRAFT
    return project
