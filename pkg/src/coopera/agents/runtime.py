"""Agent execution: convergent generation and divergent coaching.

``run_functional_agent`` drives the full ingestion path: prompt the
provider, recover a structured element list from the reply, resolve
provider-side names and ordinals to engine-issued ids, and validate the
result against the whole project. Any failure turns into a corrective
follow-up message; after 1 + max_repair_retries attempts the last
failure surfaces as SchemaError. Ids are allocated on a throwaway
project clone, so a failed run leaves the caller's project untouched.

Name resolution is exact match first, then case-insensitive, then
failure. Nothing here fuzzy-matches: a misspelled character name is the
provider's error to repair, not ours to guess.

Tutors are the opposite contract: they never return elements and never
touch the project; they only extend their own transcript.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..errors import SchemaError, ValidationError
from ..model import (
    Character,
    DialogueLine,
    PlotElement,
    Relationship,
    Scene,
    ScriptProject,
    Stage,
)
from ..pipeline import place_generated
from ..validation import Violation, validate_project
from .parsing import Diagnostic, parse_structured_output
from .prompts import (
    FUNCTIONAL_TEMPERATURE,
    TUTOR_TEMPERATURE,
    GenerateOptions,
    functional_prompt,
    tutor_prompt,
)
from .provider import ChatMessage, Provider, ProviderOptions


@dataclass
class AgentSettings:
    functional_temperature: float = FUNCTIONAL_TEMPERATURE
    tutor_temperature: float = TUTOR_TEMPERATURE
    max_repair_retries: int = 2
    max_tokens: int = 1600
    timeout: float = 30.0


@dataclass
class AgentOutcome:
    elements: list
    raw_text: str
    attempts: int
    element_seq: int


@dataclass
class TutorMessage:
    role: str  # "user" | "tutor"
    text: str
    timestamp: str

    def to_dict(self) -> dict:
        return {"role": self.role, "text": self.text, "timestamp": self.timestamp}


@dataclass
class TutorSession:
    project_id: str
    stage: Stage
    messages: list[TutorMessage] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "stage": self.stage.key,
            "messages": [m.to_dict() for m in self.messages],
        }


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def tutor_reply(
    session: TutorSession,
    user_message: str,
    project: ScriptProject,
    provider: Provider,
    settings: AgentSettings | None = None,
    now: str | None = None,
) -> tuple[str, TutorSession]:
    """One coaching turn. Returns the reply and a new session value with
    both messages appended; the project is never touched."""
    settings = settings or AgentSettings()
    if not user_message or not user_message.strip():
        raise ValidationError(
            "tutor message must not be empty",
            violations=[Violation("EMPTY_MESSAGE", None, "user_message is empty")],
        )
    history = [
        ChatMessage("user" if m.role == "user" else "assistant", m.text) for m in session.messages
    ]
    history.append(ChatMessage("user", user_message))
    bundle = tutor_prompt(project, session.stage, history)
    options = ProviderOptions(
        temperature=settings.tutor_temperature,
        max_tokens=settings.max_tokens,
        timeout=settings.timeout,
        purpose="tutor",
        stage=session.stage,
        context_data=bundle.context_data,
    )
    reply = provider.complete(bundle.to_messages(), options).strip()
    now = now or _utcnow()
    updated = TutorSession(
        project_id=session.project_id,
        stage=session.stage,
        messages=[
            *session.messages,
            TutorMessage(role="user", text=user_message, timestamp=now),
            TutorMessage(role="tutor", text=reply, timestamp=now),
        ],
    )
    return reply, updated


def run_functional_agent(
    stage: Stage,
    project: ScriptProject,
    options: GenerateOptions | None,
    provider: Provider,
    settings: AgentSettings | None = None,
) -> AgentOutcome:
    """Generate validated, re-keyed elements for one stage."""
    settings = settings or AgentSettings()
    options = options or GenerateOptions()
    bundle = functional_prompt(project, stage, options)
    provider_options = ProviderOptions(
        temperature=settings.functional_temperature,
        max_tokens=settings.max_tokens,
        timeout=settings.timeout,
        purpose="functional",
        stage=stage,
        seed=options.seed,
        context_data=bundle.context_data,
    )
    messages = bundle.to_messages()
    max_attempts = 1 + settings.max_repair_retries
    last_raw = ""
    last_diagnostics: list = []
    last_code: str | None = None
    for attempt in range(1, max_attempts + 1):
        raw = provider.complete(messages, provider_options)
        last_raw = raw
        outcome = parse_structured_output(raw, stage)
        if outcome.ok:
            candidate = ScriptProject.from_dict(project.to_dict())
            try:
                elements = resolve_elements(candidate, stage, outcome.elements)
                place_generated(candidate, stage, elements, candidate.element_seq)
                report = validate_project(candidate)
                if report.ok:
                    return AgentOutcome(
                        elements=elements,
                        raw_text=raw,
                        attempts=attempt,
                        element_seq=candidate.element_seq,
                    )
                problems = report.violations
            except ValidationError as exc:
                problems = exc.violations or [Violation("INVALID_CONTENT", None, exc.message)]
            last_diagnostics = problems
            last_code = problems[0].code if problems else None
            correction = (
                "Your reply parsed, but the content breaks these rules: "
                + "; ".join(v.message for v in problems)
                + ". Reply again with exactly one fenced JSON block that fixes every point."
            )
        else:
            last_diagnostics = outcome.diagnostics
            last_code = None
            correction = (
                "Your reply could not be used: "
                + "; ".join(d.message for d in outcome.diagnostics)
                + ". Reply again with exactly one fenced JSON block in the required shape."
            )
        messages = [*messages, ChatMessage("assistant", raw), ChatMessage("user", correction)]
    raise SchemaError(
        f"no valid {stage.key} after {max_attempts} attempts",
        code=last_code,
        raw_text=last_raw,
        diagnostics=last_diagnostics,
    )


class FunctionalAgent:
    """Adapter matching the pipeline's AgentRunner callable shape."""

    def __init__(self, provider: Provider, settings: AgentSettings | None = None):
        self.provider = provider
        self.settings = settings or AgentSettings()

    def __call__(self, project: ScriptProject, stage: Stage, options: GenerateOptions | None) -> AgentOutcome:
        return run_functional_agent(stage, project, options, self.provider, self.settings)


def resolve_elements(project: ScriptProject, stage: Stage, parsed: list[dict]) -> list:
    """Model elements from normalized provider dicts, with ids issued by
    the project (mutates its id counter; run this on a clone)."""
    if stage == Stage.CHARACTERS:
        return _resolve_characters(project, parsed)
    if stage == Stage.PLOTS:
        return _resolve_plots(project, parsed)
    if stage == Stage.SCENES:
        return _resolve_scenes(project, parsed)
    if stage == Stage.DIALOGUES:
        return _resolve_dialogues(project, parsed)
    raise ValueError(f"stage {stage.key} has no element resolution")


def _fail(violations: list[Violation]) -> None:
    if violations:
        raise ValidationError(
            "; ".join(v.message for v in violations),
            violations=violations,
        )


def _name_index(names: list[str]) -> dict[str, str]:
    """name -> name lookup honoring exact-before-case-insensitive."""
    index: dict[str, str] = {}
    for name in names:
        index.setdefault(name.strip().lower(), name)
    return index


def _character_lookup(project: ScriptProject) -> dict[str, str]:
    lookup: dict[str, str] = {}
    for ch in project.characters:
        lookup[ch.name] = ch.id
    for ch in project.characters:
        lookup.setdefault(ch.name.strip().lower(), ch.id)
    return lookup


def _find_character(lookup: dict[str, str], name: str) -> str | None:
    return lookup.get(name.strip()) or lookup.get(name.strip().lower())


def _resolve_characters(project: ScriptProject, parsed: list[dict]) -> list[Character]:
    violations: list[Violation] = []
    built: list[tuple[Character, dict]] = []
    by_name: dict[str, Character] = {}
    for record in parsed:
        name = record["name"].strip()
        character = Character(
            id=project.next_element_id(Stage.CHARACTERS),
            name=name,
            personality=record.get("personality", ""),
            background=record.get("background", ""),
        )
        key = name.lower()
        if key in by_name:
            violations.append(Violation("DUPLICATE_NAME", character.id, f"character name {name!r} appears twice"))
        by_name[key] = character
        built.append((character, record))
    for character, record in built:
        for rel in record.get("relationships", []):
            target = by_name.get(rel["with"].strip().lower())
            if target is None:
                violations.append(
                    Violation(
                        "UNKNOWN_CHARACTER",
                        character.id,
                        f"relationship names {rel['with']!r}, which is not in the generated cast",
                    )
                )
            elif target is not character:
                character.relationships.append(
                    Relationship(character_id=target.id, description=rel.get("description", ""))
                )
    _fail(violations)
    return [character for character, _ in built]


def _ordered(parsed: list[dict]) -> list[dict]:
    hints = [record.get("ordinal") for record in parsed]
    if all(isinstance(h, int) for h in hints) and len(set(hints)) == len(hints):
        return sorted(parsed, key=lambda record: record["ordinal"])
    return parsed


def _resolve_plots(project: ScriptProject, parsed: list[dict]) -> list[PlotElement]:
    violations: list[Violation] = []
    lookup = _character_lookup(project)
    ordered = _ordered(parsed)
    plots: list[PlotElement] = []
    for position, record in enumerate(ordered, start=1):
        plot = PlotElement(
            id=project.next_element_id(Stage.PLOTS),
            ordinal=position,
            title=record["title"].strip(),
            summary=record.get("summary", ""),
        )
        for cause in record.get("causes", []):
            if not 1 <= cause < position:
                violations.append(
                    Violation(
                        "CAUSE_NOT_EARLIER",
                        plot.id,
                        f"plot {position} lists cause {cause}, which is not an earlier ordinal",
                    )
                )
            else:
                plot.cause_ids.append(plots[cause - 1].id)
        for name in record.get("characters", []):
            cid = _find_character(lookup, name)
            if cid is None:
                violations.append(
                    Violation("UNKNOWN_CHARACTER", plot.id, f"plot {position} involves unknown character {name!r}")
                )
            elif cid not in plot.involved_character_ids:
                plot.involved_character_ids.append(cid)
        if not plot.involved_character_ids and not any(v.element_id == plot.id for v in violations):
            violations.append(Violation("EMPTY_INVOLVED", plot.id, f"plot {position} involves no characters"))
        plots.append(plot)
    _fail(violations)
    return plots


def _resolve_scenes(project: ScriptProject, parsed: list[dict]) -> list[Scene]:
    violations: list[Violation] = []
    lookup = _character_lookup(project)
    plot_by_ordinal = {p.ordinal: p for p in project.plots}
    scenes: list[Scene] = []
    for position, record in enumerate(_ordered(parsed), start=1):
        scene = Scene(
            id=project.next_element_id(Stage.SCENES),
            ordinal=position,
            setting=record["setting"].strip(),
            time=record.get("time", "").strip(),
        )
        for ordinal in record.get("plots", []):
            plot = plot_by_ordinal.get(ordinal)
            if plot is None:
                violations.append(
                    Violation("UNKNOWN_PLOT", scene.id, f"scene {position} covers unknown plot ordinal {ordinal}")
                )
            else:
                scene.plot_ids.append(plot.id)
        for name in record.get("participants", []):
            cid = _find_character(lookup, name)
            if cid is None:
                violations.append(
                    Violation("UNKNOWN_CHARACTER", scene.id, f"scene {position} lists unknown participant {name!r}")
                )
            elif cid not in scene.participant_ids:
                scene.participant_ids.append(cid)
        scenes.append(scene)
    _fail(violations)
    return scenes


def _resolve_dialogues(project: ScriptProject, parsed: list[dict]) -> list[DialogueLine]:
    violations: list[Violation] = []
    lookup = _character_lookup(project)
    scene_by_ordinal = {s.ordinal: s for s in project.scenes}
    counters: dict[str, int] = {}
    lines: list[DialogueLine] = []
    for position, record in enumerate(parsed, start=1):
        line_id = project.next_element_id(Stage.DIALOGUES)
        scene = scene_by_ordinal.get(record["scene"])
        if scene is None:
            violations.append(
                Violation("UNKNOWN_SCENE", line_id, f"line {position} targets unknown scene ordinal {record['scene']}")
            )
            continue
        speaker_id = _find_character(lookup, record["speaker"])
        if speaker_id is None:
            violations.append(
                Violation("UNKNOWN_CHARACTER", line_id, f"line {position} has unknown speaker {record['speaker']!r}")
            )
            continue
        counters[scene.id] = counters.get(scene.id, 0) + 1
        lines.append(
            DialogueLine(
                id=line_id,
                scene_id=scene.id,
                ordinal=counters[scene.id],
                speaker_id=speaker_id,
                line=record["line"],
                note=record.get("note"),
            )
        )
    _fail(violations)
    return lines
