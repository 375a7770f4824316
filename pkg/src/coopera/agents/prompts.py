"""Prompt assembly.

Templates are text assets next to this module, one per agent and stage,
each with a ``template: <name> v<N>`` header line and ``[system]`` /
``[task]`` sections. Substitution is plain ``{{placeholder}}``
replacement; an unresolved placeholder raises, so template and code
drift is caught immediately instead of leaking braces into a prompt.

A bundle separates the agent's standing instructions (system_text), the
serialized confirmed upstream content (context_text; drafts never enter
it), and the stage task (task_text). Tutor bundles also carry the chat
history. Placeholder inventory: every template may use {{title}} and
{{stage_content}} (the current draft, tutors only); functional plots
adds {{character_names}}, scenes {{plot_directory}}, dialogues
{{scene_directory}}.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from ..model import ScriptProject, Stage, StageState
from ..rendering import character_name_map, render_stage
from .provider import ChatMessage

TUTOR_TEMPERATURE = 0.8
FUNCTIONAL_TEMPERATURE = 0.3

_PLACEHOLDER_RE = re.compile(r"\{\{(\w+)\}\}")

TUTOR_TEMPLATES = {stage: f"tutor_{stage.key}" for stage in Stage}
FUNCTIONAL_TEMPLATES = {stage: f"functional_{stage.key}" for stage in Stage if stage != Stage.LOGLINE}


@dataclass(frozen=True)
class GenerateOptions:
    seed: int | None = None
    count_hint: int | None = None
    style_notes: str | None = None


@lru_cache(maxsize=None)
def load_template(name: str) -> dict[str, str]:
    text = (resources.files(__package__) / "templates" / f"{name}.txt").read_text(encoding="utf-8")
    lines = text.splitlines()
    if lines and lines[0].startswith("template:"):
        lines = lines[1:]
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for line in lines:
        marker = line.strip()
        if marker in ("[system]", "[task]"):
            current = sections.setdefault(marker[1:-1], [])
            continue
        if current is not None:
            current.append(line)
    if "system" not in sections or "task" not in sections:
        raise ValueError(f"template {name} must contain [system] and [task] sections")
    return {key: "\n".join(body).strip() for key, body in sections.items()}


def render_template(text: str, values: dict[str, str]) -> str:
    def substitute(match: re.Match) -> str:
        key = match.group(1)
        if key not in values:
            raise KeyError(f"template references unknown placeholder {{{{{key}}}}}")
        return values[key]

    return _PLACEHOLDER_RE.sub(substitute, text)


@dataclass
class PromptBundle:
    stage: Stage
    purpose: str  # "functional" | "tutor"
    system_text: str
    context_text: str
    task_text: str
    history: list[ChatMessage] = field(default_factory=list)
    temperature: float = FUNCTIONAL_TEMPERATURE
    context_data: dict = field(default_factory=dict)

    def to_messages(self) -> list[ChatMessage]:
        if self.purpose == "tutor":
            system = "\n\n".join(part for part in (self.system_text, self.context_text, self.task_text) if part)
            return [ChatMessage("system", system), *self.history]
        user = "\n\n".join(part for part in (self.context_text, self.task_text) if part)
        return [ChatMessage("system", self.system_text), ChatMessage("user", user)]


def confirmed_context(project: ScriptProject, stage: Stage) -> str:
    """Upstream content serialized for the prompt; confirmed stages only."""
    blocks = []
    for upstream in stage.upstream():
        if project.state_of(upstream) == StageState.CONFIRMED:
            blocks.append(f"Confirmed {upstream.key}:\n{render_stage(project, upstream)}")
    return "\n\n".join(blocks)


def _or_placeholder(text: str) -> str:
    return text if text.strip() else "(none yet)"


def _template_values(project: ScriptProject, stage: Stage) -> dict[str, str]:
    values = {
        "title": project.title or "Untitled",
        "stage_content": _or_placeholder(render_stage(project, stage)),
    }
    if stage == Stage.PLOTS:
        values["character_names"] = json.dumps([c.name for c in project.characters], ensure_ascii=False)
    if stage == Stage.SCENES:
        values["plot_directory"] = _or_placeholder(_plot_directory(project))
    if stage == Stage.DIALOGUES:
        values["scene_directory"] = _or_placeholder(_scene_directory(project))
    return values


def _plot_directory(project: ScriptProject) -> str:
    names = character_name_map(project)
    lines = []
    for plot in project.plots:
        who = ", ".join(names.get(cid, cid) for cid in plot.involved_character_ids)
        lines.append(f"{plot.ordinal}. {plot.title} [{who}]")
    return "\n".join(lines)


def _scene_directory(project: ScriptProject) -> str:
    names = character_name_map(project)
    lines = []
    for scene in project.scenes:
        who = ", ".join(names.get(cid, cid) for cid in scene.participant_ids)
        lines.append(f"{scene.ordinal}. {scene.setting} - {scene.time} [{who}]")
    return "\n".join(lines)


def _context_data(project: ScriptProject, stage: Stage) -> dict:
    names = character_name_map(project)
    if stage == Stage.CHARACTERS:
        return {"title": project.title, "logline": project.logline.text}
    if stage == Stage.PLOTS:
        return {"characters": [c.name for c in project.characters]}
    if stage == Stage.SCENES:
        return {
            "plots": [
                {
                    "ordinal": p.ordinal,
                    "title": p.title,
                    "characters": [names.get(cid, cid) for cid in p.involved_character_ids],
                }
                for p in project.plots
            ]
        }
    if stage == Stage.DIALOGUES:
        return {
            "scenes": [
                {
                    "ordinal": s.ordinal,
                    "setting": s.setting,
                    "time": s.time,
                    "participants": [names.get(cid, cid) for cid in s.participant_ids],
                }
                for s in project.scenes
            ]
        }
    return {}


def functional_prompt(
    project: ScriptProject, stage: Stage, options: GenerateOptions | None = None
) -> PromptBundle:
    if stage == Stage.LOGLINE:
        raise ValueError("the logline is written by the user; no functional agent exists for it")
    template = load_template(FUNCTIONAL_TEMPLATES[stage])
    values = _template_values(project, stage)
    task = render_template(template["task"], values)
    if options and options.count_hint:
        task += f"\n\nAim for about {options.count_hint} elements."
    if options and options.style_notes:
        task += f"\nStyle notes from the writer: {options.style_notes}"
    return PromptBundle(
        stage=stage,
        purpose="functional",
        system_text=render_template(template["system"], values),
        context_text=confirmed_context(project, stage),
        task_text=task,
        temperature=FUNCTIONAL_TEMPERATURE,
        context_data=_context_data(project, stage),
    )


def tutor_prompt(
    project: ScriptProject,
    stage: Stage,
    history: list[ChatMessage],
) -> PromptBundle:
    """``history`` is the chat so far including the newest user message,
    alternating user/assistant roles."""
    template = load_template(TUTOR_TEMPLATES[stage])
    values = _template_values(project, stage)
    return PromptBundle(
        stage=stage,
        purpose="tutor",
        system_text=render_template(template["system"], values),
        context_text=confirmed_context(project, stage),
        task_text=render_template(template["task"], values),
        history=list(history),
        temperature=TUTOR_TEMPERATURE,
        context_data=_context_data(project, stage),
    )
