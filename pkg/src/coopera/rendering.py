"""Plain-text rendering of stage content.

The same renderer feeds three consumers: prompt context for the agents,
the before/after texts compared by the diff report, and the screenplay
export. Dialogue snapshots taken before a character was renamed still
need a speaker name, so name lookup merges every character snapshot in
the revision log with the current cast (most recent wins).
"""

from __future__ import annotations

import json
from typing import Sequence

from .model import (
    Character,
    DialogueLine,
    PlotElement,
    Scene,
    ScriptProject,
    Stage,
    element_from_dict,
)


def character_name_map(project: ScriptProject) -> dict[str, str]:
    names: dict[str, str] = {}
    for entry in project.revision_log:
        if entry.stage != Stage.CHARACTERS or not entry.after_text:
            continue
        try:
            snap = json.loads(entry.after_text)
        except ValueError:
            continue
        records = snap if isinstance(snap, list) else [snap]
        for record in records:
            if isinstance(record, dict) and "id" in record and "name" in record:
                names[record["id"]] = record["name"]
    for ch in project.characters:
        names[ch.id] = ch.name
    return names


def _name(names: dict[str, str], character_id: str) -> str:
    return names.get(character_id, character_id)


def render_characters(characters: Sequence[Character], names: dict[str, str]) -> str:
    blocks = []
    for ch in characters:
        lines = [ch.name, f"Personality: {ch.personality}", f"Background: {ch.background}"]
        if ch.relationships:
            rels = "; ".join(f"with {_name(names, r.character_id)}: {r.description}" for r in ch.relationships)
            lines.append(f"Relationships: {rels}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)


def render_plots(plots: Sequence[PlotElement], names: dict[str, str]) -> str:
    ordinal_by_id = {p.id: p.ordinal for p in plots}
    blocks = []
    for plot in plots:
        head = f"{plot.ordinal}. {plot.title}"
        causes = sorted(ordinal_by_id[c] for c in plot.cause_ids if c in ordinal_by_id)
        if causes:
            head += " (follows " + ", ".join(str(c) for c in causes) + ")"
        who = ", ".join(_name(names, cid) for cid in plot.involved_character_ids)
        if who:
            head += f" [{who}]"
        blocks.append(f"{head}\n{plot.summary}")
    return "\n\n".join(blocks)


def render_scenes(scenes: Sequence[Scene], names: dict[str, str]) -> str:
    lines = []
    for scene in scenes:
        who = ", ".join(_name(names, cid) for cid in scene.participant_ids)
        lines.append(f"{scene.ordinal}. {scene.setting} - {scene.time} [{who}]")
    return "\n".join(lines)


def render_dialogues(
    dialogues: Sequence[DialogueLine],
    names: dict[str, str],
    scene_order: dict[str, int] | None = None,
) -> str:
    def sort_key(line: DialogueLine) -> tuple:
        scene_pos = scene_order.get(line.scene_id, 0) if scene_order else 0
        return (scene_pos, line.scene_id, line.ordinal)

    rendered = []
    for line in sorted(dialogues, key=sort_key):
        speaker = _name(names, line.speaker_id).upper()
        if line.note:
            rendered.append(f"{speaker}: ({line.note}) {line.line}")
        else:
            rendered.append(f"{speaker}: {line.line}")
    return "\n".join(rendered)


def render_elements(stage: Stage, elements: Sequence, names: dict[str, str]) -> str:
    if stage == Stage.CHARACTERS:
        return render_characters(elements, names)
    if stage == Stage.PLOTS:
        return render_plots(elements, names)
    if stage == Stage.SCENES:
        return render_scenes(elements, names)
    if stage == Stage.DIALOGUES:
        return render_dialogues(elements, names)
    raise ValueError(f"stage {stage.key} has no element renderer")


def render_stage(project: ScriptProject, stage: Stage) -> str:
    """Current content of a stage as plain text."""
    if stage == Stage.LOGLINE:
        return project.logline.text
    names = character_name_map(project)
    if stage == Stage.DIALOGUES:
        scene_order = {s.id: s.ordinal for s in project.scenes}
        return render_dialogues(project.dialogues, names, scene_order)
    return render_elements(stage, project.elements_of(stage), names)


def render_snapshot(project: ScriptProject, stage: Stage, snapshot_json: str) -> str:
    """Render a revision-log snapshot with today's name lookup."""
    data = json.loads(snapshot_json)
    if stage == Stage.LOGLINE:
        return data["text"] if isinstance(data, dict) else str(data)
    records = data if isinstance(data, list) else [data]
    elements = [element_from_dict(stage, r) for r in records]
    names = character_name_map(project)
    if stage == Stage.DIALOGUES:
        scene_order = {s.id: s.ordinal for s in project.scenes}
        return render_dialogues(elements, names, scene_order)
    return render_elements(stage, elements, names)


def export_json(project: ScriptProject) -> str:
    return json.dumps(project.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def export_screenplay(project: ScriptProject) -> str:
    """Screenplay text: uppercase scene headings, NAME: line dialogue."""
    names = character_name_map(project)
    out: list[str] = []
    if project.title:
        out.append(project.title.upper())
        out.append("")
    if project.logline.text:
        out.append(project.logline.text)
        out.append("")
    lines_by_scene: dict[str, list[DialogueLine]] = {}
    for line in project.dialogues:
        lines_by_scene.setdefault(line.scene_id, []).append(line)
    for scene in sorted(project.scenes, key=lambda s: s.ordinal):
        heading = f"SCENE {scene.ordinal}. {scene.setting} - {scene.time}"
        out.append(heading.upper())
        out.append("")
        for line in sorted(lines_by_scene.get(scene.id, []), key=lambda l: l.ordinal):
            speaker = _name(names, line.speaker_id).upper()
            if line.note:
                out.append(f"{speaker}: ({line.note}) {line.line}")
            else:
                out.append(f"{speaker}: {line.line}")
        out.append("")
    text = "\n".join(out).rstrip("\n")
    return text + "\n"
