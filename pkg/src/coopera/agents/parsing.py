"""Recovery of structured elements from free-form model output.

Providers are asked for a single fenced JSON block, but real replies
wrap it in prose, rename fields, or break the syntax. Parsing is total:
it never raises, it returns either a normalized element list or a list
of machine-readable diagnostics precise enough to drive a repair prompt.

Extraction order: fenced code blocks first, then a raw scan for any
decodable JSON value in the text. A trailing-comma retry is the only
syntax repair attempted. Field names are matched case-insensitively
through a per-stage alias table, and scalars are coerced conservatively
(numbers to text for text fields, digit strings to integers for ordinal
lists, comma-separated strings to name lists).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..model import Stage

_FENCE_RE = re.compile(r"```[a-zA-Z]*\s*\n(.*?)```", re.DOTALL)
_TRAILING_COMMA_RE = re.compile(r",\s*([\]}])")
_MAX_SCAN_CANDIDATES = 500


@dataclass
class Diagnostic:
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass
class ParseOutcome:
    elements: list[dict] | None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.elements is not None


STAGE_KEY_ALIASES: dict[Stage, tuple[str, ...]] = {
    Stage.CHARACTERS: ("characters", "cast", "character_list"),
    Stage.PLOTS: ("plots", "plot", "plot_points", "beats", "outline"),
    Stage.SCENES: ("scenes", "scene_list", "scene"),
    Stage.DIALOGUES: ("dialogues", "dialogue", "lines", "script"),
}

# canonical field -> accepted spellings (canonical name always accepted)
_FIELD_ALIASES: dict[Stage, dict[str, tuple[str, ...]]] = {
    Stage.CHARACTERS: {
        "name": ("character_name", "full_name"),
        "personality": ("persona", "traits", "personality_traits"),
        "background": ("bio", "backstory", "history"),
        "relationships": ("relations", "relationship"),
    },
    Stage.PLOTS: {
        "title": ("name", "heading"),
        "summary": ("description", "synopsis", "content"),
        "causes": ("cause", "cause_ordinals", "follows", "follows_from", "depends_on"),
        "characters": ("involved", "involved_characters", "cast", "who"),
        "ordinal": ("number", "index", "order"),
    },
    Stage.SCENES: {
        "setting": ("place", "location", "where"),
        "time": ("time_of_day", "when"),
        "plots": ("plot", "plot_ordinals", "beats", "covers"),
        "participants": ("characters", "cast", "present", "who"),
        "ordinal": ("number", "index", "order"),
    },
    Stage.DIALOGUES: {
        "scene": ("scene_ordinal", "scene_number", "scene_index"),
        "speaker": ("character", "name", "who"),
        "line": ("text", "utterance", "dialogue", "says"),
        "note": ("parenthetical", "delivery", "direction", "tone"),
        "ordinal": ("number", "index", "order"),
    },
}

_REL_WITH_ALIASES = ("with", "name", "character", "other", "target")
_REL_DESC_ALIASES = ("description", "desc", "relation", "relationship", "details")

_TEXT_FIELDS = {"name", "personality", "background", "title", "summary", "setting", "time", "speaker", "line", "note"}
_ORDINAL_LIST_FIELDS = {"causes", "plots"}
_NAME_LIST_FIELDS = {"characters", "participants"}

_REQUIRED: dict[Stage, tuple[str, ...]] = {
    Stage.CHARACTERS: ("name", "personality", "background"),
    Stage.PLOTS: ("title", "summary"),
    Stage.SCENES: ("setting", "plots", "participants"),
    Stage.DIALOGUES: ("scene", "speaker", "line"),
}

_DEFAULTS: dict[Stage, dict] = {
    Stage.CHARACTERS: {"relationships": []},
    Stage.PLOTS: {"causes": [], "characters": []},
    Stage.SCENES: {"time": "day"},
    Stage.DIALOGUES: {"note": None},
}


def _loads_lenient(text: str):
    try:
        return json.loads(text)
    except (ValueError, RecursionError):
        pass
    try:
        return json.loads(_TRAILING_COMMA_RE.sub(r"\1", text))
    except (ValueError, RecursionError):
        return None


def extract_json_candidates(text: str) -> list:
    """Every JSON value recoverable from the text, fenced blocks first."""
    candidates = []
    for block in _FENCE_RE.findall(text):
        value = _loads_lenient(block.strip())
        if value is not None:
            candidates.append(value)
    decoder = json.JSONDecoder()
    pos = 0
    scanned = 0
    while pos < len(text) and scanned < _MAX_SCAN_CANDIDATES:
        start = min((i for i in (text.find("{", pos), text.find("[", pos)) if i != -1), default=-1)
        if start == -1:
            break
        scanned += 1
        try:
            value, end = decoder.raw_decode(text, start)
        except (ValueError, RecursionError):
            repaired = _loads_lenient(text[start:])
            if repaired is not None:
                candidates.append(repaired)
                break
            pos = start + 1
            continue
        candidates.append(value)
        pos = end
    return candidates


def _key_lookup(raw: dict, canonical: str, aliases: tuple[str, ...]):
    wanted = {canonical, *aliases}
    for key, value in raw.items():
        if isinstance(key, str) and key.strip().lower().replace(" ", "_") in wanted:
            return value
    return _MISSING


_MISSING = object()


def _coerce_text(value):
    if isinstance(value, str):
        return value
    if isinstance(value, bool) or value is None:
        return None
    if isinstance(value, (int, float)):
        return str(value)
    return None


def _coerce_int(value):
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str) and value.strip().lstrip("-").isdigit():
        return int(value.strip())
    return None


def _coerce_int_list(value):
    if value is None:
        return []
    if not isinstance(value, list):
        single = _coerce_int(value)
        return [single] if single is not None else None
    out = []
    for item in value:
        coerced = _coerce_int(item)
        if coerced is None:
            return None
        out.append(coerced)
    return out


def _coerce_name_list(value):
    if value is None:
        return []
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    if not isinstance(value, list):
        return None
    out = []
    for item in value:
        text = _coerce_text(item)
        if text is None:
            return None
        out.append(text.strip())
    return out


def _coerce_relationships(value, diags: list[Diagnostic], where: str):
    if value is None:
        return []
    if isinstance(value, dict):
        value = [value]
    if not isinstance(value, list):
        diags.append(Diagnostic("WRONG_TYPE", f"{where}: relationships must be a list"))
        return None
    out = []
    for item in value:
        if not isinstance(item, dict):
            diags.append(Diagnostic("WRONG_TYPE", f"{where}: each relationship must be an object"))
            return None
        target = _MISSING
        for alias in _REL_WITH_ALIASES:
            found = _key_lookup(item, alias, ())
            if found is not _MISSING:
                target = found
                break
        description = ""
        for alias in _REL_DESC_ALIASES:
            found = _key_lookup(item, alias, ())
            if found is not _MISSING:
                description = _coerce_text(found) or ""
                break
        target_text = _coerce_text(target) if target is not _MISSING else None
        if not target_text:
            diags.append(Diagnostic("MISSING_FIELD", f"{where}: relationship without a target character"))
            return None
        out.append({"with": target_text.strip(), "description": description})
    return out


def _normalize_element(stage: Stage, raw: dict, index: int, diags: list[Diagnostic]) -> dict | None:
    where = f"element {index + 1}"
    aliases = _FIELD_ALIASES[stage]
    out = dict(_DEFAULTS[stage])
    ok = True
    for canonical, names in aliases.items():
        value = _key_lookup(raw, canonical, names)
        if value is _MISSING:
            if canonical in _REQUIRED[stage]:
                diags.append(Diagnostic("MISSING_FIELD", f"{where}: missing required field {canonical!r}"))
                ok = False
            continue
        if canonical == "relationships":
            coerced = _coerce_relationships(value, diags, where)
            if coerced is None:
                ok = False
                continue
        elif canonical in _ORDINAL_LIST_FIELDS:
            coerced = _coerce_int_list(value)
            if coerced is None:
                diags.append(Diagnostic("WRONG_TYPE", f"{where}: field {canonical!r} must be a list of integers"))
                ok = False
                continue
        elif canonical in _NAME_LIST_FIELDS:
            coerced = _coerce_name_list(value)
            if coerced is None:
                diags.append(Diagnostic("WRONG_TYPE", f"{where}: field {canonical!r} must be a list of names"))
                ok = False
                continue
        elif canonical in ("scene", "ordinal"):
            coerced = _coerce_int(value)
            if coerced is None:
                if canonical in _REQUIRED[stage]:
                    diags.append(Diagnostic("WRONG_TYPE", f"{where}: field {canonical!r} must be an integer"))
                    ok = False
                continue
        else:
            coerced = _coerce_text(value)
            if coerced is None:
                if canonical in _REQUIRED[stage]:
                    diags.append(Diagnostic("WRONG_TYPE", f"{where}: field {canonical!r} must be text"))
                    ok = False
                continue
            if canonical != "note":
                coerced = coerced.strip() if canonical in ("name", "speaker", "title", "time") else coerced
        out[canonical] = coerced
    return out if ok else None


def _as_element_list(value, stage: Stage):
    if isinstance(value, dict):
        for key, inner in value.items():
            if isinstance(key, str) and key.strip().lower() in STAGE_KEY_ALIASES[stage]:
                value = inner
                break
        else:
            aliases = _FIELD_ALIASES[stage]
            for canonical, names in aliases.items():
                if canonical in _REQUIRED[stage] and _key_lookup(value, canonical, names) is not _MISSING:
                    return [value]
            return None
    if isinstance(value, list) and all(isinstance(item, dict) for item in value):
        return value
    return None


def parse_structured_output(raw_text: str, stage: Stage) -> ParseOutcome:
    """Turn one provider reply into normalized element dicts for the
    given stage, or diagnostics explaining why that was impossible."""
    if stage == Stage.LOGLINE:
        return ParseOutcome(None, [Diagnostic("WRONG_SHAPE", "the logline stage has no structured elements")])
    if not raw_text or not raw_text.strip():
        return ParseOutcome(None, [Diagnostic("NO_STRUCTURED_BLOCK", "reply is empty")])
    candidates = extract_json_candidates(raw_text)
    saw_json = bool(candidates)
    first_diags: list[Diagnostic] | None = None
    seen_lists = 0
    for candidate in candidates:
        elements = _as_element_list(candidate, stage)
        if elements is None:
            continue
        seen_lists += 1
        if not elements:
            if first_diags is None:
                first_diags = [Diagnostic("EMPTY_ELEMENTS", "the element list is empty")]
            continue
        diags: list[Diagnostic] = []
        normalized = [_normalize_element(stage, el, i, diags) for i, el in enumerate(elements)]
        if all(el is not None for el in normalized):
            return ParseOutcome(normalized, [])
        if first_diags is None:
            first_diags = diags
    if first_diags is not None:
        return ParseOutcome(None, first_diags)
    if saw_json:
        return ParseOutcome(
            None, [Diagnostic("WRONG_SHAPE", f"found JSON, but no {stage.key} element list in a recognizable shape")]
        )
    return ParseOutcome(None, [Diagnostic("NO_STRUCTURED_BLOCK", "no JSON value found anywhere in the reply")])
