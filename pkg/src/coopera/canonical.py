"""Canonical serialization and content fingerprints.

Canonical form is UTF-8 JSON with sorted keys and no insignificant
whitespace, so hashes are reproducible across processes and languages.
Fingerprints cover stage *content* only: timestamps and the revision log
never contribute.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Iterable

from .model import ScriptProject, Stage, StageState


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def stage_content(project: ScriptProject, stage: Stage) -> Any:
    """Timestamp-free content of one stage, as plain data."""
    if stage == Stage.LOGLINE:
        return {"text": project.logline.text}
    return [el.to_dict() for el in project.elements_of(stage)]


def content_fingerprint(project: ScriptProject, stages: Iterable[Stage]) -> str:
    """SHA-256 over the canonical serialization of the selected stages.

    Deterministic, insensitive to field ordering and timestamps, sensitive
    to any text or structure change in the selected stages.
    """
    selected = sorted(set(stages))
    if not selected:
        raise ValueError("stages must be non-empty")
    payload = {stage.key: stage_content(project, stage) for stage in selected}
    return sha256_hex(canonical_bytes(payload))


def upstream_fingerprint(project: ScriptProject, stage: Stage) -> str | None:
    """Current fingerprint of the confirmed content upstream of ``stage``.

    Drafts are provisional and excluded. None when nothing upstream is
    confirmed (always the case for the root stage).
    """
    confirmed = [s for s in stage.upstream() if project.state_of(s) == StageState.CONFIRMED]
    if not confirmed:
        return None
    return content_fingerprint(project, confirmed)


def elements_snapshot(project: ScriptProject, stage: Stage) -> str:
    """Canonical text snapshot of one stage's content, for revision-log entries."""
    return canonical_json(stage_content(project, stage))


def project_json(project: ScriptProject) -> str:
    """The canonical one-document-per-project serialization (the stored file format)."""
    return json.dumps(project.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def project_from_json(text: str) -> ScriptProject:
    return ScriptProject.from_dict(json.loads(text))
