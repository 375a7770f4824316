"""Fingerprints: deterministic, timestamp-blind, content-sensitive."""

from __future__ import annotations

import pytest

from coopera import Stage
from coopera.canonical import (
    canonical_json,
    content_fingerprint,
    project_from_json,
    project_json,
    upstream_fingerprint,
)
from coopera.model import ScriptProject

from conftest import payload_project


def clone(project: ScriptProject) -> ScriptProject:
    return ScriptProject.from_dict(project.to_dict())


def test_canonical_json_sorts_keys_and_strips_whitespace():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert canonical_json({"a": "café"}) == '{"a":"café"}'  # no ascii escaping


def test_fingerprint_deterministic():
    project = payload_project()
    stages = [Stage.LOGLINE, Stage.CHARACTERS]
    assert content_fingerprint(project, stages) == content_fingerprint(project, stages)
    assert content_fingerprint(project, stages) == content_fingerprint(clone(project), stages)


def test_fingerprint_requires_stages():
    with pytest.raises(ValueError):
        content_fingerprint(payload_project(), [])


def test_fingerprint_sensitive_to_content():
    project = payload_project()
    changed = clone(project)
    changed.characters[0].name = "Mirabel"
    stages = [Stage.LOGLINE, Stage.CHARACTERS]
    assert content_fingerprint(project, stages) != content_fingerprint(changed, stages)
    # a change outside the selected stages does not matter
    assert content_fingerprint(project, [Stage.LOGLINE]) == content_fingerprint(changed, [Stage.LOGLINE])


def test_fingerprint_ignores_timestamps_and_log():
    project = payload_project()
    noisy = clone(project)
    for entry in noisy.revision_log:
        entry.timestamp = "1999-01-01T00:00:00+00:00"
    noisy.logline.confirmed_at = "1999-01-01T00:00:00+00:00"
    stages = list(Stage)
    assert content_fingerprint(project, stages) == content_fingerprint(noisy, stages)


def test_upstream_fingerprint_covers_confirmed_only():
    project = payload_project()
    assert upstream_fingerprint(project, Stage.LOGLINE) is None
    full = upstream_fingerprint(project, Stage.SCENES)
    assert full == content_fingerprint(project, [Stage.LOGLINE, Stage.CHARACTERS, Stage.PLOTS])
    # demote plots to draft: it drops out of downstream upstream-fingerprints
    demoted = clone(project)
    from coopera import StageState

    demoted.stage_status[Stage.PLOTS].state = StageState.DRAFT
    assert upstream_fingerprint(demoted, Stage.SCENES) == content_fingerprint(
        demoted, [Stage.LOGLINE, Stage.CHARACTERS]
    )


def test_project_json_round_trip():
    project = payload_project()
    text = project_json(project)
    assert text.endswith("\n")
    assert project_json(project_from_json(text)) == text
