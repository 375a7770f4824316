"""Core types: stage order, element access, serialization round-trips."""

from __future__ import annotations

import pytest

from coopera import Stage, StageState, new_project
from coopera.model import ScriptProject

from conftest import payload_project


def test_stage_order_and_keys():
    assert [s.key for s in Stage] == ["logline", "characters", "plots", "scenes", "dialogues"]
    assert list(Stage) == sorted(Stage)
    assert Stage.from_key("plots") is Stage.PLOTS
    with pytest.raises(ValueError):
        Stage.from_key("act-two")


def test_upstream_downstream():
    assert Stage.SCENES.upstream() == (Stage.LOGLINE, Stage.CHARACTERS, Stage.PLOTS)
    assert Stage.SCENES.downstream() == (Stage.DIALOGUES,)
    assert Stage.LOGLINE.upstream() == ()
    assert Stage.DIALOGUES.downstream() == ()


def test_new_project_states():
    blank = new_project("p1")
    assert all(blank.state_of(s) == StageState.EMPTY for s in Stage)
    drafted = new_project("p2", "A heist goes sideways.")
    assert drafted.state_of(Stage.LOGLINE) == StageState.DRAFT
    assert drafted.logline.text == "A heist goes sideways."


def test_find_element_and_elements_of():
    project = payload_project()
    stage, element = project.find_element("sc-000005")
    assert stage == Stage.SCENES and element.setting == "the school library"
    assert project.find_element("zz-999999") == (None, None)
    assert [c.name for c in project.elements_of(Stage.CHARACTERS)] == ["Mira", "Theo"]


def test_next_element_id_prefixes_and_monotonicity():
    project = new_project("p3")
    ids = [project.next_element_id(s) for s in (Stage.CHARACTERS, Stage.PLOTS, Stage.SCENES, Stage.DIALOGUES)]
    assert ids == ["ch-000001", "pl-000002", "sc-000003", "dl-000004"]
    more = [project.next_element_id(Stage.CHARACTERS) for _ in range(3)]
    assert more == sorted(more)  # sortable within a prefix
    assert len(set(ids + more)) == 7


def test_round_trip_preserves_everything():
    project = payload_project()
    once = project.to_dict()
    again = ScriptProject.from_dict(once).to_dict()
    assert once == again
    clone = ScriptProject.from_dict(once)
    assert clone.revision == project.revision
    assert len(clone.revision_log) == len(project.revision_log)
    assert clone.element_seq == project.element_seq


def test_round_trip_is_a_deep_copy():
    project = payload_project()
    clone = ScriptProject.from_dict(project.to_dict())
    clone.characters[0].name = "Someone Else"
    assert project.characters[0].name == "Mira"


def test_referential_closure():
    project = payload_project()
    element_stages = (Stage.CHARACTERS, Stage.PLOTS, Stage.SCENES, Stage.DIALOGUES)
    known = {el.id for s in element_stages for el in project.elements_of(s)}
    for ch in project.characters:
        for rel in ch.relationships:
            assert rel.character_id in known
    for plot in project.plots:
        assert set(plot.cause_ids) <= known
        assert set(plot.involved_character_ids) <= known
    for scene in project.scenes:
        assert set(scene.plot_ids) <= known
        assert set(scene.participant_ids) <= known
    for line in project.dialogues:
        assert line.scene_id in known
        assert line.speaker_id in known
