"""Shared builders: deterministic engines and hand-built projects."""

from __future__ import annotations

from pathlib import Path

import pytest

from coopera import Stage, confirm_stage, new_project
from coopera.agents.mock import MockProvider
from coopera.engine import Engine
from coopera.store import MemoryStore

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def ticking_clock():
    counter = iter(range(1, 1_000_000))

    def clock() -> str:
        return f"2024-03-01T00:00:00.{next(counter):06d}+00:00"

    return clock


def make_engine(seed: int = 0, mode: str = "ok") -> Engine:
    return Engine(store=MemoryStore(), provider=MockProvider(seed=seed, mode=mode), clock=ticking_clock())


def run_all_stages(engine: Engine, logline: str = "A retired clown inherits a debt-ridden aquarium.", seed: int = 5) -> str:
    project = engine.create_project(logline_draft=logline, title="Test Piece")
    engine.confirm(project.id, Stage.LOGLINE)
    for stage in (Stage.CHARACTERS, Stage.PLOTS, Stage.SCENES, Stage.DIALOGUES):
        engine.generate(project.id, stage, seed=seed)
        engine.confirm(project.id, stage)
    return project.id


@pytest.fixture
def engine() -> Engine:
    return make_engine(seed=11)


@pytest.fixture
def full_project_engine() -> tuple[Engine, str]:
    eng = make_engine(seed=11)
    return eng, run_all_stages(eng)


def payload_project(now: str | None = None):
    """A fully confirmed project built only from user payloads: two
    characters, two plots, one scene, two dialogue lines. Deterministic
    ids (ch-000001, ch-000002, pl-000003, pl-000004, sc-000005,
    dl-000006, dl-000007)."""
    kwargs = {"now": now} if now else {}
    project = new_project("p-hand", "A shy student discovers an old diary.", title="The Diary")
    project = confirm_stage(project, Stage.LOGLINE, **kwargs)
    project = confirm_stage(
        project,
        Stage.CHARACTERS,
        [
            {"name": "Mira", "personality": "curious, guarded", "background": "new in town"},
            {
                "name": "Theo",
                "personality": "loud, loyal",
                "background": "grew up next door",
                "relationships": [{"character_id": "ch-000001", "description": "walks Mira to school"}],
            },
        ],
        **kwargs,
    )
    project = confirm_stage(
        project,
        Stage.PLOTS,
        [
            {"title": "The diary surfaces", "summary": "Mira finds the diary.", "involved_character_ids": ["ch-000001"]},
            {
                "title": "Theo recognizes the handwriting",
                "summary": "The diary belonged to Theo's mother.",
                "cause_ids": ["pl-000003"],
                "involved_character_ids": ["ch-000001", "ch-000002"],
            },
        ],
        **kwargs,
    )
    project = confirm_stage(
        project,
        Stage.SCENES,
        [
            {
                "setting": "the school library",
                "time": "afternoon",
                "plot_ids": ["pl-000003", "pl-000004"],
                "participant_ids": ["ch-000001", "ch-000002"],
            }
        ],
        **kwargs,
    )
    project = confirm_stage(
        project,
        Stage.DIALOGUES,
        [
            {"scene_id": "sc-000005", "speaker_id": "ch-000001", "line": "Look what fell out of the shelf."},
            {"scene_id": "sc-000005", "speaker_id": "ch-000002", "line": "That handwriting. I know it.", "note": "quiet"},
        ],
        **kwargs,
    )
    return project


@pytest.fixture
def hand_project():
    return payload_project(now="2024-03-01T10:00:00+00:00")
