"""Random operation sequences over the pipeline.

Shared by the property tests and the acceptance run: a tiny interpreter
for (op, stage, ...) tuples plus invariant checks with an independent
fingerprint oracle (hashlib + json only, no package hashing helpers).
"""

from __future__ import annotations

import hashlib
import json

from coopera import (
    CooperaError,
    Stage,
    confirm_stage,
    delete_element,
    edit_element,
    generate_stage,
    regenerate_cascade,
)
from coopera.agents.mock import MockProvider
from coopera.agents.prompts import GenerateOptions
from coopera.agents.runtime import FunctionalAgent
from coopera.errors import CascadeError
from coopera.model import StageState, new_project
from coopera.pipeline import staleness
from coopera.validation import validate_project

STAGES = list(Stage)
FIXED_NOW = "2024-05-05T00:00:00+00:00"

_EDIT_FIELDS = {
    Stage.LOGLINE: "text",
    Stage.CHARACTERS: "background",
    Stage.PLOTS: "summary",
    Stage.SCENES: "setting",
    Stage.DIALOGUES: "line",
}


def base_project():
    return new_project("rig", "A mapmaker charts a city that keeps moving.")


def make_agent(seed: int = 17) -> FunctionalAgent:
    return FunctionalAgent(MockProvider(seed=seed))


def random_op(rng) -> tuple:
    """One op tuple from a plain random.Random; mirrors the hypothesis menu."""
    kind = rng.choice(("generate", "confirm", "confirm", "edit", "delete", "cascade"))
    if kind == "generate":
        return ("generate", rng.randrange(1, 5), rng.randrange(0, 4))
    if kind == "confirm":
        return ("confirm", rng.randrange(0, 5))
    if kind == "edit":
        return ("edit", rng.randrange(0, 5), rng.randrange(0, 1000))
    if kind == "delete":
        return ("delete", rng.randrange(1, 5))
    return ("cascade", rng.randrange(1, 5), rng.randrange(0, 4))


def apply_op(project, op: tuple, agent):
    """Apply one op; raises CooperaError when the pipeline rejects it."""
    kind = op[0]
    if kind == "generate":
        stage = STAGES[op[1]]
        return generate_stage(
            project, stage, agent, options=GenerateOptions(seed=op[2]), now=FIXED_NOW
        )
    if kind == "confirm":
        return confirm_stage(project, STAGES[op[1]], now=FIXED_NOW)
    if kind == "edit":
        stage = STAGES[op[1]]
        token = op[2]
        if stage == Stage.LOGLINE:
            return edit_element(
                project, "logline", {"text": f"A mapmaker charts shifting streets, take {token}."},
                now=FIXED_NOW,
            )
        elements = project.elements_of(stage)
        if not elements:
            raise CooperaError("nothing to edit", code="NOT_FOUND")
        field = _EDIT_FIELDS[stage]
        return edit_element(
            project, elements[0].id, {field: f"rewritten text {token}"}, now=FIXED_NOW
        )
    if kind == "delete":
        stage = STAGES[op[1]]
        elements = project.elements_of(stage)
        if not elements:
            raise CooperaError("nothing to delete", code="NOT_FOUND")
        return delete_element(project, elements[-1].id, now=FIXED_NOW)
    if kind == "cascade":
        return regenerate_cascade(
            project, STAGES[op[1]], agent, options=GenerateOptions(seed=op[2]), now=FIXED_NOW
        )
    raise AssertionError(f"unknown op {op!r}")


def run_sequence(ops, agent=None):
    """Apply a whole sequence, checking invariants after every step.

    Rejected ops must leave the current value untouched; a cascade that
    fails midway continues from the partial project it carries, the same
    way the engine persists it.
    """
    agent = agent or make_agent()
    project = base_project()
    check_invariants(project)
    for op in ops:
        before = json.dumps(project.to_dict(), sort_keys=True)
        try:
            result = apply_op(project, op, agent)
        except CascadeError as exc:
            assert json.dumps(project.to_dict(), sort_keys=True) == before
            project = exc.project
        except CooperaError:
            assert json.dumps(project.to_dict(), sort_keys=True) == before
            continue
        else:
            assert result.revision > project.revision
            project = result
        check_invariants(project)
    return project


def oracle_upstream_fingerprint(document: dict, stage_key: str) -> str | None:
    """Recompute the upstream fingerprint from the serialized project,
    using nothing but hashlib and json."""
    order = [s.key for s in STAGES]
    upstream = order[: order.index(stage_key)]
    confirmed = [k for k in upstream if document["stage_status"][k]["state"] == "confirmed"]
    if not confirmed:
        return None
    payload = {}
    for key in confirmed:
        payload[key] = {"text": document["logline"]["text"]} if key == "logline" else document[key]
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def check_invariants(project) -> None:
    document = project.to_dict()

    # the pipeline never hands back an invalid project
    report = validate_project(project)
    assert report.ok, [v.message for v in report.violations]

    # gap-free, monotone revision log
    assert [entry.revision for entry in project.revision_log] == list(
        range(1, project.revision + 1)
    )

    # ordering safety: content only ever exists under a confirmed upstream
    for stage in STAGES:
        if project.state_of(stage) != StageState.EMPTY:
            for up in stage.upstream():
                assert project.state_of(up) == StageState.CONFIRMED, (
                    f"{stage.key} is {project.state_of(stage).value} but {up.key} "
                    f"is {project.state_of(up).value}"
                )

    # staleness soundness against the independent oracle
    flags = staleness(project).to_dict()
    for stage in STAGES:
        state = document["stage_status"][stage.key]["state"]
        if state == "empty":
            expected = "empty"
        else:
            recorded = document["stage_status"][stage.key]["upstream_fingerprint"]
            expected = (
                "fresh"
                if recorded == oracle_upstream_fingerprint(document, stage.key)
                else "stale"
            )
        assert flags[stage.key] == expected, (stage.key, flags[stage.key], expected)
