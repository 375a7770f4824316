#!/usr/bin/env python3
"""Simulate collaborative sessions and summarize revision behavior.

Each simulated group runs the full pipeline offline, then revises a few
randomly chosen elements. The script aggregates per-stage edit
distances and Jaccard drift across all sessions, the same measurements
the engine reports per project through ``diff``.

Usage: python3 scripts/revision_experiment.py [--sessions N] [--seed S]
"""

from __future__ import annotations

import argparse
import random
import sys
from collections import defaultdict
from statistics import mean

sys.path.insert(0, "src")

from coopera import Stage
from coopera.agents.mock import MockProvider
from coopera.analytics import project_diff_report, revision_metrics
from coopera.engine import Engine
from coopera.store import MemoryStore

LOGLINES = [
    "A shy student discovers an old diary that writes back.",
    "Two rival street vendors are snowed in together overnight.",
    "A lighthouse keeper teaches gulls to sing opera.",
    "The class skeleton comes alive during exam week.",
]

EDITABLE = {
    Stage.CHARACTERS: ("personality", "background"),
    Stage.PLOTS: ("summary",),
    Stage.SCENES: ("setting",),
    Stage.DIALOGUES: ("line",),
}


def run_session(rng: random.Random, session_index: int) -> dict:
    engine = Engine(store=MemoryStore(), provider=MockProvider(seed=session_index))
    project = engine.create_project(logline_draft=rng.choice(LOGLINES), title=f"group-{session_index}")
    engine.confirm(project.id, Stage.LOGLINE)
    for stage in (Stage.CHARACTERS, Stage.PLOTS, Stage.SCENES, Stage.DIALOGUES):
        engine.generate(project.id, stage, seed=rng.randrange(100))
        engine.confirm(project.id, stage)

    edits = rng.randrange(1, 6)
    for _ in range(edits):
        current = engine.get_project(project.id)
        stage = rng.choice(list(EDITABLE))
        element = rng.choice(current.elements_of(stage))
        field = rng.choice(EDITABLE[stage])
        engine.edit(project.id, element.id, {field: f"group rewrite {rng.randrange(10_000)}"})

    final = engine.get_project(project.id)
    per_stage = {}
    for stage in EDITABLE:
        report = project_diff_report(final, stage)
        per_stage[stage.key] = report.to_dict()
    return {
        "edits": edits,
        "per_stage": per_stage,
        "log": revision_metrics(final),
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sessions", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = random.Random(args.seed)
    distances = defaultdict(list)
    jaccards = defaultdict(list)
    user_edit_counts = []
    for index in range(args.sessions):
        session = run_session(rng, index)
        user_edit_counts.append(session["edits"])
        for stage_key, report in session["per_stage"].items():
            distances[stage_key].append(report["absolute_distance"])
            jaccards[stage_key].append(report["jaccard"])

    print(f"sessions: {args.sessions}   mean user edits: {mean(user_edit_counts):.2f}")
    print(f"{'stage':<12}{'mean dist':>10}{'max dist':>10}{'mean jaccard':>14}")
    for stage_key in distances:
        print(
            f"{stage_key:<12}{mean(distances[stage_key]):>10.1f}"
            f"{max(distances[stage_key]):>10}{mean(jaccards[stage_key]):>14.3f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
