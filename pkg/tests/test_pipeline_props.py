"""Property tests: arbitrary operation sequences keep every pipeline invariant."""

from __future__ import annotations

import json
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from op_machine import make_agent, random_op, run_sequence


def ops_strategy():
    stage_any = st.integers(min_value=0, max_value=4)
    stage_elements = st.integers(min_value=1, max_value=4)
    seed = st.integers(min_value=0, max_value=3)
    op = st.one_of(
        st.tuples(st.just("generate"), stage_elements, seed),
        st.tuples(st.just("confirm"), stage_any),
        st.tuples(st.just("edit"), stage_any, st.integers(min_value=0, max_value=999)),
        st.tuples(st.just("delete"), stage_elements),
        st.tuples(st.just("cascade"), stage_elements, seed),
    )
    return st.lists(op, min_size=1, max_size=10)


@settings(max_examples=50, deadline=None)
@given(ops_strategy())
def test_random_sequences_preserve_invariants(ops):
    run_sequence(ops)


@settings(max_examples=20, deadline=None)
@given(ops_strategy(), st.integers(min_value=0, max_value=9))
def test_sequences_are_deterministic(ops, agent_seed):
    first = run_sequence(ops, agent=make_agent(agent_seed))
    second = run_sequence(ops, agent=make_agent(agent_seed))
    assert json.dumps(first.to_dict(), sort_keys=True) == json.dumps(
        second.to_dict(), sort_keys=True
    )


def test_long_random_walk_stays_sound():
    rng = random.Random(99)
    ops = [random_op(rng) for _ in range(60)]
    project = run_sequence(ops)
    assert project.revision > 0
