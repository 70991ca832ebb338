import json
import random

import pytest

from astdkit.control import Event
from astdkit.engine import Engine, lts_to_dot, lts_to_json

import oracles


def test_start_successor_count_matches_track_size(engines):
    engine = engines["trains_L1"]
    s0 = engine.initial_state()
    succs = engine.combined_step(s0, Event("start", ("t1",)))
    assert len(succs) == 4


def test_movement_refused_before_start(engines):
    engine = engines["trains_L1"]
    s0 = engine.initial_state()
    assert engine.combined_step(s0, Event("movement", ("t1",))) == []


def test_l2_requires_compute_before_movement(engines):
    engine = engines["trains_L2"]
    s0 = engine.initial_state()
    s1 = engine.combined_step(s0, Event("start", ("t1",)))[0]
    assert engine.combined_step(s1, Event("movement", ("t1",))) == []
    assert engine.combined_step(s1, Event("compute_l", ("t1",)))


def test_exploration_matches_independent_oracle(ltss):
    states, transitions = oracles.l1_reachable()
    lts = ltss["trains_L1"]
    assert (len(lts.states), len(lts.transitions)) == (states, transitions)
    states2, transitions2 = oracles.l2_reachable()
    lts2 = ltss["trains_L2"]
    assert (len(lts2.states), len(lts2.transitions)) == (states2, transitions2)


def test_exploration_is_deterministic(docs):
    a = Engine(docs["trains_L1"]).explore()
    b = Engine(docs["trains_L1"]).explore()
    assert [s.key() for s in a.states] == [s.key() for s in b.states]
    assert a.transitions == b.transitions


def test_truncation_max_states(engines):
    lts = engines["trains_L1"].explore(max_states=1)
    assert len(lts.states) == 1
    assert lts.truncated is True
    assert lts.transitions == []


def test_truncation_max_depth(engines):
    lts = engines["trains_L1"].explore(max_depth=1)
    assert lts.truncated is True
    # depth one: initial plus every start target
    assert len(lts.states) == 1 + 8


def test_bounds_monotone(engines):
    engine = engines["trains_L1"]
    small = engine.explore(max_states=10)
    big = engine.explore(max_states=30)
    full = engine.explore()
    small_keys = [s.key() for s in small.states]
    big_keys = [s.key() for s in big.states]
    full_keys = [s.key() for s in full.states]
    assert big_keys[: len(small_keys)] == small_keys
    assert full_keys[: len(big_keys)] == big_keys
    assert set(small.transitions) <= set(big.transitions) <= set(full.transitions)


def test_checks_clean_on_corpus(engines, ltss):
    for name in ("trains_L1", "trains_L2", "trains_L3", "trains_L4"):
        engine, lts = engines[name], ltss[name]
        assert engine.check_invariants(lts) == [], name
        assert engine.check_theorems(lts) == [], name
        assert engine.check_typing(lts) == [], name


def test_calling_consistency_clean_on_corpus(engines, ltss):
    for name in ("trains_L1", "trains_L2"):
        assert engines[name].check_calling_consistency(ltss[name]) == [], name


def test_calling_consistency_fixture_violates(fixture_docs):
    doc = fixture_docs["trains_L1_bad_calling"]
    engine = Engine(doc)
    lts = engine.explore()
    violations = engine.check_calling_consistency(lts)
    assert violations
    assert any("movement" in v.message for v in violations)


def test_mutant_jump_breaks_order_theorem(engines, ltss):
    engine, lts = engines["trains_L1_mut_jump"], ltss["trains_L1_mut_jump"]
    assert engine.check_invariants(lts) == []
    violations = engine.check_theorems(lts)
    assert violations
    v = violations[0]
    assert v.transition is not None and v.details


def test_mutant_mal_breaks_invariants(engines, ltss):
    engine, lts = engines["trains_L2_mut_mal"], ltss["trains_L2_mut_mal"]
    violations = engine.check_invariants(lts)
    assert violations
    assert any("mal_behind_front" in v.message for v in violations)


def test_trace_accept_examples(engines):
    engine = engines["trains_L1"]
    assert engine.trace_accept([]) is True
    good = [Event("start", ("t1",)), Event("movement", ("t1",)),
            Event("movement", ("t1",)), Event("stop", ("t1",))]
    assert engine.trace_accept(good) is True
    assert engine.trace_accept([Event("movement", ("t1",))]) is False


def test_trace_accept_agrees_with_lts_paths(engines, ltss):
    rng = random.Random(7)
    for name in ("trains_L1", "trains_L2"):
        engine, lts = engines[name], ltss[name]
        alphabet = list(engine.ground_alphabet())
        for _ in range(60):
            # random walk with occasional random (likely refused) events
            trace = []
            state_idx = 0
            for _ in range(rng.randint(0, 6)):
                succs = lts.successors(state_idx)
                if succs and rng.random() < 0.8:
                    ev, state_idx = rng.choice(succs)
                    trace.append(ev)
                else:
                    trace.append(rng.choice(alphabet))
            assert engine.trace_accept(trace) == lts.has_path(trace), trace


def test_lts_export_json_and_dot(docs, ltss):
    doc, lts = docs["trains_L1"], ltss["trains_L1"]
    blob = lts_to_json(doc, lts)
    text = json.dumps(blob)
    parsed = json.loads(text)
    assert parsed["spec"] == "trains_L1"
    assert len(parsed["states"]) == len(lts.states)
    assert len(parsed["transitions"]) == len(lts.transitions)
    assert parsed["truncated"] is False
    dot = lts_to_dot(lts)
    assert dot.startswith("digraph") and "->" in dot


def test_pure_labels_keep_data_unchanged():
    from astdkit.parser import parse

    doc = parse(
        "SPEC puredemo LEVEL 1\nSORTS\n  T = { a }\nVARIABLES\n  v : T +-> T\n"
        "EVENTS\n  PURE ping()\nASTD\n  AUTOMATON M\n    STATE m1\n    STATE m2\n"
        "    INIT m1\n    TRANS m1 -> m2 ON ping()\n  END\n"
    )
    engine = Engine(doc)
    s0 = engine.initial_state()
    (s1,) = engine.combined_step(s0, Event("ping"))
    assert s1.data == s0.data
    assert s1.control != s0.control


def _l1_oracle_key(state):
    """Embed an engine L1 state into the oracle's representation."""
    phases = {}
    for atom, sub in state.control.instances:
        if sub.current == "s1_1":
            phases[atom] = "idle"
        else:
            kleene = sub.sub
            phases[atom] = "moved" if kleene.started else "fresh"
    pos = {
        p.left.name: int(p.right.name[1]) - 1
        for p in state.data.get("position").pairs()
    }
    return (tuple(sorted(phases.items())), tuple(sorted(pos.items())))


def test_every_l1_successor_set_matches_the_oracle(engines, ltss):
    """Transition-level agreement with the independent simulator: at every
    reachable state, each event's successor set is exactly the oracle's."""
    engine, lts = engines["trains_L1"], ltss["trains_L1"]
    for state in lts.states:
        expected = {}
        for (label, train), succ in oracles.l1_successors(
            ({k: v for k, v in _l1_oracle_key(state)[0]},
             {k: v for k, v in _l1_oracle_key(state)[1]}),
        ):
            key = (label, train)
            expected.setdefault(key, set()).add(
                (tuple(sorted(succ[0].items())), tuple(sorted(succ[1].items())))
            )
        for ev in engine.ground_alphabet():
            got = {
                _l1_oracle_key(s) for s in engine.combined_step(state, ev)
            }
            assert got == expected.get((ev.label, ev.args[0]), set()), (state, ev)
