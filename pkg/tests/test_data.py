import pytest
from hypothesis import given, settings, strategies as st

from astdkit.data import DataState, EMPTY_ENV, Env, Evaluator
from astdkit.diagnostics import EvalError
from astdkit.document import FnT
from astdkit.parser import parse, parse_expr, parse_pred
from astdkit.values import Atom, PairV, SetV, map_of

import oracles


def _ev(doc):
    return Evaluator(doc)


def _pos(evaluator, entries):
    return map_of(
        (evaluator.atom(t), evaluator.atom(p)) for t, p in entries.items()
    )


@pytest.fixture()
def l1(docs):
    return docs["trains_L1"]


@pytest.fixture()
def l2(docs):
    return docs["trains_L2"]


def test_invariant_on_good_and_bad_states(l1):
    ev = _ev(l1)
    inv = l1.invariants[0].pred
    good = DataState({"position": _pos(ev, {"t1": "p1", "t2": "p3"})})
    bad = DataState({"position": _pos(ev, {"t1": "p2", "t2": "p2"})})
    assert ev.eval_pred(inv, good, None, EMPTY_ENV) is True
    assert ev.eval_pred(inv, bad, None, EMPTY_ENV) is False


def test_application_outside_domain_is_an_error(l1):
    ev = _ev(l1)
    state = DataState({"position": _pos(ev, {"t1": "p1"})})
    with pytest.raises(EvalError):
        ev.eval_expr(parse_expr("position(t2)"), state, None, EMPTY_ENV)


def test_movement_post_states_match_fig_oracle(l1):
    """position={t1:p1,t2:p3}: movement(t1) may stay or advance one, never
    reach or jump the train in front (independent oracle enumerates)."""
    ev = _ev(l1)
    pre = DataState({"position": _pos(ev, {"t1": "p1", "t2": "p3"})})
    edef = l1.event("movement")
    posts = ev.event_fire(edef, ("t1",), pre)
    got = sorted(
        p.get("position").apply(ev.atom("t1")).name for p in posts
    )
    expected = sorted(
        f"p{i + 1}" for i in oracles.movement_targets({"t1": 0, "t2": 2}, "t1")
    )
    assert got == expected == ["p1", "p2"]


def test_compute_l_post_states_match_oracle(l2):
    ev = _ev(l2)
    pre = DataState({
        "position": _pos(ev, {"t1": "p1", "t2": "p3"}),
        "mal": map_of([]),
    })
    posts = ev.event_fire(l2.event("compute_l"), ("t1",), pre)
    got = sorted(p.get("mal").apply(ev.atom("t1")).name for p in posts)
    expected = sorted(
        f"p{i + 1}" for i in oracles.compute_l_targets({"t1": 0, "t2": 2}, "t1")
    )
    assert got == expected == ["p1", "p2"]


def test_pointwise_assignment_overrides_one_entry(docs):
    l4 = docs["trains_L4"]
    ev = _ev(l4)
    pre = DataState({
        "on_board_position": _pos(ev, {"t1": "p2"}),
        "track_position": _pos(ev, {"t1": "p1"}),
        "on_board_mal": map_of([]),
        "track_mal": map_of([]),
    })
    posts = ev.event_fire(l4.event("commBT"), ("t1",), pre)
    assert len(posts) == 1
    assert posts[0].get("track_position") == _pos(ev, {"t1": "p2"})


def test_infeasible_such_yields_no_state(l1):
    ev = _ev(l1)
    doc = parse(
        "SPEC x LEVEL 1\nSORTS\n  T = { a }\nVARIABLES\n  v : T +-> T\n"
        "EVENTS\n  EVENT e()\n    THEN v :| (false)\n  END\nASTD\n  ELEM\n"
    )
    e = Evaluator(doc)
    assert e.apply_subst(doc.event("e").action, DataState({"v": map_of([])}),
                         EMPTY_ENV) == []


def test_parallel_write_conflict_is_an_error():
    doc = parse(
        "SPEC x LEVEL 1\nSORTS\n  T = { a }\nVARIABLES\n  v : T +-> T\n"
        "EVENTS\n  EVENT e()\n    THEN v := {} || v := { a |-> a }\n  END\n"
        "ASTD\n  ELEM\n"
    )
    e = Evaluator(doc)
    with pytest.raises(EvalError, match="twice"):
        e.apply_subst(doc.event("e").action, DataState({"v": map_of([])}), EMPTY_ENV)


def test_event_guard_blocks_fire(l1):
    ev = _ev(l1)
    pre = DataState({"position": map_of([])})
    edef = l1.event("movement")
    assert ev.event_enabled(edef, ("t1",), pre) is False
    with pytest.raises(EvalError, match="disabled"):
        ev.event_fire(edef, ("t1",), pre)


def test_enumerate_partial_functions_size(l1):
    ev = _ev(l1)
    vals = ev.enumerate_type(FnT("TRAIN", "TRACK"))
    assert len(vals) == (4 + 1) ** 2
    assert all(ev.value_in_type(v, FnT("TRAIN", "TRACK")) for v in vals)


def test_typing_preserved_by_every_corpus_event(l2):
    ev = _ev(l2)
    pre = DataState({
        "position": _pos(ev, {"t1": "p1"}),
        "mal": _pos(ev, {"t1": "p2"}),
    })
    for edef in l2.events:
        for args in ((), ("t1",), ("t2",)):
            if len(args) != len(edef.params):
                continue
            if not ev.event_enabled(edef, args, pre):
                continue
            for post in ev.event_fire(edef, args, pre):
                assert ev.check_typing(post) == []


def test_env_shadowing():
    env = Env({"x": Atom("T", "a")})
    inner = env.bind("x", Atom("T", "b"))
    assert env.lookup("x").name == "a"
    assert inner.lookup("x").name == "b"
    with pytest.raises(EvalError):
        env.lookup("y")


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_parallel_commutes_on_disjoint_writes(docs, data):
    """Parallel(a, b) == Parallel(b, a) when write sets are disjoint."""
    from astdkit.exprs import Parallel

    l4 = docs["trains_L4"]
    ev = Evaluator(l4)
    t = data.draw(st.sampled_from(["t1", "t2"]))
    pre = DataState({
        "on_board_position": _pos(ev, {t: "p2"}),
        "track_position": map_of([]),
        "on_board_mal": map_of([]),
        "track_mal": _pos(ev, {t: "p3"}),
    })
    a = l4.event("commBT").action
    b = l4.event("commTB").action
    env = ev.bind_params(l4.event("commBT"), (t,))
    left = ev.apply_subst(Parallel((a, b)), pre, env)
    right = ev.apply_subst(Parallel((b, a)), pre, env)
    assert left == right
