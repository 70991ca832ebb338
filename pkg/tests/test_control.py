import pytest

from astdkit.astd import AutState, ElemState, KleeneState, QuantState
from astdkit.control import (
    EvalContext, Event, control_step, init, is_final, match, shape_matches,
)
from astdkit.data import DataState, EMPTY_ENV, Evaluator
from astdkit.engine import Engine
from astdkit.parser import parse
from astdkit.refinement import RefinementConfig, language_equal
from astdkit.engine import Lts, CombinedState


def _ctx(doc, data=None, strict=False):
    return EvalContext(evaluator=Evaluator(doc), data=data, weak_sync_strict=strict)


SUB_DEMO = """SPEC subdemo LEVEL 1
SORTS
  T = { a }
EVENTS
  PURE enter()
  PURE dive()
  PURE leave()
  PURE back()
ASTD
  AUTOMATON M
    STATE m1
    STATE m2 =
      AUTOMATON N
        STATE n1
        STATE n2
        INIT n1
        TRANS n1 -> n2 ON dive()
      END
    INIT m1
    FINAL m1
    TRANS m1 -> m2 AT n2 ON enter()
    TRANS m2 FROM n2 -> m1 ON leave()
    TRANS m2 -> m1 ON back()
  END
"""

KLEENE_DEMO = """SPEC kdemo LEVEL 1
SORTS
  T = { a }
EVENTS
  PURE tick()
ASTD
  KLEENE
    AUTOMATON K
      STATE k1
      STATE k2
      INIT k1
      FINAL k2
      TRANS k1 -> k2 ON tick()
    END
  END
"""

WEAK_DEMO = """SPEC wdemo LEVEL 1
{options}SORTS
  T = {{ a, b }}
EVENTS
  PURE beep()
ASTD
  WEAKSYNC q : T SYNCSET {{ beep }} WHERE q = a
    AUTOMATON M
      STATE m1
      STATE m2
      INIT m1
      TRANS m1 -> m2 ON beep()
    END
  END
"""


def test_init_shapes(docs):
    l1 = docs["trains_L1"]
    ctx = _ctx(l1)
    s0 = init(l1.astd, ctx)
    assert isinstance(s0, QuantState)
    for atom, sub in s0.instances:
        assert isinstance(sub, AutState) and sub.current == "s1_1"
        assert isinstance(sub.sub, ElemState)
    assert [a for a, _ in s0.instances] == ["t1", "t2"]


def test_init_kleene_not_started():
    doc = parse(KLEENE_DEMO)
    ctx = _ctx(doc)
    s0 = init(doc.astd, ctx)
    assert s0 == KleeneState(False, AutState("k1", ElemState()))
    # zero iterations of the body must already be final
    assert is_final(doc.astd, s0, ctx) is True


def test_kleene_restart():
    doc = parse(KLEENE_DEMO)
    ctx = _ctx(doc)
    s0 = init(doc.astd, ctx)
    (s1,) = control_step(doc.astd, s0, Event("tick"), EMPTY_ENV, ctx)
    assert s1 == KleeneState(True, AutState("k2", ElemState()))
    assert is_final(doc.astd, s1, ctx) is True
    # body is final: the closure restarts and runs the body again
    (s2,) = control_step(doc.astd, s1, Event("tick"), EMPTY_ENV, ctx)
    assert s2 == s1


def test_automaton_finality_gates_final_transitions(docs):
    l1 = docs["trains_L1"]
    ctx = _ctx(l1, data=Evaluator(l1).initial_data())
    engine = Engine(l1)
    s0 = engine.initial_state()
    # stop is marked FINAL; its source's Kleene body is always final here,
    # so stop fires right after start
    (s1,) = [
        s for s in engine.combined_step(s0, Event("start", ("t1",)))
        if s.data.get("position").apply(Evaluator(l1).atom("t1")).name == "p1"
    ]
    assert engine.combined_step(s1, Event("stop", ("t1",)))


def test_tosub_enters_named_substate():
    doc = parse(SUB_DEMO)
    ctx = _ctx(doc)
    s0 = init(doc.astd, ctx)
    (s1,) = control_step(doc.astd, s0, Event("enter"), EMPTY_ENV, ctx)
    assert s1 == AutState("m2", AutState("n2", ElemState()))


def test_fromsub_requires_named_substate():
    doc = parse(SUB_DEMO)
    ctx = _ctx(doc)
    at_n1 = AutState("m2", AutState("n1", ElemState()))
    at_n2 = AutState("m2", AutState("n2", ElemState()))
    assert control_step(doc.astd, at_n1, Event("leave"), EMPTY_ENV, ctx) == []
    (s,) = control_step(doc.astd, at_n2, Event("leave"), EMPTY_ENV, ctx)
    assert s == AutState("m1", ElemState())


def test_delegation_to_substate():
    doc = parse(SUB_DEMO)
    ctx = _ctx(doc)
    at_n1 = AutState("m2", AutState("n1", ElemState()))
    (s,) = control_step(doc.astd, at_n1, Event("dive"), EMPTY_ENV, ctx)
    assert s == AutState("m2", AutState("n2", ElemState()))


def test_unknown_label_is_refused(docs):
    l1 = docs["trains_L1"]
    ctx = _ctx(l1)
    s0 = init(l1.astd, ctx)
    assert control_step(l1.astd, s0, Event("teleport", ("t1",)), EMPTY_ENV, ctx) == []


def test_match_semantics(docs):
    l1 = docs["trains_L1"]
    ev = Evaluator(l1)
    env = EMPTY_ENV.bind("t", ev.atom("t1"))
    assert match(("movement", ("t",)), Event("movement", ("t1",)), env, ev)
    assert not match(("movement", ("t",)), Event("movement", ("t2",)), env, ev)
    assert not match(("movement", ("t",)), Event("start", ("t1",)), env, ev)
    # literal atom pattern
    assert match(("movement", ("t1",)), Event("movement", ("t1",)), EMPTY_ENV, ev)
    # unparameterised pattern matches under any environment
    assert match(("compute", ()), Event("compute"), env, ev)


def test_weak_sync_literal_vs_strict():
    literal = parse(WEAK_DEMO.format(options=""))
    strict = parse(WEAK_DEMO.format(options="OPTIONS weak_sync_strict\n"))
    ctx_lit = _ctx(literal, strict=False)
    ctx_str = _ctx(strict, strict=True)
    s0 = init(literal.astd, ctx_lit)
    lit_succs = control_step(literal.astd, s0, Event("beep"), EMPTY_ENV, ctx_lit)
    str_succs = control_step(strict.astd, s0, Event("beep"), EMPTY_ENV, ctx_str)
    # literal rule: the non-participant may also step; strict: it must stay
    assert len(lit_succs) == 2
    assert len(str_succs) == 1
    (only,) = str_succs
    assert only.get("a") == AutState("m2", ElemState())
    assert only.get("b") == AutState("m1", ElemState())
    assert only in lit_succs


def test_sync_participant_unable_to_step_refuses_event(docs):
    l3 = docs["trains_L3"]
    engine = Engine(l3)
    s0 = engine.initial_state()
    s1 = engine.combined_step(s0, Event("start", ("t1",)))[0]
    succs = engine.combined_step(s1, Event("compute"))
    assert len(succs) == 4          # one control successor, four limit choices
    # t1 is started and sits in the post-compute state, which has no compute
    # transition: the barrier refuses another compute
    assert engine.combined_step(succs[0], Event("compute")) == []


def test_shape_preservation_over_explored_states(docs):
    l3 = docs["trains_L3"]
    engine = Engine(l3)
    lts = engine.explore()
    for s in lts.states:
        assert shape_matches(l3.astd, s.control)


def test_interleave_decomposition_on_l1(docs):
    l1 = docs["trains_L1"]
    engine = Engine(l1, control_only=True)
    lts = engine.explore()
    node = l1.astd
    ctx = _ctx(l1)
    for state in lts.states:
        qs = state.control
        for evt in engine.ground_alphabet():
            whole = set(control_step(node, qs, evt, EMPTY_ENV, ctx))
            union = set()
            for atom, sub in qs.instances:
                env = EMPTY_ENV.bind(node.var, Evaluator(l1).atom(atom))
                for sub2 in control_step(node.body, sub, evt, env, ctx):
                    union.add(qs.with_instance(atom, sub2))
            assert whole == union


def test_l1_control_language_equals_hand_built_reference(docs):
    """(start movement* stop)* per train, interleaved: reference built by hand."""
    trains = ("t1", "t2")
    states = []
    index = {}
    for a in (False, True):
        for b in (False, True):
            index[(a, b)] = len(states)
            states.append((a, b))
    transitions = []
    for (a, b), i in index.items():
        running = {"t1": a, "t2": b}
        for t in trains:
            flip = dict(running)
            if not running[t]:
                flip[t] = True
                transitions.append((i, Event("start", (t,)),
                                    index[(flip["t1"], flip["t2"])]))
            else:
                transitions.append((i, Event("movement", (t,)), i))
                flip[t] = False
                transitions.append((i, Event("stop", (t,)),
                                    index[(flip["t1"], flip["t2"])]))
    ref = Lts(kind="control", states=[CombinedState(ElemState(), None)] * 4,
              initial=index[(False, False)], transitions=transitions)
    engine = Engine(docs["trains_L1"], control_only=True)
    lts = engine.explore()
    ok, cx, direction = language_equal(ref, lts, RefinementConfig())
    assert ok, (direction, cx)
