"""Operational semantics of the ASTD operators.

`control_step` returns the complete successor set: an empty set means the
event is refused, more than one successor means nondeterminism. A compound
automaton state both delegates events to its substate and fires its own
transitions; when both are enabled, both successors are produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .astd import (
    Arrow, AstdNode, Automaton, AutState, ControlState, Elem, ElemState,
    FromSubArrow, Kleene, KleeneState, LocArrow, QuantNode, QuantState,
    ToSubArrow, Transition,
)
from .data import DataState, EMPTY_ENV, Env, Evaluator
from .diagnostics import EvalError
from .exprs import Pred, free_idents


@dataclass(frozen=True)
class Event:
    label: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.label}({', '.join(self.args)})"

    def key(self):
        return (self.label, self.args)

    def to_json(self) -> dict:
        return {"label": self.label, "args": list(self.args)}


@dataclass
class EvalContext:
    """Everything guard evaluation and quantification need.

    data=None runs the control layer alone: predicates that mention data
    variables are then assumed true (a deliberate projection, applied
    consistently wherever the control layer is explored in isolation).
    """

    evaluator: Evaluator
    data: DataState | None = None
    weak_sync_strict: bool = False
    domain_override: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def quant_atoms(self, node: QuantNode) -> tuple[str, ...]:
        if node.var in self.domain_override:
            return self.domain_override[node.var]
        sort = self.evaluator.spec.sort(node.sort)
        if sort is None:
            raise EvalError(f"quantification over unknown sort {node.sort!r}")
        return sort.elements

    def guard_holds(self, pred: Pred | None, env: Env) -> bool:
        if pred is None:
            return True
        if self.data is None:
            if self._mentions_data(pred, env):
                return True
            state = DataState({})
        else:
            state = self.data
        return self.evaluator.eval_pred(pred, state, None, env)

    def _mentions_data(self, pred: Pred, env: Env) -> bool:
        spec = self.evaluator.spec
        for name in free_idents(pred):
            if name in env:
                continue
            if spec.variable(name) is not None:
                return True
        return False


def init(node: AstdNode, ctx: EvalContext) -> ControlState:
    if isinstance(node, Elem):
        return ElemState()
    if isinstance(node, Automaton):
        return AutState(node.init, init(node.state_body(node.init), ctx))
    if isinstance(node, Kleene):
        return KleeneState(False, init(node.body, ctx))
    if isinstance(node, QuantNode):
        body0 = init(node.body, ctx)
        return QuantState(tuple((a, body0) for a in sorted(ctx.quant_atoms(node))))
    raise TypeError(f"unknown node {node!r}")


def is_final(node: AstdNode, state: ControlState, ctx: EvalContext, env: Env = EMPTY_ENV) -> bool:
    if isinstance(node, Elem):
        return True
    if isinstance(node, Automaton):
        assert isinstance(state, AutState), _shape_msg(node, state)
        if state.current not in node.finals:
            return False
        return is_final(node.state_body(state.current), state.sub, ctx, env)
    if isinstance(node, Kleene):
        assert isinstance(state, KleeneState), _shape_msg(node, state)
        return (not state.started) or is_final(node.body, state.sub, ctx, env)
    if isinstance(node, QuantNode):
        assert isinstance(state, QuantState), _shape_msg(node, state)
        return all(
            is_final(node.body, s, ctx, env.bind(node.var, ctx.evaluator.atom(a)))
            for a, s in state.instances
        )
    raise TypeError(f"unknown node {node!r}")


def match(pattern: tuple[str, tuple[str, ...]], event: Event, env: Env,
          evaluator: Evaluator) -> bool:
    """Does a transition's (label, arg patterns) accept a ground event under env?

    A pattern argument bound in env must equal the event argument; otherwise
    it is read as an atom literal.
    """
    label, arg_patterns = pattern
    if label != event.label or len(arg_patterns) != len(event.args):
        return False
    for pat, actual in zip(arg_patterns, event.args):
        if pat in env:
            bound = env.lookup(pat)
            if getattr(bound, "name", None) != actual:
                return False
        else:
            if evaluator.spec.atom_sort(pat) is None:
                raise EvalError(f"pattern argument {pat!r} is neither bound nor an atom")
            if pat != actual:
                return False
    return True


def control_step(node: AstdNode, state: ControlState, event: Event, env: Env,
                 ctx: EvalContext) -> list[ControlState]:
    """All successor control states, deduplicated, deterministically ordered."""
    seen: set[ControlState] = set()
    out: list[ControlState] = []
    for s in _step(node, state, event, env, ctx):
        if s not in seen:
            seen.add(s)
            out.append(s)
    out.sort(key=_state_key)
    return out


def _step(node, state, event, env, ctx):
    if isinstance(node, Elem):
        return []

    if isinstance(node, Automaton):
        if not isinstance(state, AutState):
            raise EvalError(_shape_msg(node, state))
        succs = []
        for t in node.transitions:
            succs.extend(_automaton_transition(node, state, t, event, env, ctx))
        # delegation: the current state's body may consume the event itself
        body = node.state_body(state.current)
        for sub2 in _step(body, state.sub, event, env, ctx):
            succs.append(AutState(state.current, sub2))
        return succs

    if isinstance(node, Kleene):
        if not isinstance(state, KleeneState):
            raise EvalError(_shape_msg(node, state))
        succs = [KleeneState(True, s) for s in _step(node.body, state.sub, event, env, ctx)]
        if (not state.started) or is_final(node.body, state.sub, ctx, env):
            fresh = init(node.body, ctx)
            succs.extend(
                KleeneState(True, s) for s in _step(node.body, fresh, event, env, ctx)
            )
        return succs

    if isinstance(node, QuantNode):
        if not isinstance(state, QuantState):
            raise EvalError(_shape_msg(node, state))
        if event.label in node.delta:
            return _step_synchronised(node, state, event, env, ctx)
        succs = []
        for atom_name, sub in state.instances:
            inner_env = env.bind(node.var, ctx.evaluator.atom(atom_name))
            for sub2 in _step(node.body, sub, event, inner_env, ctx):
                succs.append(state.with_instance(atom_name, sub2))
        return succs

    raise TypeError(f"unknown node {node!r}")


def _automaton_transition(node: Automaton, state: AutState, t: Transition,
                          event: Event, env: Env, ctx: EvalContext):
    arrow = t.arrow
    if arrow.src != state.current:
        return
    if isinstance(arrow, FromSubArrow):
        sub = state.sub
        if not isinstance(sub, AutState) or sub.current != arrow.src_sub:
            return
    if not match((t.label, t.args), event, env, ctx.evaluator):
        return
    if not ctx.guard_holds(t.guard, env):
        return
    if t.final and not is_final(node.state_body(state.current), state.sub, ctx, env):
        return
    if isinstance(arrow, (LocArrow, FromSubArrow)):
        dst_body = node.state_body(arrow.dst)
        yield AutState(arrow.dst, init(dst_body, ctx))
    elif isinstance(arrow, ToSubArrow):
        dst_body = node.state_body(arrow.dst)
        if not isinstance(dst_body, Automaton):
            raise EvalError(
                f"transition into substate {arrow.dst_sub!r} of {arrow.dst!r}, "
                "which is not an automaton"
            )
        sub_body = dst_body.state_body(arrow.dst_sub)
        yield AutState(arrow.dst, AutState(arrow.dst_sub, init(sub_body, ctx)))


def _step_synchronised(node: QuantNode, state: QuantState, event: Event,
                       env: Env, ctx: EvalContext):
    """Rules for a synchronised label: participants (sync_pred true) must all
    step; the others stay put, or — under the literal reading of the rule —
    may also step."""
    evaluator = ctx.evaluator
    options: list[list[ControlState]] = []
    atoms = [a for a, _ in state.instances]
    for atom_name, sub in state.instances:
        inner_env = env.bind(node.var, evaluator.atom(atom_name))
        if node.kind == "sync" or node.sync_pred is None:
            participates = True
        else:
            participates = ctx.guard_holds(node.sync_pred, inner_env)
        steps = _step(node.body, sub, event, inner_env, ctx)
        if participates:
            if not steps:
                return []
            options.append(list(steps))
        elif ctx.weak_sync_strict:
            options.append([sub])
        else:
            options.append([sub] + list(steps))

    succs = []
    _product_states(options, 0, [], atoms, succs)
    return succs


def _product_states(options, i, acc, atoms, out):
    if i == len(options):
        out.append(QuantState(tuple(zip(atoms, acc))))
        return
    for choice in options[i]:
        acc.append(choice)
        _product_states(options, i + 1, acc, atoms, out)
        acc.pop()


def state_key(s: ControlState):
    """Deterministic total order over control states."""
    return _state_key(s)


def shape_matches(node: AstdNode, state: ControlState) -> bool:
    if isinstance(node, Elem):
        return isinstance(state, ElemState)
    if isinstance(node, Automaton):
        return (
            isinstance(state, AutState)
            and state.current in node.state_names()
            and shape_matches(node.state_body(state.current), state.sub)
        )
    if isinstance(node, Kleene):
        return isinstance(state, KleeneState) and shape_matches(node.body, state.sub)
    if isinstance(node, QuantNode):
        return isinstance(state, QuantState) and all(
            shape_matches(node.body, s) for _, s in state.instances
        )
    return False


def _state_key(s: ControlState):
    if isinstance(s, ElemState):
        return (0,)
    if isinstance(s, AutState):
        return (1, s.current, _state_key(s.sub))
    if isinstance(s, KleeneState):
        return (2, s.started, _state_key(s.sub))
    if isinstance(s, QuantState):
        return (3, tuple((a, _state_key(x)) for a, x in s.instances))
    raise TypeError(f"not a control state: {s!r}")


def _shape_msg(node, state) -> str:
    return f"control state {type(state).__name__} does not match node {type(node).__name__}"
