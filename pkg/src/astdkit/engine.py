"""The executable coupled system: control layer + data layer.

`Engine` owns one specification and provides stepping, breadth-first
exploration into a labelled transition system, trace acceptance, and the
invariant / theorem / calling-consistency checks. Exploration is
deterministic: the ground-event alphabet and all successor sets are
canonically ordered, so two runs produce identical state numbering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

from .astd import ControlState, control_to_json
from .control import Event, EvalContext, control_step, init, state_key
from .data import DataState, EMPTY_ENV, Evaluator
from .diagnostics import EvalError, Violation
from .document import SpecDoc
from .values import value_key


@dataclass(frozen=True)
class CombinedState:
    control: ControlState
    data: DataState | None      # None when exploring the control layer alone

    def key(self):
        data_key = None if self.data is None else tuple(
            (n, value_key(v)) for n, v in self.data.items()
        )
        return (state_key(self.control), data_key)


@dataclass
class Lts:
    """Explored labelled transition system with canonical state indices."""

    kind: str                                    # "combined" | "control"
    states: list[CombinedState] = field(default_factory=list)
    initial: int = 0
    transitions: list[tuple[int, Event, int]] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    truncated: bool = False
    alphabet: tuple[Event, ...] = ()
    spec_name: str = ""

    def labels(self) -> set[str]:
        return {e.label for _, e, _ in self.transitions}

    def successors(self, index: int) -> list[tuple[Event, int]]:
        adj = self._adjacency()
        return adj.get(index, [])

    def _adjacency(self):
        if not hasattr(self, "_adj"):
            adj: dict[int, list[tuple[Event, int]]] = {}
            for src, ev, dst in self.transitions:
                adj.setdefault(src, []).append((ev, dst))
            self._adj = adj
        return self._adj

    def has_path(self, trace) -> bool:
        """Is the event sequence a path from the initial state?"""
        frontier = {self.initial}
        for ev in trace:
            nxt = set()
            for i in frontier:
                for e, j in self.successors(i):
                    if e == ev:
                        nxt.add(j)
            if not nxt:
                return False
            frontier = nxt
        return True


class Engine:
    def __init__(self, spec: SpecDoc, control_only: bool = False,
                 domain_override: dict[str, tuple[str, ...]] | None = None):
        self.spec = spec
        self.control_only = control_only
        self.evaluator = Evaluator(spec)
        self.ctx = EvalContext(
            evaluator=self.evaluator,
            data=None,
            weak_sync_strict=spec.weak_sync_strict(),
            domain_override=dict(domain_override or {}),
        )
        self._alphabet: tuple[Event, ...] | None = None

    # --- alphabet ---

    def ground_alphabet(self) -> tuple[Event, ...]:
        """Every declared label applied to every argument tuple of its sorts."""
        if self._alphabet is not None:
            return self._alphabet
        events: list[Event] = []
        labels: list[tuple[str, tuple[str, ...]]] = []
        labels.extend((e.label, tuple(s for _, s in e.params)) for e in self.spec.events)
        labels.extend((p.label, p.param_sorts) for p in self.spec.pures)
        for label, sorts in labels:
            domains = [self.spec.sort(s).elements for s in sorts]
            for combo in iproduct(*domains):
                events.append(Event(label, tuple(combo)))
        events.sort(key=lambda e: e.key())
        self._alphabet = tuple(events)
        return self._alphabet

    # --- stepping ---

    def initial_state(self) -> CombinedState:
        data = None if self.control_only else self.evaluator.initial_data()
        return CombinedState(init(self.spec.astd, self.ctx), data)

    def combined_step(self, state: CombinedState, event: Event) -> list[CombinedState]:
        """All successors; empty = refused (by either layer)."""
        ctx = self._ctx_for(state)
        control_succs = control_step(self.spec.astd, state.control, event, EMPTY_ENV, ctx)
        if not control_succs:
            return []
        data_succs = self._data_successors(state, event)
        if data_succs is None:
            return []
        out = [
            CombinedState(c, d)
            for c in control_succs
            for d in data_succs
        ]
        out.sort(key=lambda s: s.key())
        return out

    def _ctx_for(self, state: CombinedState) -> EvalContext:
        return EvalContext(
            evaluator=self.evaluator,
            data=state.data,
            weak_sync_strict=self.ctx.weak_sync_strict,
            domain_override=self.ctx.domain_override,
        )

    def _data_successors(self, state: CombinedState, event: Event):
        """List of data states, [None] when running control-only, or None = refused."""
        if self.control_only or state.data is None:
            return [None]
        ev = self.spec.event(event.label)
        if ev is None:
            if self.spec.pure(event.label) is not None:
                return [state.data]
            return None
        if not self.evaluator.event_enabled(ev, event.args, state.data):
            return None
        posts = self.evaluator.event_fire(ev, event.args, state.data)
        return posts or None

    def control_accepts(self, state: CombinedState, event: Event) -> bool:
        ctx = self._ctx_for(state)
        return bool(control_step(self.spec.astd, state.control, event, EMPTY_ENV, ctx))

    def enabled_events(self, state: CombinedState) -> list[tuple[Event, int]]:
        """Enabled ground events with their successor counts, in canonical order."""
        out = []
        for ev in self.ground_alphabet():
            succs = self.combined_step(state, ev)
            if succs:
                out.append((ev, len(succs)))
        return out

    # --- exploration ---

    def explore(self, max_states: int | None = None, max_depth: int | None = None) -> Lts:
        lts = Lts(
            kind="control" if self.control_only else "combined",
            alphabet=self.ground_alphabet(),
            spec_name=self.spec.name,
        )
        initial = self.initial_state()
        index: dict = {initial.key(): 0}
        lts.states.append(initial)
        queue: list[tuple[int, int]] = [(0, 0)]
        head = 0
        while head < len(queue):
            i, depth = queue[head]
            head += 1
            if max_depth is not None and depth >= max_depth:
                lts.truncated = True
                continue
            state = lts.states[i]
            for ev in lts.alphabet:
                for succ in self.combined_step(state, ev):
                    k = succ.key()
                    j = index.get(k)
                    if j is None:
                        if max_states is not None and len(lts.states) >= max_states:
                            lts.truncated = True
                            continue
                        j = len(lts.states)
                        index[k] = j
                        lts.states.append(succ)
                        queue.append((j, depth + 1))
                    lts.transitions.append((i, ev, j))
        return lts

    # --- trace acceptance ---

    def trace_accept(self, trace) -> bool:
        """True iff some path through combined_step consumes the whole trace."""
        frontier: dict = {}
        s0 = self.initial_state()
        frontier[s0.key()] = s0
        for ev in trace:
            nxt: dict = {}
            for state in frontier.values():
                for succ in self.combined_step(state, ev):
                    nxt[succ.key()] = succ
            if not nxt:
                return False
            frontier = nxt
        return True

    # --- checks ---

    def check_invariants(self, lts: Lts) -> list[Violation]:
        out = []
        for i, state in enumerate(lts.states):
            if state.data is None:
                continue
            for inv in self.spec.invariants:
                try:
                    ok = self.evaluator.eval_pred(inv.pred, state.data, None, EMPTY_ENV)
                except EvalError as err:
                    out.append(Violation(
                        "invariant", f"{inv.name}: evaluation error: {err}",
                        state_index=i, details={"state": state.data.to_json()},
                    ))
                    continue
                if not ok:
                    out.append(Violation(
                        "invariant", f"{inv.name} is false",
                        state_index=i, details={"state": state.data.to_json()},
                    ))
        return out

    def check_theorems(self, lts: Lts) -> list[Violation]:
        out = []
        by_label: dict[str, list] = {}
        for thm in self.spec.theorems:
            by_label.setdefault(thm.label, []).append(thm)
        for src, ev, dst in lts.transitions:
            pre = lts.states[src].data
            post = lts.states[dst].data
            if pre is None or post is None:
                continue
            for thm in by_label.get(ev.label, []):
                env = EMPTY_ENV
                edef = self.spec.event(ev.label)
                if edef is not None:
                    env = self.evaluator.bind_params(edef, ev.args)
                try:
                    ok = self.evaluator.eval_pred(thm.pred, pre, post, env)
                except EvalError as err:
                    out.append(Violation(
                        "theorem", f"{thm.name}: evaluation error: {err}",
                        transition=(src, ev, dst),
                    ))
                    continue
                if not ok:
                    out.append(Violation(
                        "theorem", f"{thm.name} is false",
                        transition=(src, ev, dst),
                        details={"pre": pre.to_json(), "post": post.to_json()},
                    ))
        return out

    def check_calling_consistency(self, lts: Lts) -> list[Violation]:
        """Control layer enables an event whose data guard is false: the
        desk-scale analogue of an undischarged calling proof obligation."""
        out = []
        for i, state in enumerate(lts.states):
            if state.data is None:
                continue
            for ev in self.ground_alphabet():
                edef = self.spec.event(ev.label)
                if edef is None:
                    continue
                if not self.control_accepts(state, ev):
                    continue
                if not self.evaluator.event_enabled(edef, ev.args, state.data):
                    out.append(Violation(
                        "calling",
                        f"control enables {ev} but its data guard is false",
                        state_index=i,
                        details={"state": state.data.to_json()},
                    ))
        return out

    def check_typing(self, lts: Lts) -> list[Violation]:
        out = []
        for i, state in enumerate(lts.states):
            if state.data is None:
                continue
            for name in self.evaluator.check_typing(state.data):
                out.append(Violation(
                    "typing", f"variable {name} left its declared type",
                    state_index=i, details={"state": state.data.to_json()},
                ))
        return out


# --- export ---

def state_to_json(spec: SpecDoc, state: CombinedState) -> dict:
    out = {"control": control_to_json(spec.astd, state.control)}
    if state.data is not None:
        out["data"] = state.data.to_json()
    return out


def lts_to_json(spec: SpecDoc, lts: Lts) -> dict:
    return {
        "spec": lts.spec_name,
        "kind": lts.kind,
        "truncated": lts.truncated,
        "initial": lts.initial,
        "states": [
            {"index": i, **state_to_json(spec, s)} for i, s in enumerate(lts.states)
        ],
        "transitions": [
            {"from": src, "event": ev.to_json(), "to": dst}
            for src, ev, dst in lts.transitions
        ],
        "violations": [v.to_json() for v in lts.violations],
        "alphabet": [e.to_json() for e in lts.alphabet],
    }


def lts_to_dot(lts: Lts) -> str:
    lines = ["digraph lts {", "  rankdir=LR;", "  node [shape=circle];"]
    if lts.truncated:
        lines.append('  label="truncated exploration";')
    lines.append(f"  init [shape=point]; init -> {lts.initial};")
    violating = {v.state_index for v in lts.violations if v.state_index is not None}
    for i in range(len(lts.states)):
        color = ", color=red" if i in violating else ""
        lines.append(f'  {i} [label="{i}"{color}];')
    for src, ev, dst in lts.transitions:
        lines.append(f'  {src} -> {dst} [label="{ev}"];')
    lines.append("}")
    return "\n".join(lines)
