"""Trace-refinement relations and the relation-algebra equivalence checks.

Language comparisons are exact: both systems are determinized with
internal-step closure, and inclusion is decided on the product automaton
(trace languages are prefix-closed, so only refusals matter). Truncated
inputs are rejected rather than silently approximated; `bounded` relaxes
this and labels its verdict approximate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .control import Event
from .data import DataState, EMPTY_ENV, Evaluator
from .diagnostics import EvalError, SpecError, Violation
from .document import SpecDoc, quant_nodes
from .engine import Engine, Lts
from .exprs import Expr
from .values import value_key

TAU = "tau"


@dataclass
class RefinementConfig:
    """new_labels: concrete-side events hidden before comparing.
    relabel/erase_args: alphabet alignment when the two systems name the
    "same" step differently (e.g. a synchronised global event standing for
    the per-instance events it replaced)."""

    new_labels: frozenset[str] = frozenset()
    mode: str = "preservation"            # preservation | inclusion | projection
    relabel: dict[str, str] = field(default_factory=dict)
    erase_args: frozenset[str] = frozenset()

    def normalize(self, ev: Event) -> Event | None:
        """Visible image of an event; None = internal."""
        if ev.label in self.new_labels or ev.label == TAU:
            return None
        label = self.relabel.get(ev.label, ev.label)
        args = () if label in self.erase_args else ev.args
        return Event(label, args)


@dataclass
class Verdict:
    ok: bool
    mode: str
    counterexample: list[Event] | None = None
    direction: str = ""
    info: dict = field(default_factory=dict)
    approximate: bool = False

    def __str__(self) -> str:
        head = f"{self.mode}: {'PASS' if self.ok else 'FAIL'}"
        if self.approximate:
            head += " (bounded, approximate)"
        if self.direction:
            head += f" [{self.direction}]"
        if self.counterexample is not None:
            head += "\n  counterexample: " + (
                " . ".join(str(e) for e in self.counterexample) or "<empty>"
            )
        for k, v in self.info.items():
            head += f"\n  {k}: {v}"
        return head

    def to_json(self) -> dict:
        out = {"mode": self.mode, "ok": self.ok, "approximate": self.approximate}
        if self.direction:
            out["direction"] = self.direction
        if self.counterexample is not None:
            out["counterexample"] = [e.to_json() for e in self.counterexample]
        if self.info:
            out["info"] = {k: str(v) for k, v in self.info.items()}
        return out


# --- hiding ---

def hide(lts: Lts, labels) -> Lts:
    """Replace the labels by internal steps; no state merging."""
    labels = set(labels)
    out = Lts(
        kind=lts.kind,
        states=list(lts.states),
        initial=lts.initial,
        transitions=[
            (src, Event(TAU) if ev.label in labels else ev, dst)
            for src, ev, dst in lts.transitions
        ],
        violations=list(lts.violations),
        truncated=lts.truncated,
        alphabet=lts.alphabet,
        spec_name=lts.spec_name,
    )
    return out


# --- determinization with internal closure ---

class _Dfa:
    def __init__(self, lts: Lts, cfg: RefinementConfig):
        self.adj: dict[int, list[tuple[Event | None, int]]] = {}
        for src, ev, dst in lts.transitions:
            self.adj.setdefault(src, []).append((cfg.normalize(ev), dst))
        self.initial = self.closure({lts.initial})

    def closure(self, states: set[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for ev, dst in self.adj.get(s, []):
                if ev is None and dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return frozenset(seen)

    def moves(self, dstate: frozenset[int]) -> dict[tuple, tuple[Event, frozenset[int]]]:
        """Visible event key -> (event, successor DFA state)."""
        raw: dict[tuple, set[int]] = {}
        evs: dict[tuple, Event] = {}
        for s in dstate:
            for ev, dst in self.adj.get(s, []):
                if ev is None:
                    continue
                raw.setdefault(ev.key(), set()).add(dst)
                evs[ev.key()] = ev
        return {k: (evs[k], self.closure(v)) for k, v in raw.items()}


def _require_complete(lts: Lts, bounded: bool, what: str):
    if lts.truncated and not bounded:
        raise SpecError(
            f"{what}: the {lts.spec_name or lts.kind} system is truncated; "
            "an exact verdict needs a complete exploration (pass bounded=True "
            "for an approximate one)"
        )


def language_inclusion(left: Lts, right: Lts, cfg: RefinementConfig,
                       bounded: bool = False) -> tuple[bool, list[Event] | None]:
    """Is every visible trace of `left` a visible trace of `right`?

    Returns (ok, shortest counterexample or None).
    """
    _require_complete(left, bounded, "language inclusion")
    _require_complete(right, bounded, "language inclusion")
    A, B = _Dfa(left, cfg), _Dfa(right, cfg)
    start = (A.initial, B.initial)
    seen = {start}
    queue: list[tuple[frozenset, frozenset, tuple]] = [(A.initial, B.initial, ())]
    head = 0
    while head < len(queue):
        a, b, path = queue[head]
        head += 1
        amoves = A.moves(a)
        bmoves = B.moves(b)
        for key, (ev, a2) in sorted(amoves.items()):
            if key not in bmoves:
                return False, list(path) + [ev]
            b2 = bmoves[key][1]
            nxt = (a2, b2)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((a2, b2, path + (ev,)))
    return True, None


def language_equal(left: Lts, right: Lts, cfg: RefinementConfig,
                   bounded: bool = False) -> tuple[bool, list[Event] | None, str]:
    ok, cx = language_inclusion(left, right, cfg, bounded)
    if not ok:
        return False, cx, "left-not-in-right"
    ok, cx = language_inclusion(right, left, cfg, bounded)
    if not ok:
        return False, cx, "right-not-in-left"
    return True, None, ""


# --- the refinement relations ---

def trace_preservation(abstract: Lts, concrete: Lts, cfg: RefinementConfig,
                       bounded: bool = False) -> Verdict:
    """Every visible abstract trace survives in the concrete system once the
    new (concrete-only) events are hidden."""
    ok, cx = language_inclusion(abstract, concrete, cfg, bounded)
    return Verdict(
        ok=ok, mode="preservation", counterexample=cx,
        direction="abstract-traces preserved in concrete",
        approximate=bounded and (abstract.truncated or concrete.truncated),
    )


def trace_inclusion(concrete: Lts, abstract: Lts, cfg: RefinementConfig,
                    bounded: bool = False) -> Verdict:
    """Every visible concrete trace was already allowed by the abstract system."""
    ok, cx = language_inclusion(concrete, abstract, cfg, bounded)
    return Verdict(
        ok=ok, mode="inclusion", counterexample=cx,
        direction="concrete-traces included in abstract",
        approximate=bounded and (abstract.truncated or concrete.truncated),
    )


def project_lts(concrete_spec: SpecDoc, concrete: Lts, instance: str,
                cfg: RefinementConfig) -> Lts:
    """Projection of a concrete system onto one instance.

    Events whose arguments mention the instance are kept. A synchronised
    event (label in some quantifier's delta) is kept for the instance iff the
    synchronisation predicate held for it at the source state; it is then
    renamed via cfg.relabel and given the instance as its argument. All other
    events become internal.
    """
    evaluator = Evaluator(concrete_spec)
    sync: dict[str, object] = {}
    for q in quant_nodes(concrete_spec.astd):
        for label in q.delta:
            sync[label] = q

    def keep(src_state, ev: Event) -> Event | None:
        if instance in ev.args:
            return ev
        q = sync.get(ev.label)
        if q is not None:
            if q.kind == "sync" or q.sync_pred is None:
                held = True
            else:
                env = EMPTY_ENV.bind(q.var, evaluator.atom(instance))
                data = src_state.data if src_state.data is not None else DataState({})
                try:
                    held = evaluator.eval_pred(q.sync_pred, data, None, env)
                except EvalError:
                    held = False
            if held:
                label = cfg.relabel.get(ev.label, ev.label)
                return Event(label, (instance,))
        return None

    transitions = []
    for src, ev, dst in concrete.transitions:
        kept = keep(concrete.states[src], ev)
        transitions.append((src, kept if kept is not None else Event(TAU), dst))
    return Lts(
        kind=concrete.kind,
        states=list(concrete.states),
        initial=concrete.initial,
        transitions=transitions,
        truncated=concrete.truncated,
        alphabet=concrete.alphabet,
        spec_name=f"{concrete.spec_name}|{instance}",
    )


def projection_refinement(abstract_spec: SpecDoc, concrete_spec: SpecDoc,
                          concrete: Lts, instance: str,
                          cfg: RefinementConfig | None = None,
                          bounded: bool = False) -> Verdict:
    """Is the instance's local behaviour preserved by the concrete system?

    The abstract side is the quantified specification restricted to the
    single instance; the concrete side is the global system projected onto
    events involving that instance. Preservation (abstract within projected)
    decides the verdict; the inclusion direction is reported informationally.
    """
    cfg = cfg or RefinementConfig()
    roots = quant_nodes(abstract_spec.astd)
    if not roots:
        raise SpecError("projection needs a quantified abstract specification")
    override = {q.var: (instance,) for q in roots}
    abs_engine = Engine(abstract_spec, domain_override=override)
    abstract_lts = abs_engine.explore()
    projected = project_lts(concrete_spec, concrete, instance, cfg)

    plain = RefinementConfig(new_labels=cfg.new_labels)
    ok, cx = language_inclusion(abstract_lts, projected, plain, bounded)
    info = {}
    inc_ok, inc_cx = language_inclusion(projected, abstract_lts, plain, bounded)
    info["inclusion_direction"] = "pass" if inc_ok else (
        "fail: " + " . ".join(map(str, inc_cx))
    )
    return Verdict(
        ok=ok, mode=f"projection[{instance}]", counterexample=cx,
        direction="single-instance behaviour preserved",
        info=info,
        approximate=bounded and concrete.truncated,
    )


# --- event relations (§ relation algebra of the global compute) ---

@dataclass(frozen=True)
class EventRelation:
    label: str
    args: tuple[str, ...]
    pairs: frozenset[tuple[DataState, DataState]]

    def compose(self, other: "EventRelation") -> frozenset:
        by_src: dict[DataState, list[DataState]] = {}
        for a, b in other.pairs:
            by_src.setdefault(a, []).append(b)
        out = set()
        for a, b in self.pairs:
            for c in by_src.get(b, []):
                out.add((a, c))
        return frozenset(out)


def data_universe(lts: Lts) -> list[DataState]:
    """Distinct data projections of an explored system, canonically ordered."""
    seen = set()
    out = []
    for s in lts.states:
        if s.data is not None and s.data not in seen:
            seen.add(s.data)
            out.append(s.data)
    out.sort(key=lambda d: tuple((n, value_key(v)) for n, v in d.items()))
    return out


def event_relation(spec: SpecDoc, label: str, args: tuple[str, ...],
                   universe) -> EventRelation:
    evaluator = Evaluator(spec)
    edef = spec.event(label)
    if edef is None:
        raise SpecError(f"no event named {label!r}")
    pairs = set()
    for d in universe:
        if evaluator.event_enabled(edef, args, d):
            for d2 in evaluator.event_fire(edef, args, d):
                pairs.add((d, d2))
    return EventRelation(label, tuple(args), frozenset(pairs))


def relations_commute(r1: EventRelation, r2: EventRelation) -> bool:
    return r1.compose(r2) == r2.compose(r1)


def seq_equivalence(spec: SpecDoc, universe, global_label: str = "compute",
                    local_label: str = "compute_l") -> Verdict:
    """One global step equals the sequential composition of the local steps
    over all enabled instances, taken in canonical (declaration) order."""
    evaluator = Evaluator(spec)
    gdef = spec.event(global_label)
    ldef = spec.event(local_label)
    if gdef is None or ldef is None:
        raise SpecError(
            f"seq_equivalence needs both {global_label!r} and {local_label!r} events"
        )
    if len(ldef.params) != 1:
        raise SpecError(f"{local_label!r} must take exactly one parameter")
    sort = spec.sort(ldef.params[0][1])
    for d in universe:
        if not evaluator.event_enabled(gdef, (), d):
            continue
        global_posts = set(evaluator.event_fire(gdef, (), d))
        instances = [
            a for a in sort.elements if evaluator.event_enabled(ldef, (a,), d)
        ]
        composed = {d}
        for a in instances:
            nxt = set()
            for mid in composed:
                nxt.update(evaluator.event_fire(ldef, (a,), mid))
            composed = nxt
        if global_posts != composed:
            return Verdict(
                ok=False, mode="seq-equivalence",
                info={
                    "state": d.to_json(),
                    "global_only": len(global_posts - composed),
                    "composed_only": len(composed - global_posts),
                },
            )
    return Verdict(ok=True, mode="seq-equivalence",
                   info={"states_checked": len(list(universe))})


# --- gluing ---

def gluing_check(spec: SpecDoc, lts: Lts, pairs: list[tuple[Expr, Expr]],
                 comm_labels) -> list[Violation]:
    """Check variable-copy agreement at stable points of a complete system.

    A state is stable when none of its enabled events is a communication; on
    those states each pair of expressions must evaluate to equal values.
    """
    evaluator = Evaluator(spec)
    comm = set(comm_labels)
    out = []
    for i, state in enumerate(lts.states):
        if state.data is None:
            continue
        if any(ev.label in comm for ev, _ in lts.successors(i)):
            continue
        for left, right in pairs:
            try:
                lv = evaluator.eval_expr(left, state.data, None, EMPTY_ENV)
                rv = evaluator.eval_expr(right, state.data, None, EMPTY_ENV)
            except EvalError as err:
                out.append(Violation(
                    "gluing", f"evaluation error: {err}", state_index=i,
                    details={"state": state.data.to_json()},
                ))
                continue
            if lv != rv:
                out.append(Violation(
                    "gluing", f"copies disagree: {lv} /= {rv}",
                    state_index=i,
                    details={"state": state.data.to_json()},
                ))
    return out
