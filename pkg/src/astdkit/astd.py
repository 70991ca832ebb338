"""ASTD operator tree and runtime control-state shapes."""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Loc
from .exprs import Pred


def _loc_field():
    return field(default=None, compare=False, repr=False)


# --- transition arrows ---

@dataclass(frozen=True)
class LocArrow:
    """Local transition between two sibling states."""

    src: str
    dst: str


@dataclass(frozen=True)
class ToSubArrow:
    """Transition entering a named substate of the destination."""

    src: str
    dst: str
    dst_sub: str


@dataclass(frozen=True)
class FromSubArrow:
    """Transition leaving the source, enabled only from a named substate."""

    src: str
    src_sub: str
    dst: str


Arrow = LocArrow | ToSubArrow | FromSubArrow


@dataclass(frozen=True)
class Transition:
    arrow: Arrow
    label: str
    args: tuple[str, ...]          # each arg: quantification variable or atom literal
    guard: Pred | None = None
    final: bool = False
    loc: Loc | None = _loc_field()


# --- the operator tree ---

@dataclass(frozen=True)
class AstdNode:
    pass


@dataclass(frozen=True)
class Elem(AstdNode):
    pass


@dataclass(frozen=True)
class Automaton(AstdNode):
    name: str
    states: tuple[tuple[str, AstdNode], ...]
    init: str
    finals: frozenset[str]
    transitions: tuple[Transition, ...]
    loc: Loc | None = _loc_field()

    def state_body(self, name: str) -> AstdNode:
        for n, body in self.states:
            if n == name:
                return body
        raise KeyError(name)

    def state_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.states)


@dataclass(frozen=True)
class Kleene(AstdNode):
    body: AstdNode
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class QuantNode(AstdNode):
    """Quantified composition over all atoms of a sort.

    kind 'interleave': no synchronisation (delta empty, no predicate).
    kind 'sync': all instances synchronise on delta labels (predicate true).
    kind 'weaksync': instances satisfying sync_pred synchronise on delta labels.
    """

    kind: str
    var: str
    sort: str
    delta: frozenset[str]
    sync_pred: Pred | None
    body: AstdNode
    loc: Loc | None = _loc_field()


# --- control states (shape mirrors the node tree) ---

@dataclass(frozen=True)
class ControlState:
    pass


@dataclass(frozen=True)
class ElemState(ControlState):
    pass


@dataclass(frozen=True)
class AutState(ControlState):
    current: str
    sub: ControlState


@dataclass(frozen=True)
class KleeneState(ControlState):
    started: bool
    sub: ControlState


@dataclass(frozen=True)
class QuantState(ControlState):
    """Instance map as a tuple sorted by atom name (hashable, canonical)."""

    instances: tuple[tuple[str, ControlState], ...]

    def get(self, atom: str) -> ControlState:
        for a, s in self.instances:
            if a == atom:
                return s
        raise KeyError(atom)

    def with_instance(self, atom: str, state: ControlState) -> "QuantState":
        return QuantState(tuple((a, state if a == atom else s) for a, s in self.instances))


def control_to_json(node: AstdNode, state: ControlState) -> dict:
    """JSON rendering of a control state, shaped by its node."""
    if isinstance(node, Elem):
        return {"kind": "elem"}
    if isinstance(node, Automaton):
        assert isinstance(state, AutState)
        return {
            "kind": "automaton",
            "name": node.name,
            "current": state.current,
            "states": list(node.state_names()),
            "finals": sorted(node.finals),
            "sub": control_to_json(node.state_body(state.current), state.sub),
        }
    if isinstance(node, Kleene):
        assert isinstance(state, KleeneState)
        return {
            "kind": "kleene",
            "started": state.started,
            "sub": control_to_json(node.body, state.sub),
        }
    if isinstance(node, QuantNode):
        assert isinstance(state, QuantState)
        return {
            "kind": node.kind,
            "var": node.var,
            "sort": node.sort,
            "instances": [
                {"atom": a, "state": control_to_json(node.body, s)}
                for a, s in state.instances
            ],
        }
    raise TypeError(f"unknown node {node!r}")
