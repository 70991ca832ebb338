"""Top-level specification document and its declarations."""

from __future__ import annotations

from dataclasses import dataclass, field

from .astd import AstdNode, Automaton, Kleene, QuantNode, Transition
from .diagnostics import Loc
from .exprs import Expr, Pred, Subst


def _loc_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SortDecl:
    """Finite enumerated sort; declaration order defines its linear order."""

    name: str
    elements: tuple[str, ...]
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class OrderOf:
    """Constant defined as the strict (irreflexive, transitive) order derived
    from a sort's declaration order, as a set of pairs."""

    sort: str


@dataclass(frozen=True)
class ConstDecl:
    name: str
    value: OrderOf | Expr          # Expr must be ground (closed)
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class SortT:
    sort: str

    def __str__(self) -> str:
        return self.sort


@dataclass(frozen=True)
class FnT:
    """Function type between two sorts; total when `total` is set."""

    src: str
    dst: str
    total: bool = False

    def __str__(self) -> str:
        return f"{self.src} {'-->' if self.total else '+->'} {self.dst}"


@dataclass(frozen=True)
class PowT:
    sort: str

    def __str__(self) -> str:
        return f"POW({self.sort})"


TypeExpr = SortT | FnT | PowT


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: TypeExpr
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class NamedPred:
    name: str
    pred: Pred
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class EventTheorem:
    """Two-state assertion checked on every transition labelled `label`."""

    name: str
    label: str
    pred: Pred
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class EventDef:
    label: str
    params: tuple[tuple[str, str], ...]    # (name, sort)
    guard: Pred
    action: Subst
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class PureDecl:
    """Control-only label: no data event, data state unchanged on firing."""

    label: str
    param_sorts: tuple[str, ...]
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class SpecDoc:
    name: str
    level: int
    options: frozenset[str]
    sorts: tuple[SortDecl, ...]
    constants: tuple[ConstDecl, ...]
    variables: tuple[VarDecl, ...]
    invariants: tuple[NamedPred, ...]
    theorems: tuple[EventTheorem, ...]
    events: tuple[EventDef, ...]
    pures: tuple[PureDecl, ...]
    astd: AstdNode

    # --- lookup helpers (linear scans; documents are small) ---

    def sort(self, name: str) -> SortDecl | None:
        for s in self.sorts:
            if s.name == name:
                return s
        return None

    def atom_sort(self, element: str) -> str | None:
        for s in self.sorts:
            if element in s.elements:
                return s.name
        return None

    def constant(self, name: str) -> ConstDecl | None:
        for c in self.constants:
            if c.name == name:
                return c
        return None

    def variable(self, name: str) -> VarDecl | None:
        for v in self.variables:
            if v.name == name:
                return v
        return None

    def event(self, label: str) -> EventDef | None:
        for e in self.events:
            if e.label == label:
                return e
        return None

    def pure(self, label: str) -> PureDecl | None:
        for p in self.pures:
            if p.label == label:
                return p
        return None

    def label_param_sorts(self, label: str) -> tuple[str, ...] | None:
        ev = self.event(label)
        if ev is not None:
            return tuple(sort for _, sort in ev.params)
        pu = self.pure(label)
        if pu is not None:
            return pu.param_sorts
        return None

    def weak_sync_strict(self) -> bool:
        return "weak_sync_strict" in self.options


def astd_transitions(node: AstdNode) -> list[tuple[Transition, AstdNode]]:
    """All transitions in the tree, each paired with its owning automaton."""
    out: list[tuple[Transition, AstdNode]] = []
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Automaton):
            out.extend((t, n) for t in n.transitions)
            stack.extend(body for _, body in n.states)
        elif isinstance(n, Kleene):
            stack.append(n.body)
        elif isinstance(n, QuantNode):
            stack.append(n.body)
    return out


def astd_labels(node: AstdNode) -> set[str]:
    return {t.label for t, _ in astd_transitions(node)}


def quant_nodes(node: AstdNode) -> list[QuantNode]:
    out = []
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, QuantNode):
            out.append(n)
            stack.append(n.body)
        elif isinstance(n, Automaton):
            stack.extend(body for _, body in n.states)
        elif isinstance(n, Kleene):
            stack.append(n.body)
    return out
