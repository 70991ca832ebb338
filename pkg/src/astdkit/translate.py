"""Generation of classical B machine text from a specification.

Two backends:

* state encoding — one state variable per ASTD layer (quantified layers
  become total functions over the quantification sort), one operation per
  transition label whose precondition tests the source layer values and
  whose body assigns the target values and calls the transcribed data
  operation `<label>_act`. Sub-layer variables take a `<name>_none`
  placeholder while their layer is inactive, so preconditions never need
  ancestor conjuncts.

* enabled sets — the benchmark scheme: one `<label>_enabled` set of
  instances per transition label; each operation removes the instance from
  the sets its target state disables and adds it to those it enables.
  Synchronised (unparameterised) labels are rejected: the scheme is
  per-instance by construction.

Operation preconditions are interpreted as guards when the generated
machine is explored into an LTS; transition guards and synchronisation
predicates that mention data variables are projected to true, exactly as in
the engine's control-only exploration, so the two sides stay comparable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .astd import (
    Automaton, AstdNode, AutState, ControlState, Elem, ElemState, Kleene,
    KleeneState, QuantNode, QuantState,
)
from .control import EvalContext, Event, control_step, init, state_key
from .data import DataState, EMPTY_ENV, Evaluator
from .diagnostics import Diagnostic, SpecError
from .document import (
    EventDef, FnT, PowT, SortDecl, SortT, SpecDoc, VarDecl,
)
from .engine import CombinedState, Lts
from .exprs import (
    And, App, Assign, Cmp, Dom, DomBound, Expr, FalseP, Ident, Implies, Not,
    Or, Parallel, Pred, Primed, QuantP, Select, SetLit, Skip, SortBound,
    Subst, Such, TrueP, PairE, Override, Union, Diff, walk_pred, walk_exprs,
)
from .refinement import RefinementConfig, language_equal
from .values import SetV, map_of

BOOL_SORT = SortDecl("BOOL", ("FALSE", "TRUE"))


def sanitize(name: str) -> str:
    """ASTD state names into classical-B identifiers: 2.1 -> S2_1."""
    out = name.replace(".", "_")
    if out and out[0].isdigit():
        out = "S" + out
    return out


# --- machine document ---

@dataclass(frozen=True)
class BOp:
    name: str
    params: tuple[tuple[str, str], ...]         # (name, sort)
    pre: Pred
    body: Subst | None                          # interpretable control body
    act_call: tuple[str, tuple[str, ...]] | None = None
    body_is_data: bool = False                  # rendered but not interpreted


@dataclass(frozen=True)
class BMachineDoc:
    name: str
    sets: tuple[tuple[str, tuple[str, ...]], ...]
    variables: tuple[VarDecl, ...]
    init: tuple[tuple[str, Expr], ...]
    operations: tuple[BOp, ...]


@dataclass(frozen=True)
class EnabledRule:
    label: str
    param_sort: str | None       # None: synchronised label, no operation
    adds: tuple[str, ...]        # labels whose _enabled set gains the instance
    removes: tuple[str, ...]


@dataclass(frozen=True)
class EnabledSetsModel:
    sort: str
    rules: tuple[EnabledRule, ...]
    initially_enabled: frozenset[str]

    def rule(self, label: str) -> EnabledRule | None:
        for r in self.rules:
            if r.label == label:
                return r
        return None


@dataclass
class TranslationResult:
    machine: BMachineDoc
    diagnostics: list[Diagnostic] = field(default_factory=list)
    model: EnabledSetsModel | None = None


# --- per-instance control graph ---

@dataclass
class _InstanceGraph:
    node: AstdNode
    qvar: str | None
    qsort: str | None
    delta: frozenset[str]
    states: list[ControlState]
    index: dict
    edges: list[tuple[int, str, int]]           # (src, label, dst)
    initial: int = 0

    def out_labels(self, i: int) -> frozenset[str]:
        return frozenset(l for s, l, d in self.edges if s == i)


def _instance_event_args(spec: SpecDoc, node: AstdNode, qvar: str | None,
                         diagnostics: list[Diagnostic]) -> dict[str, tuple[str, ...]]:
    """Label -> pattern shape; only () or (qvar,) patterns are translatable."""
    from .document import astd_transitions

    shapes: dict[str, tuple[str, ...]] = {}
    for t, owner in astd_transitions(node):
        if t.label in shapes and shapes[t.label] != t.args:
            diagnostics.append(Diagnostic(
                f"label {t.label} used with different argument patterns; "
                "not translatable", t.loc,
            ))
            continue
        ok = t.args == () or (qvar is not None and t.args == (qvar,))
        if not ok:
            diagnostics.append(Diagnostic(
                f"transition pattern {t.label}({', '.join(t.args)}) is not "
                "the quantification variable; not translatable", t.loc,
            ))
            continue
        shapes[t.label] = t.args
    return shapes


def _instance_graph(spec: SpecDoc, diagnostics: list[Diagnostic]) -> _InstanceGraph:
    root = spec.astd
    qvar = qsort = None
    delta: frozenset[str] = frozenset()
    node = root
    if isinstance(root, QuantNode):
        qvar, qsort, delta = root.var, root.sort, root.delta
        node = root.body
    for sub in _walk_nodes(node):
        if isinstance(sub, QuantNode):
            raise SpecError("nested quantification is not supported by the translators")

    evaluator = Evaluator(spec)
    ctx = EvalContext(evaluator=evaluator, data=None,
                      weak_sync_strict=spec.weak_sync_strict())
    env = EMPTY_ENV
    if qvar is not None:
        env = env.bind(qvar, evaluator.atom(spec.sort(qsort).elements[0]))

    shapes = _instance_event_args(spec, node, qvar, diagnostics)
    rep = spec.sort(qsort).elements[0] if qsort else None
    alphabet = []
    for label, args in sorted(shapes.items()):
        ground = tuple(rep if a == qvar else a for a in args)
        alphabet.append(Event(label, ground))

    g = _InstanceGraph(node, qvar, qsort, delta, [], {}, [])
    s0 = init(node, ctx)
    g.states.append(s0)
    g.index[s0] = 0
    frontier = [0]
    while frontier:
        i = frontier.pop(0)
        for ev in alphabet:
            for succ in control_step(node, g.states[i], ev, env, ctx):
                j = g.index.get(succ)
                if j is None:
                    j = len(g.states)
                    g.index[succ] = j
                    g.states.append(succ)
                    frontier.append(j)
                g.edges.append((i, ev.label, j))
    return g


def _walk_nodes(node: AstdNode):
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Automaton):
            stack.extend(b for _, b in n.states)
        elif isinstance(n, (Kleene, QuantNode)):
            stack.append(n.body)


# --- layer variables ---

@dataclass(frozen=True)
class _Layer:
    kind: str                    # "automaton" | "kleene"
    var: str
    node_name: str
    elements: tuple[str, ...]    # enum elements (automaton layers)
    scoped: bool                 # inactive placeholder value exists
    rename: tuple[tuple[str, str], ...] = ()   # state name -> sanitized

    def sanitized(self, state: str) -> str:
        for a, b in self.rename:
            if a == state:
                return b
        raise KeyError(state)

    @property
    def none_value(self) -> str:
        return f"{self.node_name}_none"


def _collect_layers(node: AstdNode, scoped: bool = False) -> list[_Layer]:
    out: list[_Layer] = []
    if isinstance(node, Elem):
        return out
    if isinstance(node, Automaton):
        rename = tuple((s, sanitize(s)) for s in node.state_names())
        sanitized = [b for _, b in rename]
        if len(set(sanitized)) != len(sanitized):
            raise SpecError(
                f"state name sanitization is not injective in automaton {node.name}"
            )
        elements = tuple(sanitized) + ((f"{node.name}_none",) if scoped else ())
        out.append(_Layer("automaton", f"State_{node.name}", node.name,
                          elements, scoped, rename))
        for sname, body in node.states:
            out.extend(_collect_layers(body, scoped=True))
        return out
    if isinstance(node, Kleene):
        if not isinstance(node.body, Automaton):
            raise SpecError("a Kleene closure over a non-automaton body is not "
                            "supported by the state encoding")
        out.extend(_collect_layers(node.body, scoped=scoped))
        out.append(_Layer("kleene", f"Started_{node.body.name}", node.body.name,
                          ("FALSE", "TRUE"), scoped))
        return out
    raise SpecError(f"unsupported node {type(node).__name__} in state encoding")


def _vector(node: AstdNode, state: ControlState, layers: list[_Layer]) -> dict[str, str]:
    """Layer-variable valuation of one per-instance control state."""
    vec = {}
    for layer in layers:
        vec[layer.var] = layer.none_value if layer.kind == "automaton" and layer.scoped \
            else ("FALSE" if layer.kind == "kleene" else None)
    # always-active automaton defaults are filled by the walk below
    _fill_vector(node, state, vec)
    for layer in layers:
        if vec[layer.var] is None:
            raise SpecError(f"layer {layer.var} left unassigned")
    return vec


def _fill_vector(node: AstdNode, state: ControlState, vec: dict):
    if isinstance(node, Elem):
        return
    if isinstance(node, Automaton):
        assert isinstance(state, AutState)
        vec[f"State_{node.name}"] = sanitize(state.current)
        _fill_vector(node.state_body(state.current), state.sub, vec)
        return
    if isinstance(node, Kleene):
        assert isinstance(state, KleeneState)
        vec[f"Started_{node.body.name}"] = "TRUE" if state.started else "FALSE"
        _fill_vector(node.body, state.sub, vec)
        return
    raise SpecError(f"unsupported node {type(node).__name__}")


# --- condition minimization ---

def _minimize_condition(source: dict, others: list[dict], drop_order: list[str]) -> dict:
    """Smallest (greedy) sub-vector of `source` that excludes every vector in
    `others`; components are dropped in `drop_order`, so the variables the
    caller wants to keep go last."""
    keep = dict(source)
    for var in drop_order:
        trial = {k: v for k, v in keep.items() if k != var}
        if all(any(o.get(k) != v for k, v in trial.items()) for o in others):
            keep = trial
    return keep


def _drop_order(layers: list[_Layer], written: set[str]) -> list[str]:
    """Drop unwritten variables first, then written Kleene flags, then written
    automaton variables innermost-first: the precondition keeps the outermost
    automaton variable the operation actually moves."""
    unwritten = [l.var for l in layers if l.var not in written]
    kleene_written = [l.var for l in layers if l.var in written and l.kind == "kleene"]
    aut_written = [l.var for l in layers if l.var in written and l.kind == "automaton"]
    return unwritten + kleene_written + list(reversed(aut_written))


def _merge_pairs(pairs: list[tuple[dict, dict]]) -> list[tuple[dict, list[dict]]]:
    """Group (source, target) vector pairs into (assignment, sources) groups.

    A pair joins a group when the group's accumulated assignment, applied to
    the pair's source, yields exactly the pair's target.
    """
    groups: list[tuple[dict, list[tuple[dict, dict]]]] = []
    for src, dst in pairs:
        changed = {k: dst[k] for k in dst if src[k] != dst[k]}
        placed = False
        for assign, members in groups:
            merged = dict(assign)
            ok = True
            for k, v in changed.items():
                if merged.get(k, v) != v:
                    ok = False
                    break
                merged[k] = v
            if not ok:
                continue
            if any({**s, **merged} != d for s, d in members + [(src, dst)]):
                continue
            assign.clear()
            assign.update(merged)
            members.append((src, dst))
            placed = True
            break
        if not placed:
            groups.append((dict(changed), [(src, dst)]))
    return [(assign, [s for s, _ in members]) for assign, members in groups]


# --- predicate/substitution construction helpers ---

def _layer_ref(var: str, qvar: str | None) -> Expr:
    base = Ident(var)
    return App(base, Ident(qvar)) if qvar else base


def _layer_ref_primed(var: str, qvar: str | None) -> Expr:
    base = Primed(var)
    return App(base, Ident(qvar)) if qvar else base


def _vec_condition(cond: dict, order: list[str], qvar: str | None) -> Pred:
    parts = [
        Cmp("=", _layer_ref(var, qvar), Ident(cond[var]))
        for var in order if var in cond
    ]
    if not parts:
        return TrueP()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _or_all(preds: list[Pred]) -> Pred:
    if not preds:
        return FalseP()
    out = preds[0]
    for p in preds[1:]:
        out = Or(out, p)
    return out


def _and_all(preds: list[Pred]) -> Pred:
    preds = [p for p in preds if not isinstance(p, TrueP)]
    if not preds:
        return TrueP()
    out = preds[0]
    for p in preds[1:]:
        out = And(out, p)
    return out


def _assign_subst(assign: dict, order: list[str], qvar: str | None) -> list[Subst]:
    return [
        Assign(_layer_ref(var, qvar), Ident(assign[var]))
        for var in order if var in assign
    ]


# --- the state-encoding backend ---

def translate_state_encoding(spec: SpecDoc) -> TranslationResult:
    diagnostics: list[Diagnostic] = []
    graph = _instance_graph(spec, diagnostics)
    layers = _collect_layers(graph.node)
    order = [l.var for l in layers]
    vectors = [_vector(graph.node, s, layers) for s in graph.states]

    # sets: sorts plus one enumeration per automaton layer
    sets = [(s.name, s.elements) for s in spec.sorts]
    for layer in layers:
        if layer.kind == "automaton":
            sets.append((f"{layer.node_name}_STATES", layer.elements))

    # variables: layer variables then data variables
    variables: list[VarDecl] = []
    for layer in layers:
        set_name = f"{layer.node_name}_STATES" if layer.kind == "automaton" else "BOOL"
        if graph.qsort:
            variables.append(VarDecl(layer.var, FnT(graph.qsort, set_name, total=True)))
        else:
            variables.append(VarDecl(layer.var, SortT(set_name)))
    variables.extend(spec.variables)

    # initialisation
    init_vec = vectors[graph.initial]
    init_entries: list[tuple[str, Expr]] = []
    for layer in layers:
        if graph.qsort:
            atoms = spec.sort(graph.qsort).elements
            lit = SetLit(tuple(
                PairE(Ident(a), Ident(init_vec[layer.var])) for a in atoms
            ))
            init_entries.append((layer.var, lit))
        else:
            init_entries.append((layer.var, Ident(init_vec[layer.var])))
    data_eval = Evaluator(spec)
    for v in spec.variables:
        init_entries.append((v.name, _value_literal(data_eval.initial_data().get(v.name))))

    # operations per label
    by_label: dict[str, list[tuple[dict, dict]]] = {}
    for src, label, dst in graph.edges:
        by_label.setdefault(label, []).append((vectors[src], vectors[dst]))
    ops: list[BOp] = []
    labels_in_order = [e.label for e in spec.events] + [p.label for p in spec.pures]
    for label in labels_in_order:
        if label not in by_label:
            continue
        pairs = sorted(
            by_label[label],
            key=lambda p: (tuple(sorted(p[0].items())), tuple(sorted(p[1].items()))),
        )
        # deduplicate: several control edges may give the same vector pair
        seen = set()
        uniq = []
        for p in pairs:
            key = (tuple(sorted(p[0].items())), tuple(sorted(p[1].items())))
            if key not in seen:
                seen.add(key)
                uniq.append(p)
        if label in graph.delta:
            ops.append(_sync_op(spec, label, uniq, vectors, order, layers, graph,
                                diagnostics))
        else:
            ops.append(_plain_op(spec, label, uniq, vectors, order, layers, graph))

    # transcription of every data event: guards become preconditions
    for ev in spec.events:
        ops.append(_act_op(spec, ev, graph))

    machine = BMachineDoc(
        name=spec.name,
        sets=tuple(sets),
        variables=tuple(variables),
        init=tuple(init_entries),
        operations=tuple(o for o in ops if o is not None),
    )
    return TranslationResult(machine, diagnostics)


def _plain_op(spec: SpecDoc, label: str, pairs, vectors, order, layers, graph) -> BOp:
    qvar = graph.qvar
    params = ((qvar, graph.qsort),) if qvar and _label_has_instance_arg(spec, label, graph) else ()
    groups = _merge_pairs(pairs)
    all_sources = [s for _, sources in groups for s in sources]
    others = [v for v in vectors if v not in all_sources]
    conds = []
    for assign, sources in groups:
        dorder = _drop_order(layers, set(assign))
        minimized = []
        for src in sources:
            cond = _minimize_condition(src, others, dorder)
            if cond not in minimized:
                minimized.append(cond)
        conds.append((_or_all([_vec_condition(c, order, qvar) for c in minimized]),
                      assign))
    typing = _param_typing(params)
    pre = _and_all([typing, _or_all([c for c, _ in conds])])
    act_call = _act_call(spec, label, params)
    if len(conds) == 1:
        body_items = _assign_subst(conds[0][1], order, qvar)
        body = Parallel(tuple(body_items)) if len(body_items) > 1 else (
            body_items[0] if body_items else Skip()
        )
    else:
        branches = []
        for cond, assign in conds:
            items = _assign_subst(assign, order, qvar)
            sub = Parallel(tuple(items)) if len(items) > 1 else (
                items[0] if items else Skip()
            )
            branches.append((cond, sub))
        body = Select(tuple(branches))
    return BOp(label, params, pre, body, act_call)


def _sync_op(spec: SpecDoc, label: str, pairs, vectors, order, layers, graph,
             diagnostics) -> BOp | None:
    """Synchronised label: all instances jointly step (predicates over data
    are projected to true, as in control-only exploration)."""
    qvar, qsort = graph.qvar, graph.qsort
    touched = {k for src, dst in pairs for k in src if src[k] != dst[k]}
    if len(touched) != 1:
        diagnostics.append(Diagnostic(
            f"synchronised label {label} changes {len(touched)} layer variables; "
            "the state encoding supports exactly one",
        ))
        return None
    comp = next(iter(touched))
    all_sources = [s for s, _ in pairs]
    others = [v for v in vectors if v not in all_sources]
    dorder = _drop_order(layers, {comp})
    cases = []
    for src, dst in pairs:
        cond = _minimize_condition(src, others, dorder)
        cases.append((_vec_condition(cond, order, qvar), dst[comp]))
    pre_inner = _or_all([c for c, _ in cases])
    pre = QuantP("!", qvar, SortBound(qsort), pre_inner)
    froze = Cmp("=", _layer_ref_primed(comp, qvar), _layer_ref(comp, qvar))
    conjuncts = [Implies(c, Cmp("=", _layer_ref_primed(comp, qvar), Ident(v)))
                 for c, v in cases]
    conjuncts.append(Implies(Not(_or_all([c for c, _ in cases])), froze))
    body = Such(comp, QuantP("!", qvar, SortBound(qsort), _and_all(conjuncts)))
    act_call = _act_call(spec, label, ())
    return BOp(label, (), pre, body, act_call)


def _label_has_instance_arg(spec: SpecDoc, label: str, graph) -> bool:
    from .document import astd_transitions

    for t, _ in astd_transitions(graph.node):
        if t.label == label:
            return t.args == (graph.qvar,)
    return False


def _param_typing(params) -> Pred:
    preds = [Cmp(":", Ident(n), Ident(s)) for n, s in params]
    return _and_all(preds) if preds else TrueP()


def _act_call(spec: SpecDoc, label: str, params) -> tuple[str, tuple[str, ...]] | None:
    if spec.event(label) is None:
        return None
    return (f"{label}_act", tuple(n for n, _ in params))


def _act_op(spec: SpecDoc, ev: EventDef, graph) -> BOp:
    """Transcription of a data event: ANY/WHERE guards become preconditions."""
    renames: dict[str, str] = {}
    if graph.qvar and len(ev.params) == 1 and _label_has_instance_arg(spec, ev.label, graph):
        old = ev.params[0][0]
        if graph.qvar != old and _rename_safe(ev, old, graph.qvar):
            renames[old] = graph.qvar
    params = tuple((renames.get(n, n), s) for n, s in ev.params)
    guard = rename_idents_pred(ev.guard, renames)
    action = rename_idents_subst(ev.action, renames)
    pre = _and_all([_param_typing(params), guard])
    return BOp(f"{ev.label}_act", params, pre, action, None, body_is_data=True)


def _rename_safe(ev: EventDef, old: str, new: str) -> bool:
    names = set()
    for kind, node in walk_pred(ev.guard):
        if kind == "expr":
            for x in walk_exprs(node):
                if isinstance(x, (Ident, Primed)):
                    names.add(x.name)
    return new not in names and not _subst_mentions(ev.action, new)


def _subst_mentions(s: Subst, name: str) -> bool:
    if isinstance(s, Skip):
        return False
    if isinstance(s, Assign):
        return _expr_mentions(s.target, name) or _expr_mentions(s.value, name)
    if isinstance(s, Such):
        return s.var == name or _pred_mentions(s.pred, name)
    if isinstance(s, Parallel):
        return any(_subst_mentions(x, name) for x in s.items)
    if isinstance(s, Select):
        return any(_pred_mentions(g, name) or _subst_mentions(b, name)
                   for g, b in s.branches)
    return False


def _expr_mentions(e: Expr, name: str) -> bool:
    return any(isinstance(x, (Ident, Primed)) and x.name == name for x in walk_exprs(e))


def _pred_mentions(p: Pred, name: str) -> bool:
    for kind, node in walk_pred(p):
        if kind == "expr" and _expr_mentions(node, name):
            return True
        if kind == "pred" and isinstance(node, QuantP) and node.var == name:
            return True
    return False


# --- identifier renaming (capture-checked by callers) ---

def rename_idents_expr(e: Expr, renames: dict[str, str]) -> Expr:
    if not renames:
        return e
    if isinstance(e, Ident):
        return Ident(renames.get(e.name, e.name), e.loc)
    if isinstance(e, Primed):
        return Primed(renames.get(e.name, e.name), e.loc)
    if isinstance(e, PairE):
        return PairE(rename_idents_expr(e.left, renames), rename_idents_expr(e.right, renames))
    if isinstance(e, App):
        return App(rename_idents_expr(e.fn, renames), rename_idents_expr(e.arg, renames))
    if isinstance(e, Dom):
        return Dom(rename_idents_expr(e.arg, renames))
    if isinstance(e, SetLit):
        return SetLit(tuple(rename_idents_expr(x, renames) for x in e.items))
    if isinstance(e, Override):
        return Override(rename_idents_expr(e.left, renames), rename_idents_expr(e.right, renames))
    if isinstance(e, Union):
        return Union(rename_idents_expr(e.left, renames), rename_idents_expr(e.right, renames))
    if isinstance(e, Diff):
        return Diff(rename_idents_expr(e.left, renames), rename_idents_expr(e.right, renames))
    raise TypeError(f"unknown expression {e!r}")


def rename_idents_pred(p: Pred, renames: dict[str, str]) -> Pred:
    if not renames:
        return p
    if isinstance(p, (TrueP, FalseP)):
        return p
    if isinstance(p, Cmp):
        return Cmp(p.op, rename_idents_expr(p.left, renames),
                   rename_idents_expr(p.right, renames))
    if isinstance(p, Not):
        return Not(rename_idents_pred(p.body, renames))
    if isinstance(p, And):
        return And(rename_idents_pred(p.left, renames), rename_idents_pred(p.right, renames))
    if isinstance(p, Or):
        return Or(rename_idents_pred(p.left, renames), rename_idents_pred(p.right, renames))
    if isinstance(p, Implies):
        return Implies(rename_idents_pred(p.left, renames),
                       rename_idents_pred(p.right, renames))
    if isinstance(p, QuantP):
        inner = {k: v for k, v in renames.items() if k != p.var}
        bound = p.bound
        if isinstance(bound, DomBound):
            bound = DomBound(rename_idents_expr(bound.expr, renames))
        return QuantP(p.kind, p.var, bound, rename_idents_pred(p.body, inner))
    raise TypeError(f"unknown predicate {p!r}")


def rename_idents_subst(s: Subst, renames: dict[str, str]) -> Subst:
    if not renames:
        return s
    if isinstance(s, Skip):
        return s
    if isinstance(s, Assign):
        return Assign(rename_idents_expr(s.target, renames),
                      rename_idents_expr(s.value, renames))
    if isinstance(s, Such):
        return Such(renames.get(s.var, s.var), rename_idents_pred(s.pred, renames))
    if isinstance(s, Parallel):
        return Parallel(tuple(rename_idents_subst(x, renames) for x in s.items))
    if isinstance(s, Select):
        return Select(tuple(
            (rename_idents_pred(g, renames), rename_idents_subst(b, renames))
            for g, b in s.branches
        ))
    raise TypeError(f"unknown substitution {s!r}")


def _value_literal(v) -> Expr:
    from .values import Atom, PairV, SetV, value_key

    if isinstance(v, Atom):
        return Ident(v.name)
    if isinstance(v, PairV):
        return PairE(_value_literal(v.left), _value_literal(v.right))
    if isinstance(v, SetV):
        return SetLit(tuple(_value_literal(x) for x in sorted(v.items, key=value_key)))
    raise TypeError(f"not a value: {v!r}")


# --- the enabled-sets backend ---

def translate_enabled_sets(spec: SpecDoc) -> TranslationResult:
    diagnostics: list[Diagnostic] = []
    graph = _instance_graph(spec, diagnostics)
    if graph.qvar is None:
        raise SpecError("the enabled-sets scheme needs a quantified specification")

    by_label: dict[str, list[tuple[int, int]]] = {}
    for src, label, dst in graph.edges:
        by_label.setdefault(label, []).append((src, dst))

    rules: list[EnabledRule] = []
    labels_in_order = [e.label for e in spec.events] + [p.label for p in spec.pures]
    for label in labels_in_order:
        if label not in by_label:
            continue
        is_sync = label in graph.delta or not _label_has_instance_arg(spec, label, graph)
        updates = set()
        for src, dst in by_label[label]:
            out_src = graph.out_labels(src)
            out_dst = graph.out_labels(dst)
            touched = out_src | out_dst
            adds = tuple(sorted(out_dst))
            removes = tuple(sorted(touched - out_dst))
            updates.add((adds, removes))
        if len(updates) > 1:
            diagnostics.append(Diagnostic(
                f"label {label}: transitions disagree on the enabled-set update; "
                "not expressible in the enabled-sets scheme",
            ))
            continue
        adds, removes = next(iter(updates))
        if is_sync:
            diagnostics.append(Diagnostic(
                f"label {label} is synchronised (unparameterised); the "
                "enabled-sets scheme is per-instance, no operation generated",
            ))
            rules.append(EnabledRule(label, None, adds, removes))
        else:
            rules.append(EnabledRule(label, graph.qsort, adds, removes))

    model = EnabledSetsModel(
        sort=graph.qsort,
        rules=tuple(rules),
        initially_enabled=graph.out_labels(graph.initial),
    )

    # machine document
    sets = [(s.name, s.elements) for s in spec.sorts]
    all_labels = [r.label for r in rules]
    variables = [VarDecl(f"{l}_enabled", PowT(graph.qsort)) for l in all_labels]
    variables.extend(spec.variables)
    atoms = spec.sort(graph.qsort).elements
    init_entries = []
    for l in all_labels:
        items = tuple(Ident(a) for a in atoms) if l in model.initially_enabled else ()
        init_entries.append((f"{l}_enabled", SetLit(items)))
    data_eval = Evaluator(spec)
    for v in spec.variables:
        init_entries.append((v.name, _value_literal(data_eval.initial_data().get(v.name))))

    ops: list[BOp] = []
    for rule in rules:
        if rule.param_sort is None:
            continue
        edef = spec.event(rule.label)
        pname = edef.params[0][0] if edef is not None and edef.params else "xx"
        params = ((pname, rule.param_sort),)
        pre = _and_all([
            Cmp(":", Ident(pname), Ident(rule.param_sort)),
            Cmp(":", Ident(pname), Ident(f"{rule.label}_enabled")),
        ])
        items: list[Subst] = []
        for l in rule.adds:
            var = f"{l}_enabled"
            items.append(Assign(Ident(var), Union(Ident(var), SetLit((Ident(pname),)))))
        for l in rule.removes:
            var = f"{l}_enabled"
            items.append(Assign(Ident(var), Diff(Ident(var), SetLit((Ident(pname),)))))
        body = Parallel(tuple(items)) if len(items) > 1 else (items[0] if items else Skip())
        act_call = None
        if edef is not None:
            act_call = (f"{_benchmark_name(rule.label)}_act", (pname,))
        ops.append(BOp(_benchmark_name(rule.label), params, pre, body, act_call))

    for ev in spec.events:
        rule = model.rule(ev.label)
        if rule is None or rule.param_sort is None:
            continue
        pre = _and_all([_param_typing(ev.params), ev.guard])
        ops.append(BOp(f"{_benchmark_name(ev.label)}_act", ev.params, pre,
                       ev.action, None, body_is_data=True))

    machine = BMachineDoc(
        name=f"{spec.name}_bench",
        sets=tuple(sets),
        variables=tuple(variables),
        init=tuple(init_entries),
        operations=tuple(ops),
    )
    return TranslationResult(machine, diagnostics, model)


def _benchmark_name(label: str) -> str:
    return label[0].upper() + label[1:]


def control_lts_of_enabled_sets(model: EnabledSetsModel, spec: SpecDoc) -> Lts:
    """Direct interpretation of the enabled-sets bookkeeping as an LTS whose
    events carry the original (uncapitalized) labels."""
    evaluator = Evaluator(spec)
    atoms = spec.sort(model.sort).elements
    op_rules = [r for r in model.rules if r.param_sort is not None]

    def data_of(enabled: dict[str, frozenset[str]]) -> DataState:
        return DataState({
            f"{r.label}_enabled": SetV(evaluator.atom(a) for a in enabled[r.label])
            for r in model.rules
        })

    init_enabled = {
        r.label: frozenset(atoms) if r.label in model.initially_enabled else frozenset()
        for r in model.rules
    }
    alphabet = tuple(
        Event(r.label, (a,)) for r in sorted(op_rules, key=lambda r: r.label)
        for a in atoms
    )
    lts = Lts(kind="enabled", alphabet=alphabet, spec_name=f"{spec.name}_bench")
    index: dict = {}
    start = tuple(sorted((k, v) for k, v in init_enabled.items()))
    states = [init_enabled]
    index[start] = 0
    lts.states.append(CombinedState(ElemState(), data_of(init_enabled)))
    frontier = [0]
    while frontier:
        i = frontier.pop(0)
        enabled = states[i]
        for ev in alphabet:
            (a,) = ev.args
            if a not in enabled[ev.label]:
                continue
            rule = model.rule(ev.label)
            nxt = dict(enabled)
            for l in rule.adds:
                nxt[l] = nxt[l] | {a}
            for l in rule.removes:
                nxt[l] = nxt[l] - {a}
            key = tuple(sorted((k, v) for k, v in nxt.items()))
            j = index.get(key)
            if j is None:
                j = len(states)
                index[key] = j
                states.append(nxt)
                lts.states.append(CombinedState(ElemState(), data_of(nxt)))
                frontier.append(j)
            lts.transitions.append((i, ev, j))
    return lts


# --- interpretation of a generated machine ---

def machine_spec(doc: BMachineDoc, base: SpecDoc) -> SpecDoc:
    """Synthetic document whose data layer is the machine's control variables."""
    sorts = list(base.sorts)
    for name, elements in doc.sets:
        if base.sort(name) is None:
            sorts.append(SortDecl(name, elements))
    if not any(s.name == "BOOL" for s in sorts):
        sorts.append(BOOL_SORT)
    control_vars = tuple(v for v in doc.variables if _is_control_var(v))
    events = tuple(
        EventDef(op.name, op.params, op.pre, op.body)
        for op in doc.operations
        if op.body is not None and not op.body_is_data
    )
    return SpecDoc(
        name=doc.name, level=base.level, options=frozenset(),
        sorts=tuple(sorts), constants=(), variables=control_vars,
        invariants=(), theorems=(), events=events, pures=(), astd=Elem(),
    )


def _is_control_var(v: VarDecl) -> bool:
    return v.name.startswith("State_") or v.name.startswith("Started_") \
        or v.name.endswith("_enabled")


def machine_lts(doc: BMachineDoc, base: SpecDoc) -> Lts:
    """Explore the generated machine over its control variables.

    Preconditions are treated as guards for exploration purposes; the
    transcribed data operations are rendered output only.
    """
    spec = machine_spec(doc, base)
    evaluator = Evaluator(spec)
    init_entries = {}
    for var, lit in doc.init:
        if spec.variable(var) is not None:
            init_entries[var] = evaluator.eval_expr(lit, DataState({}), None, EMPTY_ENV)
    initial = DataState(init_entries)

    alphabet = []
    from itertools import product as iproduct
    for ev in spec.events:
        domains = [spec.sort(s).elements for _, s in ev.params]
        for combo in iproduct(*domains):
            alphabet.append(Event(ev.label, tuple(combo)))
    alphabet.sort(key=lambda e: e.key())

    lts = Lts(kind="machine", alphabet=tuple(alphabet), spec_name=doc.name)
    index = {initial: 0}
    lts.states.append(CombinedState(ElemState(), initial))
    frontier = [0]
    while frontier:
        i = frontier.pop(0)
        data = lts.states[i].data
        for ev in alphabet:
            edef = spec.event(ev.label)
            if not evaluator.event_enabled(edef, ev.args, data):
                continue
            for post in evaluator.event_fire(edef, ev.args, data):
                j = index.get(post)
                if j is None:
                    j = len(lts.states)
                    index[post] = j
                    lts.states.append(CombinedState(ElemState(), post))
                    frontier.append(j)
                lts.transitions.append((i, ev, j))
    return lts


# --- isomorphism and trace equivalence ---

def lts_isomorphic(a: Lts, b: Lts) -> tuple[bool, str]:
    """Lockstep walk over two deterministic systems; builds the bijection."""
    amap: dict[int, dict] = {}
    for src, ev, dst in a.transitions:
        amap.setdefault(src, {})
        if ev.key() in amap[src] and amap[src][ev.key()] != dst:
            return False, f"left system is nondeterministic at state {src} on {ev}"
        amap[src][ev.key()] = dst
    bmap: dict[int, dict] = {}
    for src, ev, dst in b.transitions:
        bmap.setdefault(src, {})
        if ev.key() in bmap[src] and bmap[src][ev.key()] != dst:
            return False, f"right system is nondeterministic at state {src} on {ev}"
        bmap[src][ev.key()] = dst
    if len(a.states) != len(b.states):
        return False, f"state counts differ: {len(a.states)} vs {len(b.states)}"
    bij = {a.initial: b.initial}
    queue = [(a.initial, b.initial)]
    head = 0
    while head < len(queue):
        i, j = queue[head]
        head += 1
        ai = amap.get(i, {})
        bi = bmap.get(j, {})
        if set(ai) != set(bi):
            only_a = {k for k in ai if k not in bi}
            only_b = {k for k in bi if k not in ai}
            return False, (f"states {i}/{j} enable different events "
                           f"(left-only {sorted(only_a)}, right-only {sorted(only_b)})")
        for key, i2 in ai.items():
            j2 = bi[key]
            if i2 in bij:
                if bij[i2] != j2:
                    return False, f"bijection conflict at left state {i2}"
            else:
                bij[i2] = j2
                queue.append((i2, j2))
    if len(bij) != len(a.states):
        return False, "systems have unreachable states"
    return True, ""


def trace_equivalent(a: Lts, b: Lts) -> tuple[bool, list | None, str]:
    return language_equal(a, b, RefinementConfig())


# --- rendering ---

def render_pred_b(p: Pred) -> str:
    """Classical-B flavored predicate text: bounded quantifiers expand to
    untyped B quantifiers over a typing conjunct."""
    from .render import render_expr, render_pred

    if isinstance(p, QuantP):
        if isinstance(p.bound, SortBound):
            typing = f"{p.var} : {p.bound.sort}"
        else:
            typing = f"{p.var} : dom({render_expr(p.bound.expr)})"
        body = render_pred_b(p.body)
        joiner = "=>" if p.kind == "!" else "&"
        return f"{p.kind}{p.var}.({typing} {joiner} {body})"
    if isinstance(p, And):
        return f"{_paren_b(p.left, And)} & {_paren_b(p.right, And)}"
    if isinstance(p, Or):
        return f"({render_pred_b(p.left)} or {render_pred_b(p.right)})"
    if isinstance(p, Implies):
        return f"({render_pred_b(p.left)} => {render_pred_b(p.right)})"
    if isinstance(p, Not):
        return f"not({render_pred_b(p.body)})"
    from .render import render_pred as _rp
    return _rp(p)


def _paren_b(p: Pred, parent) -> str:
    text = render_pred_b(p)
    if isinstance(p, (Or, Implies)):
        return text if text.startswith("(") else f"({text})"
    return text


def render_subst_b(s: Subst, indent: str) -> str:
    from .render import render_expr

    if isinstance(s, Skip):
        return "skip"
    if isinstance(s, Assign):
        return f"{render_expr(s.target)} := {render_expr(s.value)}"
    if isinstance(s, Such):
        return f"{s.var} : ({render_pred_b(s.pred)})"
    if isinstance(s, Parallel):
        sep = " ||\n" + indent
        return sep.join(render_subst_b(x, indent) for x in s.items)
    if isinstance(s, Select):
        lines = []
        for i, (guard, body) in enumerate(s.branches):
            kw = "SELECT" if i == 0 else "WHEN"
            lines.append(f"{kw} {render_pred_b(guard)} THEN")
            lines.append(f"{indent}  {render_subst_b(body, indent + '  ')}")
        lines.append("END")
        return ("\n" + indent).join(lines)
    raise TypeError(f"unknown substitution {s!r}")


def render_machine(doc: BMachineDoc) -> str:
    from .render import render_expr, render_type

    out = [f"MACHINE {doc.name}"]
    if doc.sets:
        out.append("SETS")
        parts = [
            f"  {name} = {{{', '.join(elements)}}}" for name, elements in doc.sets
        ]
        out.append(";\n".join(parts))
    out.append("VARIABLES")
    out.append(",\n".join(f"  {v.name}" for v in doc.variables))
    out.append("INVARIANT")
    out.append(" &\n".join(f"  {v.name} : {render_type(v.type)}" for v in doc.variables))
    out.append("INITIALISATION")
    out.append(" ||\n".join(
        f"  {var} := {render_expr(lit)}" for var, lit in doc.init
    ))
    out.append("OPERATIONS")
    op_texts = []
    for op in doc.operations:
        params = ", ".join(n for n, _ in op.params)
        head = f"  {op.name}({params}) =" if op.params else f"  {op.name} ="
        lines = [head]
        lines.append(f"    PRE {render_pred_b(op.pre)}")
        body_text = render_subst_b(op.body, "      ") if op.body is not None else "skip"
        if op.act_call is not None:
            call = f"{op.act_call[0]}({', '.join(op.act_call[1])})" \
                if op.act_call[1] else f"{op.act_call[0]}"
            body_text = f"{body_text} ||\n      {call}" if op.body is not None else call
        lines.append(f"    THEN {body_text}")
        lines.append("    END")
        op_texts.append("\n".join(lines))
    out.append(";\n\n".join(op_texts))
    out.append("END")
    return "\n".join(out) + "\n"
