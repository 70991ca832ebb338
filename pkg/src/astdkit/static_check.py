"""Static well-formedness checks over a parsed document.

check_static returns a list of diagnostics; an empty list means the document
satisfies every structural invariant the runtime relies on.
"""

from __future__ import annotations

from .astd import (
    Automaton, AstdNode, Elem, FromSubArrow, Kleene, LocArrow, QuantNode,
    ToSubArrow,
)
from .diagnostics import Diagnostic, Loc
from .document import FnT, PowT, SortT, SpecDoc
from .exprs import (
    App, Assign, Ident, Parallel, Pred, Primed, QuantP, Select, Skip, Subst,
    Such, walk_exprs, DomBound,
)


def check_static(doc: SpecDoc) -> list[Diagnostic]:
    checker = _Checker(doc)
    checker.run()
    return checker.diagnostics


class _Checker:
    def __init__(self, doc: SpecDoc):
        self.doc = doc
        self.diagnostics: list[Diagnostic] = []
        self.atoms: dict[str, str] = {}
        for s in doc.sorts:
            for e in s.elements:
                self.atoms.setdefault(e, s.name)
        self.var_names = {v.name for v in doc.variables}
        self.const_names = {c.name for c in doc.constants}
        self.event_labels = {e.label for e in doc.events}
        self.pure_labels = {p.label for p in doc.pures}

    def err(self, message: str, loc: Loc | None = None):
        self.diagnostics.append(Diagnostic(message, loc))

    def run(self):
        self.check_declarations()
        self.check_events()
        self.check_theorems()
        self.check_invariants()
        self.check_astd(self.doc.astd, {})

    # --- declarations ---

    def check_declarations(self):
        doc = self.doc
        seen: dict[str, str] = {}

        def declare(name: str, what: str, loc):
            if name in seen:
                self.err(f"duplicate declaration of {name!r} ({what} and {seen[name]})", loc)
            else:
                seen[name] = what

        for s in doc.sorts:
            declare(s.name, "sort", s.loc)
            if not s.elements:
                self.err(f"sort {s.name} has no elements", s.loc)
            elems = set()
            for e in s.elements:
                if e in elems:
                    self.err(f"sort {s.name} repeats element {e!r}", s.loc)
                elems.add(e)
                declare(e, f"element of {s.name}", s.loc)
        for c in doc.constants:
            declare(c.name, "constant", c.loc)
            if hasattr(c.value, "sort"):
                if doc.sort(c.value.sort) is None:
                    self.err(f"ORDER over unknown sort {c.value.sort!r}", c.loc)
            else:
                for node in walk_exprs(c.value):
                    if isinstance(node, Primed):
                        self.err(f"primed variable {node.name}' in constant {c.name}", c.loc)
                    elif isinstance(node, Ident):
                        if node.name not in self.atoms and node.name not in self.const_names:
                            self.err(
                                f"constant {c.name} references unknown name {node.name!r}",
                                node.loc or c.loc,
                            )
        for v in doc.variables:
            declare(v.name, "variable", v.loc)
            for sort in _type_sorts(v.type):
                if doc.sort(sort) is None:
                    self.err(f"variable {v.name} uses unknown sort {sort!r}", v.loc)
        for e in doc.events:
            declare(e.label, "event", e.loc)
        for p in doc.pures:
            declare(p.label, "pure event", p.loc)
            for sort in p.param_sorts:
                if doc.sort(sort) is None:
                    self.err(f"pure event {p.label} uses unknown sort {sort!r}", p.loc)

    # --- scope checking of predicates/expressions ---

    def _scoped_pred(self, p: Pred, scope: set[str], allow_primed: bool, where: str, loc):
        from .exprs import And, Cmp, FalseP, Implies, Not, Or, TrueP

        if isinstance(p, (TrueP, FalseP)):
            return
        if isinstance(p, Cmp):
            self._scoped_expr(p.left, scope, allow_primed, where, loc)
            self._scoped_expr(p.right, scope, allow_primed, where, loc)
            return
        if isinstance(p, Not):
            self._scoped_pred(p.body, scope, allow_primed, where, loc)
            return
        if isinstance(p, (And, Or, Implies)):
            self._scoped_pred(p.left, scope, allow_primed, where, loc)
            self._scoped_pred(p.right, scope, allow_primed, where, loc)
            return
        if isinstance(p, QuantP):
            if isinstance(p.bound, DomBound):
                self._scoped_expr(p.bound.expr, scope, allow_primed, where, loc)
            else:
                if self.doc.sort(p.bound.sort) is None:
                    self.err(f"{where}: quantifier over unknown sort {p.bound.sort!r}",
                             p.loc or loc)
            self._scoped_pred(p.body, scope | {p.var}, allow_primed, where, loc)
            return
        self.err(f"{where}: unknown predicate node {type(p).__name__}", loc)

    def _scoped_expr(self, e, scope: set[str], allow_primed: bool, where: str, loc):
        for node in walk_exprs(e):
            if isinstance(node, Primed):
                if not allow_primed:
                    self.err(
                        f"{where}: primed variable {node.name}' outside a two-state context",
                        node.loc or loc,
                    )
                elif node.name not in self.var_names:
                    self.err(f"{where}: primed non-variable {node.name}'", node.loc or loc)
            elif isinstance(node, Ident):
                name = node.name
                known = (
                    name in scope
                    or name in self.var_names
                    or name in self.const_names
                    or name in self.atoms
                )
                if not known:
                    self.err(f"{where}: unknown identifier {name!r}", node.loc or loc)

    def _scoped_subst(self, s: Subst, scope: set[str], where: str, loc):
        if isinstance(s, Skip):
            return
        if isinstance(s, Assign):
            target = s.target
            if isinstance(target, App):
                if not isinstance(target.fn, Ident):
                    self.err(f"{where}: unsupported assignment target", loc)
                    return
                if target.fn.name not in self.var_names:
                    self.err(f"{where}: assignment to non-variable {target.fn.name!r}",
                             target.fn.loc or loc)
                self._scoped_expr(target.arg, scope, False, where, loc)
            elif isinstance(target, Ident):
                if target.name not in self.var_names:
                    self.err(f"{where}: assignment to non-variable {target.name!r}",
                             target.loc or loc)
            else:
                self.err(f"{where}: unsupported assignment target", loc)
            self._scoped_expr(s.value, scope, False, where, loc)
            return
        if isinstance(s, Such):
            if s.var not in self.var_names:
                self.err(f"{where}: `:|` on non-variable {s.var!r}", s.loc or loc)
            self._scoped_pred(s.pred, scope, True, where, s.loc or loc)
            return
        if isinstance(s, Parallel):
            for item in s.items:
                self._scoped_subst(item, scope, where, loc)
            return
        if isinstance(s, Select):
            for guard, body in s.branches:
                self._scoped_pred(guard, scope, False, where, loc)
                self._scoped_subst(body, scope, where, loc)
            return
        self.err(f"{where}: unknown substitution node {type(s).__name__}", loc)

    # --- sections ---

    def check_invariants(self):
        for inv in self.doc.invariants:
            self._scoped_pred(inv.pred, set(), False, f"invariant {inv.name}", inv.loc)

    def check_theorems(self):
        for thm in self.doc.theorems:
            params: set[str] = set()
            ev = self.doc.event(thm.label)
            pu = self.doc.pure(thm.label)
            if ev is not None:
                params = {n for n, _ in ev.params}
            elif pu is None:
                self.err(f"theorem {thm.name} is for unknown event {thm.label!r}", thm.loc)
            self._scoped_pred(thm.pred, params, True, f"theorem {thm.name}", thm.loc)

    def check_events(self):
        for ev in self.doc.events:
            where = f"event {ev.label}"
            pnames = set()
            for name, sort in ev.params:
                if name in pnames:
                    self.err(f"{where}: duplicate parameter {name!r}", ev.loc)
                pnames.add(name)
                if self.doc.sort(sort) is None:
                    self.err(f"{where}: parameter {name} has unknown sort {sort!r}", ev.loc)
                if name in self.var_names or name in self.atoms or name in self.const_names:
                    self.err(f"{where}: parameter {name!r} shadows a declaration", ev.loc)
            self._scoped_pred(ev.guard, pnames, False, f"{where} guard", ev.loc)
            self._scoped_subst(ev.action, pnames, f"{where} action", ev.loc)

    # --- ASTD structure ---

    def check_astd(self, node: AstdNode, quant_vars: dict[str, str]):
        if isinstance(node, Elem):
            return
        if isinstance(node, Kleene):
            self.check_astd(node.body, quant_vars)
            return
        if isinstance(node, QuantNode):
            if self.doc.sort(node.sort) is None:
                self.err(f"quantification over unknown sort {node.sort!r}", node.loc)
            if node.var in quant_vars:
                self.err(f"quantification variable {node.var!r} shadows an outer one", node.loc)
            if (node.var in self.var_names or node.var in self.atoms
                    or node.var in self.const_names):
                self.err(f"quantification variable {node.var!r} shadows a declaration",
                         node.loc)
            if node.kind == "interleave" and node.delta:
                self.err("interleaving must not declare a synchronisation set", node.loc)
            for label in node.delta:
                if label not in self.event_labels and label not in self.pure_labels:
                    self.err(f"synchronisation set names unknown event {label!r}", node.loc)
            if node.sync_pred is not None:
                self._scoped_pred(
                    node.sync_pred, set(quant_vars) | {node.var}, False,
                    "synchronisation predicate", node.loc,
                )
            inner = dict(quant_vars)
            inner[node.var] = node.sort
            self.check_astd(node.body, inner)
            return
        if isinstance(node, Automaton):
            names = node.state_names()
            dup = {n for n in names if names.count(n) > 1}
            for n in sorted(dup):
                self.err(f"automaton {node.name} repeats state {n!r}", node.loc)
            if node.init not in names:
                self.err(f"automaton {node.name}: initial state {node.init!r} not declared",
                         node.loc)
            for f in sorted(node.finals):
                if f not in names:
                    self.err(f"automaton {node.name}: final state {f!r} not declared", node.loc)
            for t in node.transitions:
                self.check_transition(node, t, quant_vars)
            for _, body in node.states:
                self.check_astd(body, quant_vars)
            return
        self.err(f"unknown ASTD node {type(node).__name__}")

    def check_transition(self, node: Automaton, t, quant_vars: dict[str, str]):
        names = node.state_names()
        arrow = t.arrow
        where = f"transition on {t.label} in {node.name}"

        def check_state(n: str):
            if n not in names:
                self.err(f"{where}: state {n!r} not declared", t.loc)
                return False
            return True

        if isinstance(arrow, LocArrow):
            check_state(arrow.src)
            check_state(arrow.dst)
        elif isinstance(arrow, ToSubArrow):
            check_state(arrow.src)
            if check_state(arrow.dst):
                body = node.state_body(arrow.dst)
                if not isinstance(body, Automaton):
                    self.err(f"{where}: target {arrow.dst!r} has no substates", t.loc)
                elif arrow.dst_sub not in body.state_names():
                    self.err(
                        f"{where}: substate {arrow.dst_sub!r} not in automaton "
                        f"{body.name}", t.loc,
                    )
        elif isinstance(arrow, FromSubArrow):
            check_state(arrow.dst)
            if check_state(arrow.src):
                body = node.state_body(arrow.src)
                if not isinstance(body, Automaton):
                    self.err(f"{where}: source {arrow.src!r} has no substates", t.loc)
                elif arrow.src_sub not in body.state_names():
                    self.err(
                        f"{where}: substate {arrow.src_sub!r} not in automaton "
                        f"{body.name}", t.loc,
                    )

        # label and arity
        param_sorts = self.doc.label_param_sorts(t.label)
        if param_sorts is None:
            self.err(
                f"{where}: event {t.label!r} has no definition and is not declared pure",
                t.loc,
            )
        elif len(param_sorts) != len(t.args):
            self.err(
                f"{where}: event {t.label} expects {len(param_sorts)} argument(s), "
                f"pattern has {len(t.args)}", t.loc,
            )
        else:
            for arg, want in zip(t.args, param_sorts):
                if arg in quant_vars:
                    have = quant_vars[arg]
                    if have != want:
                        self.err(
                            f"{where}: pattern variable {arg} ranges over {have}, "
                            f"expected {want}", t.loc,
                        )
                elif arg in self.atoms:
                    if self.atoms[arg] != want:
                        self.err(
                            f"{where}: atom {arg} is a {self.atoms[arg]}, expected {want}",
                            t.loc,
                        )
                else:
                    self.err(
                        f"{where}: pattern argument {arg!r} is neither a quantification "
                        "variable in scope nor a declared atom", t.loc,
                    )
        if t.guard is not None:
            self._scoped_pred(t.guard, set(quant_vars), False, where, t.loc)


def _type_sorts(t) -> tuple[str, ...]:
    if isinstance(t, SortT):
        return (t.sort,)
    if isinstance(t, FnT):
        return (t.src, t.dst)
    if isinstance(t, PowT):
        return (t.sort,)
    return ()
