"""Canonical text rendering of documents, predicates and substitutions.

parse(render_spec(parse(s))) yields a tree equal to parse(s); byte identity
with the original source is not a goal (comments and layout are not kept).
"""

from __future__ import annotations

from .astd import (
    Automaton, AstdNode, Elem, FromSubArrow, Kleene, LocArrow, QuantNode,
    ToSubArrow, Transition,
)
from .document import ConstDecl, FnT, OrderOf, PowT, SortT, SpecDoc, TypeExpr
from .exprs import (
    And, App, Assign, Cmp, Diff, Dom, DomBound, Expr, FalseP, Ident, Implies,
    Not, Or, Override, PairE, Parallel, Pred, Primed, QuantP, Select, SetLit,
    Skip, SortBound, Subst, Such, TrueP, Union,
)

_EXPR_PREC = {Union: 1, Diff: 1, Override: 2, PairE: 3}
_PRED_PREC = {Implies: 1, Or: 2, And: 3}


def render_expr(e: Expr, parent_prec: int = 0) -> str:
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, Primed):
        return e.name + "'"
    if isinstance(e, App):
        return f"{render_expr(e.fn, 4)}({render_expr(e.arg)})"
    if isinstance(e, Dom):
        return f"dom({render_expr(e.arg)})"
    if isinstance(e, SetLit):
        if not e.items:
            return "{}"
        return "{ " + ", ".join(render_expr(x) for x in e.items) + " }"
    if isinstance(e, (Union, Diff, Override, PairE)):
        prec = _EXPR_PREC[type(e)]
        op = {"Union": "\\/", "Diff": "-", "Override": "<+", "PairE": "|->"}[type(e).__name__]
        text = f"{render_expr(e.left, prec)} {op} {render_expr(e.right, prec + 1)}"
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"unknown expression {e!r}")


def render_pred(p: Pred, parent_prec: int = 0) -> str:
    if isinstance(p, TrueP):
        return "true"
    if isinstance(p, FalseP):
        return "false"
    if isinstance(p, Cmp):
        return f"{render_expr(p.left)} {p.op} {render_expr(p.right)}"
    if isinstance(p, Not):
        return f"not {render_pred(p.body, 4)}"
    if isinstance(p, (And, Or, Implies)):
        prec = _PRED_PREC[type(p)]
        op = {"And": "&", "Or": "or", "Implies": "=>"}[type(p).__name__]
        if isinstance(p, Implies):
            text = f"{render_pred(p.left, prec + 1)} {op} {render_pred(p.right, prec)}"
        else:
            text = f"{render_pred(p.left, prec)} {op} {render_pred(p.right, prec + 1)}"
        return f"({text})" if prec < parent_prec else text
    if isinstance(p, QuantP):
        if isinstance(p.bound, SortBound):
            bound = p.bound.sort
        else:
            bound = f"dom({render_expr(p.bound.expr)})"
        return f"{p.kind}{p.var}:{bound}.({render_pred(p.body)})"
    raise TypeError(f"unknown predicate {p!r}")


def render_subst(s: Subst, indent: str = "") -> str:
    if isinstance(s, Skip):
        return "skip"
    if isinstance(s, Assign):
        return f"{render_expr(s.target)} := {render_expr(s.value)}"
    if isinstance(s, Such):
        return f"{s.var} :| ({render_pred(s.pred)})"
    if isinstance(s, Parallel):
        inner = indent + "  "
        joined = ("\n" + inner + "|| ").join(render_subst(x, inner) for x in s.items)
        return joined
    if isinstance(s, Select):
        inner = indent + "  "
        lines = []
        for i, (guard, body) in enumerate(s.branches):
            kw = "SELECT" if i == 0 else "WHEN"
            lines.append(f"{kw} {render_pred(guard)} THEN {render_subst(body, inner)}")
        return ("\n" + inner).join(lines) + f"\n{inner}END"
    raise TypeError(f"unknown substitution {s!r}")


def render_type(t: TypeExpr) -> str:
    if isinstance(t, SortT):
        return t.sort
    if isinstance(t, FnT):
        return f"{t.src} {'-->' if t.total else '+->'} {t.dst}"
    if isinstance(t, PowT):
        return f"POW({t.sort})"
    raise TypeError(f"unknown type {t!r}")


def _render_const(c: ConstDecl) -> str:
    if isinstance(c.value, OrderOf):
        return f"{c.name} = ORDER({c.value.sort})"
    return f"{c.name} = {render_expr(c.value)}"


def render_astd(node: AstdNode, indent: str = "  ") -> str:
    inner = indent + "  "
    if isinstance(node, Elem):
        return indent + "ELEM"
    if isinstance(node, Kleene):
        return f"{indent}KLEENE\n{render_astd(node.body, inner)}\n{indent}END"
    if isinstance(node, QuantNode):
        head = f"{indent}{node.kind.upper()} {node.var} : {node.sort}"
        if node.kind in ("sync", "weaksync"):
            head += " SYNCSET { " + ", ".join(sorted(node.delta)) + " }"
        if node.kind == "weaksync" and node.sync_pred is not None:
            head += f" WHERE {render_pred(node.sync_pred)}"
        return f"{head}\n{render_astd(node.body, inner)}\n{indent}END"
    if isinstance(node, Automaton):
        lines = [f"{indent}AUTOMATON {node.name}"]
        for name, body in node.states:
            if isinstance(body, Elem):
                lines.append(f"{inner}STATE {name}")
            else:
                lines.append(f"{inner}STATE {name} =\n{render_astd(body, inner + '  ')}")
        lines.append(f"{inner}INIT {node.init}")
        if node.finals:
            lines.append(f"{inner}FINAL " + ", ".join(sorted(node.finals)))
        for t in node.transitions:
            lines.append(inner + _render_transition(t))
        lines.append(f"{indent}END")
        return "\n".join(lines)
    raise TypeError(f"unknown node {node!r}")


def _render_transition(t: Transition) -> str:
    a = t.arrow
    if isinstance(a, LocArrow):
        arrow = f"{a.src} -> {a.dst}"
    elif isinstance(a, ToSubArrow):
        arrow = f"{a.src} -> {a.dst} AT {a.dst_sub}"
    elif isinstance(a, FromSubArrow):
        arrow = f"{a.src} FROM {a.src_sub} -> {a.dst}"
    else:
        raise TypeError(f"unknown arrow {a!r}")
    text = f"TRANS {arrow} ON {t.label}({', '.join(t.args)})"
    if t.guard is not None:
        text += f" WHEN {render_pred(t.guard)}"
    if t.final:
        text += " FINAL"
    return text


def render_spec(doc: SpecDoc) -> str:
    out = [f"SPEC {doc.name} LEVEL {doc.level}"]
    if doc.options:
        out.append("OPTIONS " + " ".join(sorted(doc.options)))
    if doc.sorts:
        out.append("SORTS")
        for s in doc.sorts:
            out.append(f"  {s.name} = {{ " + ", ".join(s.elements) + " }")
    if doc.constants:
        out.append("CONSTANTS")
        for c in doc.constants:
            out.append("  " + _render_const(c))
    if doc.variables:
        out.append("VARIABLES")
        for v in doc.variables:
            out.append(f"  {v.name} : {render_type(v.type)}")
    if doc.invariants:
        out.append("INVARIANTS")
        for inv in doc.invariants:
            out.append(f"  INVARIANT {inv.name}: {render_pred(inv.pred)}")
    if doc.theorems:
        out.append("THEOREMS")
        for thm in doc.theorems:
            out.append(f"  THEOREM {thm.name} FOR {thm.label}: {render_pred(thm.pred)}")
    if doc.events or doc.pures:
        out.append("EVENTS")
        for ev in doc.events:
            params = ", ".join(f"{n} : {s}" for n, s in ev.params)
            out.append(f"  EVENT {ev.label}({params})")
            if not isinstance(ev.guard, TrueP):
                out.append(f"    WHEN {render_pred(ev.guard)}")
            out.append(f"    THEN {render_subst(ev.action, '    ')}")
            out.append("  END")
        for pu in doc.pures:
            out.append(f"  PURE {pu.label}({', '.join(pu.param_sorts)})")
    out.append("ASTD")
    out.append(render_astd(doc.astd))
    return "\n".join(out) + "\n"
