"""AST node types for predicates, expressions and generalized substitutions.

Source locations are carried for diagnostics but excluded from equality so
that round-tripping a document through the renderer yields an equal tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Loc


def _loc_field():
    return field(default=None, compare=False, repr=False)


# --- expressions ---

@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Ident(Expr):
    name: str
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Primed(Expr):
    """Post-state variable x'; legal only in `:|` bodies and theorems."""

    name: str
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class PairE(Expr):
    left: Expr
    right: Expr
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class App(Expr):
    """Function application f(e) on a finite map value."""

    fn: Expr
    arg: Expr
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Dom(Expr):
    arg: Expr
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class SetLit(Expr):
    items: tuple[Expr, ...]
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Override(Expr):
    """f <+ g : relational override, right side wins."""

    left: Expr
    right: Expr
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Union(Expr):
    left: Expr
    right: Expr
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Diff(Expr):
    left: Expr
    right: Expr
    loc: Loc | None = _loc_field()


# --- predicates ---

@dataclass(frozen=True)
class Pred:
    pass


@dataclass(frozen=True)
class TrueP(Pred):
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class FalseP(Pred):
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Cmp(Pred):
    """op is one of '=', '/=', ':', '/:'."""

    op: str
    left: Expr
    right: Expr
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Not(Pred):
    body: Pred
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class And(Pred):
    left: Pred
    right: Pred
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Or(Pred):
    left: Pred
    right: Pred
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Implies(Pred):
    left: Pred
    right: Pred
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class SortBound:
    """Quantifier range: all elements of a declared sort."""

    sort: str


@dataclass(frozen=True)
class DomBound:
    """Quantifier range: dom(e) for a finite map expression e."""

    expr: Expr


@dataclass(frozen=True)
class QuantP(Pred):
    """kind is '!' (forall) or '#' (exists); bound is finite by construction."""

    kind: str
    var: str
    bound: SortBound | DomBound
    body: Pred
    loc: Loc | None = _loc_field()


# --- generalized substitutions ---

@dataclass(frozen=True)
class Subst:
    pass


@dataclass(frozen=True)
class Skip(Subst):
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Assign(Subst):
    """x := e  or  f(e1) := e2 (pointwise override of one map entry)."""

    target: Expr            # Ident or App(Ident, arg)
    value: Expr
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Such(Subst):
    """x :| (P) — choose any post-value for x satisfying the two-state P."""

    var: str
    pred: Pred
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Parallel(Subst):
    items: tuple[Subst, ...]
    loc: Loc | None = _loc_field()


@dataclass(frozen=True)
class Select(Subst):
    """Guarded alternatives; the result is the union over enabled branches."""

    branches: tuple[tuple[Pred, Subst], ...]
    loc: Loc | None = _loc_field()


# --- traversal helpers ---

def expr_children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Ident, Primed)):
        return ()
    if isinstance(e, PairE):
        return (e.left, e.right)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, Dom):
        return (e.arg,)
    if isinstance(e, SetLit):
        return e.items
    if isinstance(e, (Override, Union, Diff)):
        return (e.left, e.right)
    raise TypeError(f"unknown expression node {e!r}")


def pred_parts(p: Pred) -> tuple[tuple[Pred, ...], tuple[Expr, ...]]:
    """Immediate sub-predicates and sub-expressions of a predicate node."""
    if isinstance(p, (TrueP, FalseP)):
        return (), ()
    if isinstance(p, Cmp):
        return (), (p.left, p.right)
    if isinstance(p, Not):
        return (p.body,), ()
    if isinstance(p, (And, Or, Implies)):
        return (p.left, p.right), ()
    if isinstance(p, QuantP):
        exprs = (p.bound.expr,) if isinstance(p.bound, DomBound) else ()
        return (p.body,), exprs
    raise TypeError(f"unknown predicate node {p!r}")


def walk_exprs(root: Expr):
    stack = [root]
    while stack:
        e = stack.pop()
        yield e
        stack.extend(expr_children(e))


def walk_pred(root: Pred):
    """Yield ('pred', node) and ('expr', node) pairs over a predicate tree."""
    stack: list[tuple[str, object]] = [("pred", root)]
    while stack:
        kind, node = stack.pop()
        yield kind, node
        if kind == "pred":
            preds, exprs = pred_parts(node)
            stack.extend(("pred", q) for q in preds)
            stack.extend(("expr", e) for e in exprs)
        else:
            stack.extend(("expr", c) for c in expr_children(node))


def subst_parts(s: Subst) -> tuple[tuple[Subst, ...], tuple[Pred, ...], tuple[Expr, ...]]:
    if isinstance(s, Skip):
        return (), (), ()
    if isinstance(s, Assign):
        return (), (), (s.target, s.value)
    if isinstance(s, Such):
        return (), (s.pred,), ()
    if isinstance(s, Parallel):
        return s.items, (), ()
    if isinstance(s, Select):
        return tuple(b for _, b in s.branches), tuple(g for g, _ in s.branches), ()
    raise TypeError(f"unknown substitution node {s!r}")


def free_idents(pred_or_expr) -> set[str]:
    """All identifier names (unprimed and primed) occurring in a tree."""
    names: set[str] = set()

    def visit_expr(e: Expr):
        for node in walk_exprs(e):
            if isinstance(node, (Ident, Primed)):
                names.add(node.name)

    if isinstance(pred_or_expr, Expr):
        visit_expr(pred_or_expr)
    else:
        for kind, node in walk_pred(pred_or_expr):
            if kind == "expr":
                visit_expr(node)
            elif isinstance(node, QuantP):
                pass  # binder names stay; scope handling is the checker's job
    return names
