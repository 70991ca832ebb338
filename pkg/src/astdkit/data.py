"""Finite-domain interpreter for the B-like data layer.

Predicates evaluate classically over ground finite values; nondeterministic
`x :| (P)` is resolved by exhaustive enumeration of the candidate values of
x's declared type. Application outside a map's domain raises EvalError
rather than evaluating to false.
"""

from __future__ import annotations

from itertools import product as iproduct

from .diagnostics import EvalError
from .document import ConstDecl, EventDef, FnT, OrderOf, PowT, SortT, SpecDoc, TypeExpr
from .exprs import (
    And, App, Assign, Cmp, Diff, Dom, DomBound, FalseP, Ident, Implies, Not, Or,
    Override, PairE, Parallel, Pred, Primed, QuantP, Select, SetLit, Skip, SortBound,
    Subst, Such, TrueP, Union, Expr,
)
from .values import Atom, EMPTY_SET, PairV, SetV, Value, map_of, value_key


class Env:
    """Immutable binding environment: parameters and quantifier binders.

    Inner bindings shadow outer ones; looking up an unbound name is an error.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: dict[str, Value] | None = None):
        self._bindings = dict(bindings) if bindings else {}

    def bind(self, name: str, value: Value) -> "Env":
        child = dict(self._bindings)
        child[name] = value
        return Env(child)

    def lookup(self, name: str) -> Value:
        try:
            return self._bindings[name]
        except KeyError:
            raise EvalError(f"unbound identifier {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._bindings

    def names(self) -> set[str]:
        return set(self._bindings)

    def __repr__(self):
        inner = ", ".join(f"{k}={v}" for k, v in sorted(self._bindings.items()))
        return f"Env({inner})"


EMPTY_ENV = Env()


class DataState:
    """Immutable variable valuation; canonical and hashable."""

    __slots__ = ("_items", "_index", "_hash")

    def __init__(self, entries):
        items = tuple(sorted(dict(entries).items()))
        object.__setattr__(self, "_items", items)
        object.__setattr__(self, "_index", dict(items))
        object.__setattr__(self, "_hash", hash(items))

    def get(self, name: str) -> Value:
        try:
            return self._index[name]
        except KeyError:
            raise EvalError(f"unknown variable {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self._index

    def set(self, name: str, value: Value) -> "DataState":
        new = dict(self._index)
        new[name] = value
        return DataState(new)

    def update(self, writes: dict[str, Value]) -> "DataState":
        if not writes:
            return self
        new = dict(self._index)
        new.update(writes)
        return DataState(new)

    def items(self):
        return self._items

    def names(self):
        return tuple(n for n, _ in self._items)

    def __eq__(self, other):
        return isinstance(other, DataState) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "DataState(" + ", ".join(f"{n}={v}" for n, v in self._items) + ")"

    def to_json(self) -> dict:
        return {n: str(v) for n, v in self._items}


class Evaluator:
    """Evaluation of predicates, expressions and substitutions for one document."""

    def __init__(self, spec: SpecDoc):
        self.spec = spec
        self._constants: dict[str, Value] = {}
        self._type_values: dict[TypeExpr, tuple[Value, ...]] = {}
        for c in spec.constants:
            self._constants[c.name] = self._constant_value(c)

    # --- constants and sorts ---

    def _constant_value(self, decl: ConstDecl) -> Value:
        if isinstance(decl.value, OrderOf):
            sort = self.spec.sort(decl.value.sort)
            if sort is None:
                raise EvalError(f"ORDER over unknown sort {decl.value.sort!r}")
            pairs = []
            for i, a in enumerate(sort.elements):
                for b in sort.elements[i + 1:]:
                    pairs.append(PairV(Atom(sort.name, a), Atom(sort.name, b)))
            return SetV(pairs)
        return self.eval_expr(decl.value, DataState({}), None, EMPTY_ENV)

    def atom(self, name: str) -> Atom:
        sort = self.spec.atom_sort(name)
        if sort is None:
            raise EvalError(f"unknown atom {name!r}")
        return Atom(sort, name)

    def sort_atoms(self, sort_name: str) -> tuple[Atom, ...]:
        sort = self.spec.sort(sort_name)
        if sort is None:
            raise EvalError(f"unknown sort {sort_name!r}")
        return tuple(Atom(sort.name, e) for e in sort.elements)

    # --- type enumeration (the candidate space of `:|`) ---

    def enumerate_type(self, t: TypeExpr) -> tuple[Value, ...]:
        if t in self._type_values:
            return self._type_values[t]
        if isinstance(t, SortT):
            vals: tuple[Value, ...] = self.sort_atoms(t.sort)
        elif isinstance(t, PowT):
            atoms = self.sort_atoms(t.sort)
            vals = tuple(
                SetV(sel)
                for sel in _subsets(atoms)
            )
        elif isinstance(t, FnT):
            src = self.sort_atoms(t.src)
            dst = self.sort_atoms(t.dst)
            choices = tuple(dst) if t.total else (None, *dst)
            vals = tuple(
                map_of((a, pick[i]) for i, a in enumerate(src) if pick[i] is not None)
                for pick in iproduct(choices, repeat=len(src))
                for _ in (0,)
            )
            # deduplicate while keeping deterministic order
            seen = set()
            uniq = []
            for v in vals:
                if v not in seen:
                    seen.add(v)
                    uniq.append(v)
            vals = tuple(uniq)
        else:
            raise EvalError(f"cannot enumerate type {t!r}")
        vals = tuple(sorted(vals, key=value_key))
        self._type_values[t] = vals
        return vals

    def value_in_type(self, v: Value, t: TypeExpr) -> bool:
        if isinstance(t, SortT):
            return isinstance(v, Atom) and v.sort == t.sort
        if isinstance(t, PowT):
            return isinstance(v, SetV) and all(
                isinstance(x, Atom) and x.sort == t.sort for x in v
            )
        if isinstance(t, FnT):
            if not isinstance(v, SetV):
                return False
            try:
                pairs = v.pairs()
            except EvalError:
                return False
            if not v.is_functional():
                return False
            ok = all(
                isinstance(p.left, Atom) and p.left.sort == t.src
                and isinstance(p.right, Atom) and p.right.sort == t.dst
                for p in pairs
            )
            if not ok:
                return False
            if t.total:
                return len(pairs) == len(self.sort_atoms(t.src))
            return True
        return False

    # --- expression evaluation ---

    def eval_expr(self, e: Expr, pre: DataState, post: DataState | None, env: Env) -> Value:
        if isinstance(e, Ident):
            name = e.name
            if name in env:
                return env.lookup(name)
            if pre.has(name):
                return pre.get(name)
            if name in self._constants:
                return self._constants[name]
            sort = self.spec.atom_sort(name)
            if sort is not None:
                return Atom(sort, name)
            if self.spec.sort(name) is not None:
                return SetV(self.sort_atoms(name))
            raise EvalError(f"unbound identifier {name!r}")
        if isinstance(e, Primed):
            if post is None:
                raise EvalError(f"primed variable {e.name}' outside a two-state context")
            return post.get(e.name)
        if isinstance(e, PairE):
            return PairV(
                self.eval_expr(e.left, pre, post, env),
                self.eval_expr(e.right, pre, post, env),
            )
        if isinstance(e, App):
            fn = self.eval_expr(e.fn, pre, post, env)
            arg = self.eval_expr(e.arg, pre, post, env)
            if not isinstance(fn, SetV):
                raise EvalError(f"application of non-map value {fn}")
            return fn.apply(arg, context=_expr_context(e))
        if isinstance(e, Dom):
            v = self.eval_expr(e.arg, pre, post, env)
            if not isinstance(v, SetV):
                raise EvalError(f"dom of non-map value {v}")
            return v.domain()
        if isinstance(e, SetLit):
            return SetV(self.eval_expr(x, pre, post, env) for x in e.items)
        if isinstance(e, Override):
            left = self.eval_expr(e.left, pre, post, env)
            right = self.eval_expr(e.right, pre, post, env)
            if not isinstance(left, SetV) or not isinstance(right, SetV):
                raise EvalError("override requires map operands")
            return left.override(right)
        if isinstance(e, Union):
            left = self.eval_expr(e.left, pre, post, env)
            right = self.eval_expr(e.right, pre, post, env)
            if not isinstance(left, SetV) or not isinstance(right, SetV):
                raise EvalError("union requires set operands")
            return SetV(left.items | right.items)
        if isinstance(e, Diff):
            left = self.eval_expr(e.left, pre, post, env)
            right = self.eval_expr(e.right, pre, post, env)
            if not isinstance(left, SetV) or not isinstance(right, SetV):
                raise EvalError("difference requires set operands")
            return SetV(left.items - right.items)
        raise EvalError(f"unknown expression node {e!r}")

    # --- predicate evaluation ---

    def eval_pred(self, p: Pred, pre: DataState, post: DataState | None, env: Env) -> bool:
        if isinstance(p, TrueP):
            return True
        if isinstance(p, FalseP):
            return False
        if isinstance(p, Cmp):
            left = self.eval_expr(p.left, pre, post, env)
            right = self.eval_expr(p.right, pre, post, env)
            if p.op == "=":
                return left == right
            if p.op == "/=":
                return left != right
            if p.op in (":", "/:"):
                if not isinstance(right, SetV):
                    raise EvalError(f"membership in non-set value {right}")
                result = left in right
                return result if p.op == ":" else not result
            raise EvalError(f"unknown comparison {p.op!r}")
        if isinstance(p, Not):
            return not self.eval_pred(p.body, pre, post, env)
        if isinstance(p, And):
            return self.eval_pred(p.left, pre, post, env) and self.eval_pred(p.right, pre, post, env)
        if isinstance(p, Or):
            return self.eval_pred(p.left, pre, post, env) or self.eval_pred(p.right, pre, post, env)
        if isinstance(p, Implies):
            return (not self.eval_pred(p.left, pre, post, env)) or self.eval_pred(p.right, pre, post, env)
        if isinstance(p, QuantP):
            domain = self._bound_values(p.bound, pre, post, env)
            if p.kind == "!":
                return all(
                    self.eval_pred(p.body, pre, post, env.bind(p.var, v)) for v in domain
                )
            if p.kind == "#":
                return any(
                    self.eval_pred(p.body, pre, post, env.bind(p.var, v)) for v in domain
                )
            raise EvalError(f"unknown quantifier {p.kind!r}")
        raise EvalError(f"unknown predicate node {p!r}")

    def _bound_values(self, bound, pre, post, env) -> tuple[Value, ...]:
        if isinstance(bound, SortBound):
            return self.sort_atoms(bound.sort)
        if isinstance(bound, DomBound):
            v = self.eval_expr(bound.expr, pre, post, env)
            if not isinstance(v, SetV):
                raise EvalError("quantifier bound dom(e) on non-map value")
            return tuple(sorted(v.domain().items, key=value_key))
        raise EvalError(f"unknown quantifier bound {bound!r}")

    # --- substitutions ---

    def subst_writes(self, s: Subst, pre: DataState, env: Env) -> list[dict[str, Value]]:
        """All write-maps a substitution may produce from `pre`.

        Empty list = infeasible (a `:|` with no solution, or a SELECT with no
        enabled branch).
        """
        if isinstance(s, Skip):
            return [{}]
        if isinstance(s, Assign):
            if isinstance(s.target, Ident):
                var = s.target.name
                self._require_variable(var)
                return [{var: self.eval_expr(s.value, pre, None, env)}]
            if isinstance(s.target, App) and isinstance(s.target.fn, Ident):
                var = s.target.fn.name
                self._require_variable(var)
                current = pre.get(var)
                if not isinstance(current, SetV):
                    raise EvalError(f"pointwise assignment into non-map {var}")
                key = self.eval_expr(s.target.arg, pre, None, env)
                val = self.eval_expr(s.value, pre, None, env)
                return [{var: current.override(map_of([(key, val)]))}]
            raise EvalError(f"unsupported assignment target {s.target!r}")
        if isinstance(s, Such):
            var = s.var
            decl = self.spec.variable(var)
            if decl is None:
                raise EvalError(f"`:|` on undeclared variable {var!r}")
            out = []
            for candidate in self.enumerate_type(decl.type):
                post = pre.set(var, candidate)
                if self.eval_pred(s.pred, pre, post, env):
                    out.append({var: candidate})
            return out
        if isinstance(s, Parallel):
            combined: list[dict[str, Value]] = [{}]
            for item in s.items:
                branches = self.subst_writes(item, pre, env)
                if not branches:
                    return []
                merged = []
                for acc in combined:
                    for wr in branches:
                        conflict = set(acc) & set(wr)
                        if conflict:
                            raise EvalError(
                                f"parallel substitution writes variable(s) twice: {sorted(conflict)}"
                            )
                        m = dict(acc)
                        m.update(wr)
                        merged.append(m)
                combined = merged
            return combined
        if isinstance(s, Select):
            out = []
            for guard, body in s.branches:
                if self.eval_pred(guard, pre, None, env):
                    out.extend(self.subst_writes(body, pre, env))
            return out
        raise EvalError(f"unknown substitution node {s!r}")

    def apply_subst(self, s: Subst, pre: DataState, env: Env) -> list[DataState]:
        """All post-states, deduplicated, in canonical order."""
        seen = set()
        out = []
        for writes in self.subst_writes(s, pre, env):
            post = pre.update(writes)
            if post not in seen:
                seen.add(post)
                out.append(post)
        out.sort(key=lambda d: tuple((n, value_key(v)) for n, v in d.items()))
        return out

    def _require_variable(self, name: str):
        if self.spec.variable(name) is None:
            raise EvalError(f"assignment to undeclared variable {name!r}")

    # --- events ---

    def bind_params(self, event: EventDef, args: tuple[str, ...], env: Env = EMPTY_ENV) -> Env:
        if len(args) != len(event.params):
            raise EvalError(
                f"event {event.label} expects {len(event.params)} argument(s), got {len(args)}"
            )
        bound = env
        for (name, sort), arg in zip(event.params, args):
            atom = self.atom(arg)
            if atom.sort != sort:
                raise EvalError(
                    f"argument {arg!r} of {event.label} is a {atom.sort}, expected {sort}"
                )
            bound = bound.bind(name, atom)
        return bound

    def event_enabled(self, event: EventDef, args: tuple[str, ...], pre: DataState) -> bool:
        env = self.bind_params(event, args)
        return self.eval_pred(event.guard, pre, None, env)

    def event_fire(self, event: EventDef, args: tuple[str, ...], pre: DataState) -> list[DataState]:
        env = self.bind_params(event, args)
        if not self.eval_pred(event.guard, pre, None, env):
            raise EvalError(f"event {event.label}({', '.join(args)}) fired while disabled")
        return self.apply_subst(event.action, pre, env)

    # --- initial data state ---

    def initial_data(self) -> DataState:
        """All declared variables start empty (maps/sets) or at the first atom."""
        entries = {}
        for v in self.spec.variables:
            if isinstance(v.type, SortT):
                entries[v.name] = self.sort_atoms(v.type.sort)[0]
            elif isinstance(v.type, FnT) and v.type.total:
                dst0 = self.sort_atoms(v.type.dst)[0]
                entries[v.name] = map_of((a, dst0) for a in self.sort_atoms(v.type.src))
            else:
                entries[v.name] = EMPTY_SET
        return DataState(entries)

    def check_typing(self, state: DataState) -> list[str]:
        """Names of variables whose value violates its declared type."""
        bad = []
        for v in self.spec.variables:
            if not self.value_in_type(state.get(v.name), v.type):
                bad.append(v.name)
        return bad


def _subsets(atoms):
    n = len(atoms)
    for mask in range(1 << n):
        yield tuple(atoms[i] for i in range(n) if mask >> i & 1)


def _expr_context(e) -> str:
    if isinstance(e, App) and isinstance(e.fn, (Ident, Primed)):
        name = e.fn.name + ("'" if isinstance(e.fn, Primed) else "")
        return f"applying {name}"
    return "application"
