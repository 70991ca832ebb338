"""Recursive-descent parser for `.astd` specification documents.

The parser is total: any input yields either a SpecDoc or a ParseError
carrying located diagnostics, never an unhandled crash. The grammar is
documented in docs/grammar.md; corpus files are the normative examples.
"""

from __future__ import annotations

from .astd import (
    Automaton, AstdNode, Elem, FromSubArrow, Kleene, LocArrow, QuantNode,
    ToSubArrow, Transition,
)
from .diagnostics import Diagnostic, Loc, ParseError
from .document import (
    ConstDecl, EventDef, EventTheorem, FnT, NamedPred, OrderOf, PowT, PureDecl,
    SortDecl, SortT, SpecDoc, TypeExpr, VarDecl,
)
from .exprs import (
    And, App, Assign, Cmp, Diff, Dom, DomBound, Expr, FalseP, Ident, Implies,
    Not, Or, Override, PairE, Parallel, Pred, Primed, QuantP, Select, SetLit,
    Skip, SortBound, Subst, Such, TrueP, Union,
)
from .lexer import Token, tokenize

MAX_DEPTH = 200


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.depth = 0

    # --- token plumbing ---

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        if kind == "KEYWORD":
            return tok.kind == "KEYWORD" and (text is None or tok.text == text)
        return tok.kind == kind

    def at_kw(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "KEYWORD" and tok.text in words

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        ok = tok.kind == kind and (text is None or tok.text == text)
        if not ok:
            want = text or kind
            self.fail(f"expected {want!r}, found {tok.text or tok.kind!r}", tok.loc)
        return self.take()

    def expect_kw(self, word: str) -> Token:
        tok = self.peek()
        if not (tok.kind == "KEYWORD" and tok.text == word):
            self.fail(f"expected {word!r}, found {tok.text or tok.kind!r}", tok.loc)
        return self.take()

    def fail(self, message: str, loc: Loc | None = None):
        raise ParseError([Diagnostic(message, loc or self.peek().loc)])

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail("nesting too deep")

    def leave(self):
        self.depth -= 1

    # --- names ---

    def name(self, what: str = "name") -> tuple[str, Loc]:
        tok = self.peek()
        if tok.kind in ("IDENT", "DOTTED"):
            self.take()
            return tok.text, tok.loc
        self.fail(f"expected {what}, found {tok.text or tok.kind!r}", tok.loc)

    def ident(self, what: str = "identifier") -> tuple[str, Loc]:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.take()
            return tok.text, tok.loc
        self.fail(f"expected {what}, found {tok.text or tok.kind!r}", tok.loc)

    # --- document ---

    def document(self) -> SpecDoc:
        self.expect_kw("SPEC")
        name, _ = self.ident("specification name")
        level = 0
        if self.at_kw("LEVEL"):
            self.take()
            tok = self.expect("NUM")
            level = int(tok.text)
        options: list[str] = []
        if self.at_kw("OPTIONS"):
            self.take()
            while self.at("IDENT"):
                options.append(self.take().text)
        sorts: list[SortDecl] = []
        constants: list[ConstDecl] = []
        variables: list[VarDecl] = []
        invariants: list[NamedPred] = []
        theorems: list[EventTheorem] = []
        events: list[EventDef] = []
        pures: list[PureDecl] = []

        if self.at_kw("SORTS"):
            self.take()
            while self.at("IDENT"):
                sorts.append(self.sort_decl())
        if self.at_kw("CONSTANTS"):
            self.take()
            while self.at("IDENT"):
                constants.append(self.const_decl())
        if self.at_kw("VARIABLES"):
            self.take()
            while self.at("IDENT"):
                variables.append(self.var_decl())
        if self.at_kw("INVARIANTS"):
            self.take()
            while self.at_kw("INVARIANT"):
                invariants.append(self.invariant_decl())
        if self.at_kw("THEOREMS"):
            self.take()
            while self.at_kw("THEOREM"):
                theorems.append(self.theorem_decl())
        if self.at_kw("EVENTS"):
            self.take()
            while self.at_kw("EVENT", "PURE"):
                if self.at_kw("EVENT"):
                    events.append(self.event_decl())
                else:
                    pures.append(self.pure_decl())
        self.expect_kw("ASTD")
        astd = self.astd_node()
        self.expect("EOF")
        return SpecDoc(
            name=name,
            level=level,
            options=frozenset(options),
            sorts=tuple(sorts),
            constants=tuple(constants),
            variables=tuple(variables),
            invariants=tuple(invariants),
            theorems=tuple(theorems),
            events=tuple(events),
            pures=tuple(pures),
            astd=astd,
        )

    def sort_decl(self) -> SortDecl:
        name, loc = self.ident("sort name")
        self.expect("=")
        self.expect("{")
        elements = []
        if not self.at("}"):
            elements.append(self.ident("sort element")[0])
            while self.at(","):
                self.take()
                elements.append(self.ident("sort element")[0])
        self.expect("}")
        return SortDecl(name, tuple(elements), loc)

    def const_decl(self) -> ConstDecl:
        name, loc = self.ident("constant name")
        self.expect("=")
        if self.at_kw("ORDER"):
            self.take()
            self.expect("(")
            sort, _ = self.ident("sort name")
            self.expect(")")
            return ConstDecl(name, OrderOf(sort), loc)
        return ConstDecl(name, self.expr(), loc)

    def var_decl(self) -> VarDecl:
        name, loc = self.ident("variable name")
        self.expect(":")
        return VarDecl(name, self.type_expr(), loc)

    def type_expr(self) -> TypeExpr:
        if self.at_kw("POW"):
            self.take()
            self.expect("(")
            sort, _ = self.ident("sort name")
            self.expect(")")
            return PowT(sort)
        src, _ = self.ident("sort name")
        # '+->' lexes as '+'? no: '+->' is not a symbol; check two-token form
        tok = self.peek()
        if tok.kind == "IDENT" or tok.kind == "KEYWORD" or tok.kind == "EOF":
            return SortT(src)
        if tok.kind in ("+->", "-->"):
            self.take()
            dst, _ = self.ident("sort name")
            return FnT(src, dst, total=(tok.kind == "-->"))
        return SortT(src)

    def invariant_decl(self) -> NamedPred:
        self.expect_kw("INVARIANT")
        name, loc = self.ident("invariant name")
        self.expect(":")
        return NamedPred(name, self.pred(), loc)

    def theorem_decl(self) -> EventTheorem:
        self.expect_kw("THEOREM")
        name, loc = self.ident("theorem name")
        self.expect_kw("FOR")
        label, _ = self.ident("event label")
        self.expect(":")
        return EventTheorem(name, label, self.pred(), loc)

    def event_decl(self) -> EventDef:
        self.expect_kw("EVENT")
        label, loc = self.ident("event label")
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.take()
                params.append(self.param())
        self.expect(")")
        guard: Pred = TrueP()
        if self.at_kw("WHEN"):
            self.take()
            guard = self.pred()
        self.expect_kw("THEN")
        action = self.subst()
        self.expect_kw("END")
        return EventDef(label, tuple(params), guard, action, loc)

    def param(self) -> tuple[str, str]:
        name, _ = self.ident("parameter name")
        self.expect(":")
        sort, _ = self.ident("sort name")
        return (name, sort)

    def pure_decl(self) -> PureDecl:
        self.expect_kw("PURE")
        label, loc = self.ident("event label")
        self.expect("(")
        sorts = []
        if not self.at(")"):
            sorts.append(self.ident("sort name")[0])
            while self.at(","):
                self.take()
                sorts.append(self.ident("sort name")[0])
        self.expect(")")
        return PureDecl(label, tuple(sorts), loc)

    # --- ASTD structure ---

    def astd_node(self) -> AstdNode:
        self.enter()
        try:
            if self.at_kw("ELEM"):
                self.take()
                return Elem()
            if self.at_kw("AUTOMATON"):
                return self.automaton()
            if self.at_kw("KLEENE"):
                self.take()
                body = self.astd_node()
                self.expect_kw("END")
                return Kleene(body)
            if self.at_kw("INTERLEAVE", "SYNC", "WEAKSYNC"):
                return self.quant_node()
            self.fail(
                "expected an ASTD operator (AUTOMATON, KLEENE, INTERLEAVE, "
                "SYNC, WEAKSYNC, ELEM)"
            )
        finally:
            self.leave()

    def automaton(self) -> Automaton:
        loc = self.expect_kw("AUTOMATON").loc
        name = self.name("automaton name")[0]
        states: list[tuple[str, AstdNode]] = []
        while self.at_kw("STATE"):
            self.take()
            sname = self.name("state name")[0]
            body: AstdNode = Elem()
            if self.at("="):
                self.take()
                body = self.astd_node()
            states.append((sname, body))
        self.expect_kw("INIT")
        init = self.name("initial state name")[0]
        finals: list[str] = []
        if self.at_kw("FINAL"):
            self.take()
            finals.append(self.name("final state name")[0])
            while self.at(","):
                self.take()
                finals.append(self.name("final state name")[0])
        transitions = []
        while self.at_kw("TRANS"):
            transitions.append(self.transition())
        self.expect_kw("END")
        return Automaton(name, tuple(states), init, frozenset(finals),
                         tuple(transitions), loc)

    def transition(self) -> Transition:
        loc = self.expect_kw("TRANS").loc
        src = self.name("source state")[0]
        if self.at_kw("FROM"):
            self.take()
            src_sub = self.name("source substate")[0]
            self.expect("->")
            dst = self.name("target state")[0]
            arrow = FromSubArrow(src, src_sub, dst)
        else:
            self.expect("->")
            dst = self.name("target state")[0]
            if self.at_kw("AT"):
                self.take()
                dst_sub = self.name("target substate")[0]
                arrow = ToSubArrow(src, dst, dst_sub)
            else:
                arrow = LocArrow(src, dst)
        self.expect_kw("ON")
        label, _ = self.ident("event label")
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.ident("event argument")[0])
            while self.at(","):
                self.take()
                args.append(self.ident("event argument")[0])
        self.expect(")")
        guard = None
        if self.at_kw("WHEN"):
            self.take()
            guard = self.pred()
        final = False
        if self.at_kw("FINAL"):
            self.take()
            final = True
        return Transition(arrow, label, tuple(args), guard, final, loc)

    def quant_node(self) -> QuantNode:
        tok = self.take()
        kind = tok.text.lower()
        var, _ = self.ident("quantification variable")
        self.expect(":")
        sort, _ = self.ident("sort name")
        delta: list[str] = []
        sync_pred: Pred | None = None
        if kind in ("sync", "weaksync"):
            self.expect_kw("SYNCSET")
            self.expect("{")
            if not self.at("}"):
                delta.append(self.ident("label")[0])
                while self.at(","):
                    self.take()
                    delta.append(self.ident("label")[0])
            self.expect("}")
        if kind == "weaksync":
            self.expect_kw("WHERE")
            sync_pred = self.pred()
        body = self.astd_node()
        self.expect_kw("END")
        return QuantNode(kind, var, sort, frozenset(delta), sync_pred, body, tok.loc)

    # --- substitutions ---

    def subst(self) -> Subst:
        self.enter()
        try:
            items = [self.subst_primary()]
            while self.at("||"):
                self.take()
                items.append(self.subst_primary())
            if len(items) == 1:
                return items[0]
            return Parallel(tuple(items))
        finally:
            self.leave()

    def subst_primary(self) -> Subst:
        tok = self.peek()
        if self.at_kw("skip"):
            self.take()
            return Skip(tok.loc)
        if self.at_kw("SELECT"):
            self.take()
            branches = []
            guard = self.pred()
            self.expect_kw("THEN")
            branches.append((guard, self.subst()))
            while self.at_kw("WHEN"):
                self.take()
                guard = self.pred()
                self.expect_kw("THEN")
                branches.append((guard, self.subst()))
            self.expect_kw("END")
            return Select(tuple(branches), tok.loc)
        name, loc = self.ident("variable name")
        if self.at(":|"):
            self.take()
            self.expect("(")
            pred = self.pred()
            self.expect(")")
            return Such(name, pred, loc)
        target: Expr = Ident(name, loc)
        if self.at("("):
            self.take()
            arg = self.expr()
            self.expect(")")
            target = App(target, arg, loc)
        self.expect(":=")
        return Assign(target, self.expr(), loc)

    # --- predicates ---

    def pred(self) -> Pred:
        self.enter()
        try:
            left = self.pred_or()
            if self.at("=>"):
                self.take()
                return Implies(left, self.pred())
            return left
        finally:
            self.leave()

    def pred_or(self) -> Pred:
        left = self.pred_and()
        while self.at_kw("or"):
            self.take()
            left = Or(left, self.pred_and())
        return left

    def pred_and(self) -> Pred:
        left = self.pred_atom()
        while self.at("&"):
            self.take()
            left = And(left, self.pred_atom())
        return left

    def pred_atom(self) -> Pred:
        self.enter()
        try:
            tok = self.peek()
            if self.at_kw("true"):
                self.take()
                return TrueP(tok.loc)
            if self.at_kw("false"):
                self.take()
                return FalseP(tok.loc)
            if self.at_kw("not"):
                self.take()
                return Not(self.pred_atom(), tok.loc)
            if self.at("!") or self.at("#"):
                kind = self.take().text
                var, _ = self.ident("quantifier variable")
                self.expect(":")
                if self.at_kw("dom"):
                    self.take()
                    self.expect("(")
                    bound = DomBound(self.expr())
                    self.expect(")")
                else:
                    sort, _ = self.ident("sort name")
                    bound = SortBound(sort)
                self.expect(".")
                self.expect("(")
                body = self.pred()
                self.expect(")")
                return QuantP(kind, var, bound, body, tok.loc)
            if self.at("("):
                # either a parenthesized predicate or a parenthesized expression
                snapshot = self.pos
                self.take()
                try:
                    inner = self.pred()
                    self.expect(")")
                    return inner
                except ParseError:
                    self.pos = snapshot
            return self.comparison()
        finally:
            self.leave()

    def comparison(self) -> Pred:
        left = self.expr()
        tok = self.peek()
        if tok.kind in ("=", "/=", ":", "/:"):
            self.take()
            right = self.expr()
            return Cmp(tok.kind, left, right, tok.loc)
        self.fail(f"expected a comparison operator, found {tok.text or tok.kind!r}", tok.loc)

    # --- expressions ---

    def expr(self) -> Expr:
        self.enter()
        try:
            left = self.expr_override()
            while self.at("\\/") or self.at("-"):
                op = self.take()
                right = self.expr_override()
                left = Union(left, right, op.loc) if op.kind == "\\/" else Diff(left, right, op.loc)
            return left
        finally:
            self.leave()

    def expr_override(self) -> Expr:
        left = self.expr_pair()
        while self.at("<+"):
            loc = self.take().loc
            left = Override(left, self.expr_pair(), loc)
        return left

    def expr_pair(self) -> Expr:
        left = self.expr_primary()
        while self.at("|->"):
            loc = self.take().loc
            left = PairE(left, self.expr_primary(), loc)
        return left

    def expr_primary(self) -> Expr:
        tok = self.peek()
        if self.at_kw("dom"):
            self.take()
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return self.expr_postfix(Dom(inner, tok.loc))
        if self.at("{"):
            self.take()
            items = []
            if not self.at("}"):
                items.append(self.expr())
                while self.at(","):
                    self.take()
                    items.append(self.expr())
            self.expect("}")
            return self.expr_postfix(SetLit(tuple(items), tok.loc))
        if self.at("("):
            self.take()
            inner = self.expr()
            self.expect(")")
            return self.expr_postfix(inner)
        if tok.kind == "PRIMED":
            self.take()
            return self.expr_postfix(Primed(tok.text, tok.loc))
        if tok.kind == "IDENT":
            self.take()
            return self.expr_postfix(Ident(tok.text, tok.loc))
        self.fail(f"expected an expression, found {tok.text or tok.kind!r}", tok.loc)

    def expr_postfix(self, base: Expr) -> Expr:
        while self.at("("):
            loc = self.take().loc
            arg = self.expr()
            self.expect(")")
            base = App(base, arg, loc)
        return base


def parse(source: str, filename: str = "<string>") -> SpecDoc:
    """Parse a document; raises ParseError with located diagnostics."""
    if not source.strip():
        raise ParseError([Diagnostic("empty specification", Loc(1, 1))])
    try:
        tokens = tokenize(source)
        return _Parser(tokens).document()
    except ParseError:
        raise
    except RecursionError:
        raise ParseError([Diagnostic("nesting too deep", Loc(1, 1))]) from None


def parse_or_diagnostics(source: str) -> tuple[SpecDoc | None, list[Diagnostic]]:
    """Totality-friendly wrapper: never raises."""
    try:
        return parse(source), []
    except ParseError as err:
        return None, err.diagnostics


def parse_expr(source: str) -> Expr:
    """Parse a standalone expression (used by gluing pairs and tests)."""
    p = _Parser(tokenize(source))
    e = p.expr()
    p.expect("EOF")
    return e


def parse_pred(source: str) -> Pred:
    """Parse a standalone predicate."""
    p = _Parser(tokenize(source))
    e = p.pred()
    p.expect("EOF")
    return e
