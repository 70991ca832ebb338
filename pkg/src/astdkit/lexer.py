"""Tokenizer for the specification language.

Identifiers may be ordinary names (s1_2, position) or dotted digit names
(2.1) as used for automaton states. `//` starts a line comment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, Loc, ParseError

KEYWORDS = {
    "SPEC", "LEVEL", "OPTIONS", "SORTS", "CONSTANTS", "VARIABLES",
    "INVARIANTS", "INVARIANT", "THEOREMS", "THEOREM", "FOR", "EVENTS",
    "EVENT", "PURE", "WHEN", "THEN", "END", "ASTD", "AUTOMATON", "STATE",
    "INIT", "FINAL", "TRANS", "ON", "AT", "FROM", "KLEENE", "INTERLEAVE",
    "SYNC", "WEAKSYNC", "SYNCSET", "WHERE", "SELECT", "ELEM",
    "ORDER", "POW",
    "or", "not", "dom", "skip", "true", "false",
}

# longest-match first
SYMBOLS = [
    "+->", "-->", "|->", ":|", "<+", ":=", "/=", "/:", "=>", "->", "\\/",
    "||", "&", ":", "=", "-", "!", "#", ".", "(", ")", "{", "}", ",",
]


@dataclass(frozen=True)
class Token:
    kind: str          # KEYWORD | IDENT | PRIMED | DOTTED | NUM | symbol | EOF
    text: str
    loc: Loc


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def err(msg: str):
        raise ParseError([Diagnostic(msg, Loc(line, col))])

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        loc = Loc(line, col)
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            if j < n and source[j] == "'":
                tokens.append(Token("PRIMED", text, loc))
                j += 1
            elif text in KEYWORDS:
                tokens.append(Token("KEYWORD", text, loc))
            else:
                tokens.append(Token("IDENT", text, loc))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            # dotted digit name like 2.1 (a dot must be followed by a digit)
            kind = "NUM"
            while j + 1 < n and source[j] == "." and source[j + 1].isdigit():
                kind = "DOTTED"
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            tokens.append(Token(kind, source[i:j], loc))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token(sym, sym, loc))
                i += len(sym)
                col += len(sym)
                break
        else:
            err(f"unexpected character {ch!r}")
    tokens.append(Token("EOF", "", Loc(line, col)))
    return tokens
