"""Diagnostics and error types shared across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Loc:
    """Source position (1-based line/column)."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    message: str
    loc: Loc | None = None
    severity: str = "error"

    def __str__(self) -> str:
        where = f"{self.loc}: " if self.loc else ""
        return f"{where}{self.severity}: {self.message}"


class SpecError(Exception):
    """Base class for errors raised while loading or running a specification."""


class ParseError(SpecError):
    """Raised by the parser; carries all collected diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "parse error")


class StaticError(SpecError):
    """Raised when a parsed document fails static checking."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "static error")


class EvalError(SpecError):
    """Raised on ill-defined evaluation (partial-function application, unbound names).

    These abort a run with context instead of being absorbed as `false`: they
    indicate genuine specification bugs, the runtime analogue of B
    well-definedness obligations.
    """

    def __init__(self, message: str, context: str | None = None):
        self.context = context
        super().__init__(message if context is None else f"{message} [{context}]")


@dataclass
class Violation:
    """A check failure with enough witness material to reproduce it."""

    kind: str                      # "invariant" | "theorem" | "calling" | "gluing" | ...
    message: str
    state_index: int | None = None
    transition: tuple | None = None   # (from_index, Event, to_index)
    details: dict = field(default_factory=dict)

    def __str__(self) -> str:
        at = ""
        if self.transition is not None:
            at = f" at transition {self.transition[0]} -{self.transition[1]}-> {self.transition[2]}"
        elif self.state_index is not None:
            at = f" at state {self.state_index}"
        return f"{self.kind}{at}: {self.message}"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "message": self.message}
        if self.state_index is not None:
            out["state"] = self.state_index
        if self.transition is not None:
            src, ev, dst = self.transition
            out["transition"] = {"from": src, "event": ev.to_json(), "to": dst}
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out
