"""Runtime values of the finite data layer.

Everything is hashable and totally ordered via `value_key`, which gives the
canonical, deterministic serialization the explorer and exporters rely on.
Sets and finite maps share one representation (a frozen set of values); a
"map" is simply a set of pairs that is single-valued, and single-valuedness
is enforced where it matters: application, pointwise assignment, and typing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import EvalError


@dataclass(frozen=True)
class Atom:
    sort: str
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PairV:
    left: "Value"
    right: "Value"

    def __str__(self) -> str:
        return f"{self.left} |-> {self.right}"


class SetV:
    """Immutable set of values (also used for relations and finite maps)."""

    __slots__ = ("items", "_hash")

    def __init__(self, items=()):
        object.__setattr__(self, "items", frozenset(items))
        object.__setattr__(self, "_hash", hash(self.items))

    def __eq__(self, other):
        return isinstance(other, SetV) and self.items == other.items

    def __hash__(self):
        return self._hash

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __contains__(self, v):
        return v in self.items

    def __repr__(self):
        return f"SetV({sorted(map(str, self.items))})"

    def __str__(self) -> str:
        inner = ", ".join(str(v) for v in sorted(self.items, key=value_key))
        return "{ " + inner + " }" if inner else "{}"

    # map view -------------------------------------------------------

    def pairs(self) -> list[PairV]:
        out = []
        for v in self.items:
            if not isinstance(v, PairV):
                raise EvalError(f"value {self} used as a map but contains non-pair {v}")
            out.append(v)
        return out

    def apply(self, key: "Value", context: str | None = None) -> "Value":
        hits = [p.right for p in self.pairs() if p.left == key]
        if not hits:
            raise EvalError(f"application outside domain: no entry for {key}", context)
        if len(hits) > 1:
            raise EvalError(f"non-functional application: {len(hits)} entries for {key}", context)
        return hits[0]

    def domain(self) -> "SetV":
        return SetV(p.left for p in self.pairs())

    def override(self, other: "SetV") -> "SetV":
        removed = other.domain()
        kept = [p for p in self.pairs() if p.left not in removed]
        return SetV(kept + other.pairs())

    def is_functional(self) -> bool:
        seen = set()
        for p in self.pairs():
            if p.left in seen:
                return False
            seen.add(p.left)
        return True


Value = Atom | PairV | SetV

EMPTY_SET = SetV()


def value_key(v: Value):
    """Total order over values; structural, deterministic across runs."""
    if isinstance(v, Atom):
        return (0, v.sort, v.name)
    if isinstance(v, PairV):
        return (1, value_key(v.left), value_key(v.right))
    if isinstance(v, SetV):
        return (2, tuple(sorted(value_key(x) for x in v.items)))
    raise TypeError(f"not a value: {v!r}")


def render_value(v: Value) -> str:
    return str(v)


def map_of(entries) -> SetV:
    """Build a map value from (key, value) pairs."""
    return SetV(PairV(k, w) for k, w in entries)
