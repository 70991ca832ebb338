"""Access to the bundled train-system corpus."""

from __future__ import annotations

from pathlib import Path

from .diagnostics import StaticError
from .document import SpecDoc
from .parser import parse
from .static_check import check_static

LEVELS = ("trains_L1", "trains_L2", "trains_L3", "trains_L4")
MUTATIONS = ("trains_L1_mut_jump", "trains_L2_mut_mal", "trains_L4_mut_nocommtb")


def corpus_dir() -> Path:
    here = Path(__file__).resolve()
    for parent in here.parents:
        candidate = parent / "corpus"
        if candidate.is_dir():
            return candidate
    raise FileNotFoundError("corpus directory not found")


def path(name: str) -> Path:
    return corpus_dir() / f"{name}.astd"


def load(name: str) -> SpecDoc:
    doc = parse(path(name).read_text(encoding="utf-8"), filename=f"{name}.astd")
    diagnostics = check_static(doc)
    if diagnostics:
        raise StaticError(diagnostics)
    return doc


def load_file(file_path: str | Path) -> SpecDoc:
    doc = parse(Path(file_path).read_text(encoding="utf-8"), filename=str(file_path))
    diagnostics = check_static(doc)
    if diagnostics:
        raise StaticError(diagnostics)
    return doc
