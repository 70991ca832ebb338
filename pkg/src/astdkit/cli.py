"""Command-line interface.

Exit codes: 0 all checks pass, 1 violations or counterexamples found,
2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .control import Event
from .diagnostics import ParseError, SpecError, StaticError
from .document import SpecDoc
from .engine import Engine, lts_to_dot, lts_to_json
from .parser import parse, parse_expr
from .static_check import check_static
from . import refinement as _rf
from . import translate as _tr

OK, VIOLATIONS, USAGE = 0, 1, 2


def _load(path_text: str) -> SpecDoc:
    p = Path(path_text)
    if not p.is_file():
        raise SystemExitWith(USAGE, f"no such file: {path_text}")
    try:
        doc = parse(p.read_text(encoding="utf-8"), filename=path_text)
    except ParseError as err:
        raise SystemExitWith(USAGE, _render_diags(path_text, err.diagnostics))
    diagnostics = check_static(doc)
    if diagnostics:
        raise SystemExitWith(USAGE, _render_diags(path_text, diagnostics))
    return doc


def _render_diags(path_text: str, diagnostics) -> str:
    return "\n".join(f"{path_text}:{d}" for d in diagnostics)


class SystemExitWith(Exception):
    def __init__(self, code: int, message: str = ""):
        self.code = code
        self.message = message


# --- subcommands ---

def cmd_check(args) -> int:
    p = Path(args.file)
    if not p.is_file():
        print(f"no such file: {args.file}", file=sys.stderr)
        return USAGE
    try:
        doc = parse(p.read_text(encoding="utf-8"), filename=args.file)
    except ParseError as err:
        print(_render_diags(args.file, err.diagnostics), file=sys.stderr)
        return USAGE
    diagnostics = check_static(doc)
    if diagnostics:
        print(_render_diags(args.file, diagnostics), file=sys.stderr)
        return VIOLATIONS
    print(f"{args.file}: {doc.name} (level {doc.level}) is well-formed")
    return OK


def cmd_explore(args) -> int:
    doc = _load(args.file)
    engine = Engine(doc)
    lts = engine.explore(max_states=args.max_states, max_depth=args.max_depth)
    violations = []
    if args.invariants:
        violations.extend(engine.check_invariants(lts))
    if args.theorems:
        violations.extend(engine.check_theorems(lts))
    if args.calling:
        violations.extend(engine.check_calling_consistency(lts))
    lts.violations = violations
    flags = " (truncated)" if lts.truncated else ""
    print(
        f"{doc.name}: {len(lts.states)} states, {len(lts.transitions)} "
        f"transitions{flags}, {len(violations)} violation(s)"
    )
    for v in violations[: args.max_reported]:
        print(f"  {v}")
    if len(violations) > args.max_reported:
        print(f"  ... and {len(violations) - args.max_reported} more")
    if args.json:
        Path(args.json).write_text(json.dumps(lts_to_json(doc, lts), indent=2),
                                   encoding="utf-8")
        print(f"wrote {args.json}")
    if args.dot:
        Path(args.dot).write_text(lts_to_dot(lts), encoding="utf-8")
        print(f"wrote {args.dot}")
    return VIOLATIONS if violations else OK


def cmd_simulate(args) -> int:
    doc = _load(args.file)
    engine = Engine(doc)
    state = engine.initial_state()
    history = []
    print(f"simulating {doc.name}; commands: <index>, u(ndo), s(tate), q(uit)")
    while True:
        enabled = engine.enabled_events(state)
        print("\nenabled events:")
        for i, (ev, n) in enumerate(enabled):
            extra = f" [{n} successors]" if n > 1 else ""
            print(f"  {i}: {ev}{extra}")
        if not enabled:
            print("  (none — deadlock)")
        try:
            line = input("> ").strip()
        except EOFError:
            return OK
        if line in ("q", "quit", "exit"):
            return OK
        if line in ("s", "state"):
            if state.data is not None:
                for name, value in state.data.items():
                    print(f"  {name} = {value}")
            continue
        if line in ("u", "undo"):
            if history:
                state = history.pop()
            else:
                print("nothing to undo")
            continue
        try:
            idx = int(line)
            ev, n = enabled[idx]
        except (ValueError, IndexError):
            print("pick an index from the list, or u/s/q")
            continue
        succs = engine.combined_step(state, ev)
        choice = 0
        if len(succs) > 1:
            for i, succ in enumerate(succs):
                print(f"  successor {i}: {succ.data.to_json() if succ.data else ''}")
            try:
                choice = int(input("successor index> ").strip() or "0")
            except (ValueError, EOFError):
                choice = 0
            if not (0 <= choice < len(succs)):
                print("bad successor index")
                continue
        history.append(state)
        state = succs[choice]
        print(f"fired {ev}")
    return OK


def cmd_refine(args) -> int:
    abstract = _load(args.abstract)
    concrete = _load(args.concrete)
    new_labels = frozenset(filter(None, (args.new or "").split(",")))
    relabel = {}
    for pair in filter(None, (args.relabel or "").split(",")):
        if "=" not in pair:
            raise SystemExitWith(USAGE, f"bad --relabel entry {pair!r}, want old=new")
        old, new = pair.split("=", 1)
        relabel[old] = new
    erase = frozenset(filter(None, (args.erase_args or "").split(",")))
    cfg = _rf.RefinementConfig(new_labels=new_labels, relabel=relabel,
                               erase_args=erase)

    mode = args.mode
    if mode.startswith("projection:"):
        instance = mode.split(":", 1)[1]
        conc_lts = Engine(concrete).explore()
        verdict = _rf.projection_refinement(abstract, concrete, conc_lts,
                                            instance, cfg)
    elif mode == "preservation":
        abs_lts = Engine(abstract).explore()
        conc_lts = Engine(concrete).explore()
        verdict = _rf.trace_preservation(abs_lts, conc_lts, cfg)
    elif mode == "inclusion":
        abs_lts = Engine(abstract).explore()
        conc_lts = Engine(concrete).explore()
        verdict = _rf.trace_inclusion(conc_lts, abs_lts, cfg)
    else:
        raise SystemExitWith(
            USAGE, f"unknown mode {mode!r} (preservation|inclusion|projection:<atom>)"
        )
    print(verdict)
    if args.json:
        Path(args.json).write_text(json.dumps(verdict.to_json(), indent=2),
                                   encoding="utf-8")
    return OK if verdict.ok else VIOLATIONS


def cmd_relcheck(args) -> int:
    doc = _load(args.file)
    engine = Engine(doc)
    lts = engine.explore()
    universe = _rf.data_universe(lts)
    local = args.local_label
    ldef = doc.event(local)
    if ldef is None or len(ldef.params) != 1:
        raise SystemExitWith(USAGE, f"event {local!r} must exist and take one parameter")
    sort = doc.sort(ldef.params[0][1])
    atoms = sort.elements
    code = OK
    for i, a in enumerate(atoms):
        for b in atoms[i + 1:]:
            r1 = _rf.event_relation(doc, local, (a,), universe)
            r2 = _rf.event_relation(doc, local, (b,), universe)
            ok = _rf.relations_commute(r1, r2)
            print(f"commute {local}({a}) ; {local}({b}): {'PASS' if ok else 'FAIL'}")
            if not ok:
                code = VIOLATIONS
    if doc.event(args.global_label) is not None:
        verdict = _rf.seq_equivalence(doc, universe, args.global_label, local)
        print(verdict)
        if not verdict.ok:
            code = VIOLATIONS
    else:
        print(f"(no {args.global_label!r} event; sequence equivalence skipped)")
    return code


def cmd_translate(args) -> int:
    doc = _load(args.file)
    try:
        if args.backend == "state":
            result = _tr.translate_state_encoding(doc)
        else:
            result = _tr.translate_enabled_sets(doc)
    except SpecError as err:
        raise SystemExitWith(USAGE, str(err))
    for d in result.diagnostics:
        print(f"note: {d.message}", file=sys.stderr)
    text = _tr.render_machine(result.machine)
    out = args.output
    if out is None:
        suffix = ".mch" if args.backend == "state" else ".bench.mch"
        out = str(Path(args.file).with_suffix(suffix))
    Path(out).write_text(text, encoding="utf-8")
    print(f"wrote {out}")
    return OK


def cmd_serve(args) -> int:
    from .service import serve_forever

    specs = {}
    for f in args.files:
        doc = _load(f)
        specs[doc.name] = doc
    serve_forever(specs, args.port)
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="astdkit",
        description="parse, animate, model-check, refinement-check and "
                    "translate ASTD specifications",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and statically check a specification")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("explore", help="explore the state space and run checks")
    p.add_argument("file")
    p.add_argument("--max-states", type=int, default=None)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--invariants", action="store_true")
    p.add_argument("--theorems", action="store_true")
    p.add_argument("--calling", action="store_true")
    p.add_argument("--max-reported", type=int, default=10)
    p.add_argument("--json", metavar="OUT")
    p.add_argument("--dot", metavar="OUT")
    p.set_defaults(fn=cmd_explore)

    p = sub.add_parser("simulate", help="interactive terminal stepper")
    p.add_argument("file")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("refine", help="check a refinement relation between two specs")
    p.add_argument("abstract")
    p.add_argument("concrete")
    p.add_argument("--mode", required=True,
                   help="preservation | inclusion | projection:<atom>")
    p.add_argument("--new", help="comma-separated new labels to hide")
    p.add_argument("--relabel", help="comma-separated old=new label renames")
    p.add_argument("--erase-args", help="labels whose arguments are erased")
    p.add_argument("--json", metavar="OUT")
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("relcheck",
                       help="commutativity and sequence-equivalence of the "
                            "computing events")
    p.add_argument("file")
    p.add_argument("--local-label", default="compute_l")
    p.add_argument("--global-label", default="compute")
    p.set_defaults(fn=cmd_relcheck)

    p = sub.add_parser("translate", help="generate a classical B machine")
    p.add_argument("file")
    p.add_argument("--backend", choices=("state", "enabled"), default="state")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("serve", help="run the JSON animation service")
    p.add_argument("files", nargs="+")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(fn=cmd_serve)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as err:
        return USAGE if err.code not in (0, None) else OK
    try:
        return args.fn(args)
    except SystemExitWith as err:
        if err.message:
            print(err.message, file=sys.stderr)
        return err.code
    except (StaticError, ParseError) as err:
        for d in err.diagnostics:
            print(str(d), file=sys.stderr)
        return USAGE
    except SpecError as err:
        print(str(err), file=sys.stderr)
        return VIOLATIONS


if __name__ == "__main__":
    sys.exit(main())
