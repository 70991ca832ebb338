"""
Parsing, rendering and static checking
======================================

Every toolkit run starts by loading a `.astd` document. The parser is
total: it either returns a document or a list of located diagnostics.
"""

from astdkit import check_static, parse, render_spec
from astdkit.corpus import path

source = path("trains_L1").read_text()
doc = parse(source)

print(f"loaded {doc.name} (refinement level {doc.level})")
print(f"sorts: {', '.join(s.name for s in doc.sorts)}")
print(f"events: {', '.join(e.label for e in doc.events)}")

# the static checker guarantees the structural invariants the engine needs
print("static diagnostics:", check_static(doc) or "none")

# rendering is canonical: parse . render . parse is the identity
assert parse(render_spec(doc)) == doc
print("round-trip: ok")

# a malformed file turns into diagnostics, never a crash
from astdkit import parse_or_diagnostics

bad_doc, diagnostics = parse_or_diagnostics("SPEC broken LEVEL one")
print("malformed input ->", diagnostics[0])
