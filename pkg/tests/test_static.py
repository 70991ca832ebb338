from astdkit.parser import parse
from astdkit.static_check import check_static

BASE = """SPEC demo LEVEL 1
SORTS
  T = {{ a, b }}
VARIABLES
  v : T +-> T
EVENTS
  EVENT go(x : T)
    THEN v := v <+ {{ x |-> x }}
  END
ASTD
{astd}
"""

ASTD_OK = """  INTERLEAVE q : T
    AUTOMATON M
      STATE m1
      STATE m2
      INIT m1
      TRANS m1 -> m2 ON go(q)
    END
  END"""


def _diags(src):
    return [str(d) for d in check_static(parse(src))]


def test_clean_document():
    assert _diags(BASE.format(astd=ASTD_OK)) == []


def test_corpus_is_clean(docs):
    for name, doc in docs.items():
        assert check_static(doc) == [], name


def test_undeclared_event_named_with_location():
    astd = ASTD_OK.replace("ON go(q)", "ON jump(q)")
    src = BASE.format(astd=astd)
    doc = parse(src)
    diags = check_static(doc)
    assert any("jump" in d.message for d in diags)
    bad = next(d for d in diags if "jump" in d.message)
    assert bad.loc is not None and bad.loc.line > 1


def test_arity_mismatch():
    astd = ASTD_OK.replace("ON go(q)", "ON go()")
    diags = _diags(BASE.format(astd=astd))
    assert any("expects 1 argument" in d for d in diags)


def test_duplicate_variable_names():
    src = BASE.format(astd=ASTD_OK).replace(
        "VARIABLES\n  v : T +-> T", "VARIABLES\n  mal : T +-> T\n  mal : T +-> T"
    ).replace("v := v <+", "mal := mal <+")
    diags = _diags(src)
    assert any("duplicate declaration of 'mal'" in d for d in diags)


def test_unknown_identifier_in_guard():
    src = BASE.format(astd=ASTD_OK).replace(
        "THEN v :=", "WHEN ghost : dom(v)\n    THEN v :="
    )
    diags = _diags(src)
    assert any("unknown identifier 'ghost'" in d for d in diags)


def test_primed_outside_two_state_context():
    src = BASE.format(astd=ASTD_OK).replace(
        "THEN v := v <+ { x |-> x }",
        "WHEN v' = v\n    THEN v := v <+ { x |-> x }",
    )
    diags = _diags(src)
    assert any("two-state" in d for d in diags)


def test_pattern_argument_neither_var_nor_atom():
    astd = ASTD_OK.replace("ON go(q)", "ON go(zz)")
    diags = _diags(BASE.format(astd=astd))
    assert any("neither a quantification variable" in d for d in diags)


def test_automaton_structure_checks():
    astd = """  AUTOMATON M
    STATE m1
    INIT nope
    TRANS m1 -> gone ON go(a)
  END"""
    diags = _diags(BASE.format(astd=astd))
    assert any("initial state 'nope'" in d for d in diags)
    assert any("state 'gone' not declared" in d for d in diags)


def test_interleave_rejects_syncset():
    # grammar forbids SYNCSET on INTERLEAVE outright
    src = BASE.format(astd=ASTD_OK).replace(
        "INTERLEAVE q : T", "INTERLEAVE q : T SYNCSET { go }"
    )
    from astdkit.parser import parse_or_diagnostics
    doc, diags = parse_or_diagnostics(src)
    assert doc is None and diags
