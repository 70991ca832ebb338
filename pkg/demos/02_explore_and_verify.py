"""
Exhaustive exploration and safety checking
==========================================

The engine couples the control layer (the ASTD) with the data layer (the
B-like events) and explores every reachable combined state breadth-first.
Invariants are checked on states, theorems on transitions, and calling
consistency at every control-enabled event.
"""

from astdkit.corpus import load
from astdkit.engine import Engine

for name in ("trains_L1", "trains_L2"):
    spec = load(name)
    engine = Engine(spec)
    lts = engine.explore()
    print(f"{name}: {len(lts.states)} states, {len(lts.transitions)} transitions")
    print("  invariant violations:", len(engine.check_invariants(lts)))
    print("  theorem violations:  ", len(engine.check_theorems(lts)))
    print("  calling violations:  ", len(engine.check_calling_consistency(lts)))

# a seeded mutation shows what a violation looks like
mutant = load("trains_L2_mut_mal")
engine = Engine(mutant)
lts = engine.explore()
violation = engine.check_invariants(lts)[0]
print(f"\n{mutant.name}: first violation")
print(" ", violation)
print("  witness state:", violation.details["state"])
