"""
Headless animation
==================

The same stepping machinery that powers the animation service can be
driven directly: list the enabled ground events of a state, fire one,
inspect the data. Nondeterministic successors are ordered canonically, so
a (event, choice index) trace is a reproducible scenario.
"""

from astdkit.control import Event
from astdkit.corpus import load
from astdkit.engine import Engine

engine = Engine(load("trains_L2"))
state = engine.initial_state()

scenario = [
    (Event("start", ("t1",)), 0),       # appear at p1
    (Event("compute_l", ("t1",)), 3),   # grant the widest limit, p4
    (Event("movement", ("t1",)), 2),    # advance to p3
    (Event("compute_l", ("t1",)), 1),   # fresh limit
    (Event("stop", ("t1",)), 0),
]

for event, choice in scenario:
    enabled = ", ".join(str(e) for e, _ in engine.enabled_events(state))
    print(f"enabled: {enabled}")
    successors = engine.combined_step(state, event)
    state = successors[choice]
    print(f"fired {event} [choice {choice} of {len(successors)}]"
          f" -> {state.data.to_json()}\n")

print("back at the initial data state:", state.data == engine.initial_state().data)

# refused events simply have no successors
refused = engine.combined_step(state, Event("movement", ("t1",)))
print("movement before start is refused:", refused == [])
