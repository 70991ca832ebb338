"""
The refinement chain of the train system
========================================

Four levels: free movement (L1), per-train limit computation (L2), one
synchronised global computation (L3), and the split between track-side and
on-board state with explicit communications (L4). Each step is justified
by a different relation, all decided exactly on the explored systems.
"""

from astdkit.corpus import load
from astdkit.engine import Engine
from astdkit.parser import parse_expr
from astdkit import refinement as rf

docs = {n: load(n) for n in ("trains_L1", "trains_L2", "trains_L3", "trains_L4")}
ltss = {n: Engine(d).explore() for n, d in docs.items()}

# L1 -> L2: the new compute_l events are invisible; every abstract trace
# survives, and the concrete system adds no visible behaviour
cfg = rf.RefinementConfig(new_labels=frozenset({"compute_l"}))
print(rf.trace_preservation(ltss["trains_L1"], ltss["trains_L2"], cfg))
print(rf.trace_inclusion(ltss["trains_L2"], ltss["trains_L1"], cfg))

# L2 -> L3: the global compute restricts the interleavings...
global_cfg = rf.RefinementConfig(relabel={"compute_l": "compute"},
                                 erase_args=frozenset({"compute"}))
print(rf.trace_preservation(ltss["trains_L2"], ltss["trains_L3"], global_cfg))

# ...but each train's local behaviour is preserved
proj_cfg = rf.RefinementConfig(relabel={"compute": "compute_l"})
for train in ("t1", "t2"):
    print(rf.projection_refinement(docs["trains_L2"], docs["trains_L3"],
                                   ltss["trains_L3"], train, proj_cfg))

# the merge is consistent: local computes commute, and one global compute
# equals any sequence of local ones
universe = rf.data_universe(ltss["trains_L2"])
r1 = rf.event_relation(docs["trains_L2"], "compute_l", ("t1",), universe)
r2 = rf.event_relation(docs["trains_L2"], "compute_l", ("t2",), universe)
print("compute_l(t1) ; compute_l(t2) commute:", rf.relations_commute(r1, r2))
print(rf.seq_equivalence(docs["trains_L3"], rf.data_universe(ltss["trains_L3"])))

# L3 -> L4: communications are the new events; at stable points the two
# copies of each variable agree
comm_cfg = rf.RefinementConfig(new_labels=frozenset({"commBT", "commTB"}))
print(rf.trace_preservation(ltss["trains_L3"], ltss["trains_L4"], comm_cfg))
pairs = [(parse_expr("track_position"), parse_expr("on_board_position")),
         (parse_expr("track_mal"), parse_expr("on_board_mal"))]
violations = rf.gluing_check(docs["trains_L4"], ltss["trains_L4"], pairs,
                             {"commBT", "commTB"})
print("gluing violations at stable points:", len(violations))
