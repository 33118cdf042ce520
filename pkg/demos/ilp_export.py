"""Write the integer program for one station's failures and check the
assignment built from the true obstacle motion against it.

Run: python3 demos/ilp_export.py [out.lp]
"""

import sys

from obstrack.ilp import build_ilp, check_assignment, emit_lp, ground_truth_assignment, zero_assignment
from obstrack.sim import crossing_scenario, run_discovery

out = sys.argv[1] if len(sys.argv) > 1 else "single_obstacle.lp"
world = crossing_scenario(4, n_links=3)
blocked = run_discovery(world).per_bs[1]

model = build_ilp(blocked, K=2)
print(f"{len(model.variables)} variables ({len(model.binaries)} binary), {len(model.rows)} rows")

truth = ground_truth_assignment(model, world.obstacles, owner=[0] * len(blocked))
print("true motion feasible:", bool(check_assignment(model, truth)))
print("all-zero assignment violates:", check_assignment(model, zero_assignment(model)).violated)

with open(out, "w", encoding="utf-8") as fh:
    fh.write(emit_lp(model))
print(f"wrote {out}; solve with e.g. lp_solve {out}")
