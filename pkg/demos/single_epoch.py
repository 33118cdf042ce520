"""One epoch in the 100 x 100 m setup, step by step.

Run: python3 demos/single_epoch.py [seed]
"""

import sys

from obstrack.config import load_run_config
from obstrack.evaluation import confusion, handoff_performance, metrics
from obstrack.handoff import at_risk, propose_handoffs
from obstrack.sim import generate_scenario, ground_truth_blockage, run_discovery
from obstrack.track import track_per_bs

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
params = load_run_config("single").settings.params
world = generate_scenario(params, seed)
print(f"{len(world.ues)} UEs, {len(world.active)} on mmWave links, {len(world.obstacles)} obstacles")

# discovery phase: each station logs the links that failed and when
log = run_discovery(world)
for bs, blocked in sorted(log.per_bs.items()):
    times = ", ".join(f"{bl.t_block:.1f}" for bl in blocked)
    print(f"station {bs}: {len(blocked)} failures at t = {times}")

# each station covers its failures with as few lines as the greedy pass finds
lines = track_per_bs(log)
print(f"{len(lines)} trajectory lines reported")
for c in lines:
    print(f"  {c.line.a:+.3f} x {c.line.b:+.3f} y {c.line.c:+.2f} = 0   from {c.gen}")

# links crossed by any line are handed off before the implementation phase
risky = {l.key for l in at_risk(world.active, lines)}
decisions = propose_handoffs(world.active, lines, world.stations, world.pl, world.zeta)
print(f"{len(decisions)} handoffs: " + ", ".join(f"ue {d.ue} {d.from_bs}->{d.to}" for d in decisions))

outcome = ground_truth_blockage(world, world.active)
cm = confusion({l.key: l.key in risky for l in world.active}, outcome.actual)
print(f"confusion: tp={cm.tp} fp={cm.fp} fn={cm.fn} tn={cm.tn}")
if cm.total:
    m = metrics(cm)
    print(f"accuracy {m.accuracy:.3f}, sensitivity {m.sensitivity}, precision {m.precision}")
print(f"handoff performance: {handoff_performance(decisions, world, outcome)}")
