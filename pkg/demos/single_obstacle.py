"""A single point obstacle on a straight path breaks a fan of links.

The greedy cover returns one line that crosses every failed link. That line
passes through two UEs, so it is a rotated and shifted copy of the true
path; the printout shows how far it lies from the obstacle.

Run: python3 demos/single_obstacle.py [seed]
"""

import sys

import numpy as np

from obstrack.geom import intersects
from obstrack.sim import crossing_scenario, run_discovery
from obstrack.track import build_instance, exact_min_cover, gen_candidates, track_per_bs
from obstrack.world import centers_at

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
world = crossing_scenario(seed, n_links=6)
(obstacle,) = world.obstacles
log = run_discovery(world)
blocked = log.per_bs[1]
print(f"obstacle starts at {obstacle.motion.start}, velocity {obstacle.motion.velocity}")
print(f"{len(blocked)} links failed at t = {[bl.t_block for bl in blocked]}")

cands = gen_candidates(blocked, dedup=False)
print(f"{len(cands)} candidates: {sum(not c.is_fallback for c in cands)} UE pairs "
      f"+ {sum(c.is_fallback for c in cands)} fallbacks")

lines = track_per_bs(log)
(best,) = lines.lines
print(f"greedy picked 1 line through UEs {best.gen}, "
      f"crossing {sum(intersects(best.line, bl.link.seg) for bl in blocked)}/{len(blocked)} links")
print(f"exact minimum cover size: {len(exact_min_cover(build_instance(blocked), size_limit=2))}")

times = np.arange(0, world.epoch.tau_slot + 1) * world.epoch.delta
pts = centers_at(obstacle, times)
dist = np.abs(pts @ np.array(best.line[:2]) + best.line.c)
print(f"distance from the line to the obstacle over [0, tau]: {dist.min():.2f} .. {dist.max():.2f} m")
