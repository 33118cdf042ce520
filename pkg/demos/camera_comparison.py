"""Tracking capability of the link-failure tracker against randomly placed
RGB-D cameras, on a handful of trials.

Run: python3 demos/camera_comparison.py [trials]
"""

import sys

from obstrack.config import load_run_config
from obstrack.experiments import camera_sweep

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20
cfg = load_run_config("camera", trials=trials)
rows, handoff_rows = camera_sweep(cfg)

print("cameras  tracked(ours)  tracked(cameras)  handoff(ours)  handoff(cameras)")
for (_, n, *_, ours, cam), (_, _, h_ours, h_cam) in zip(rows, handoff_rows):
    print(f"{n:7d}  {ours:13.3f}  {cam:16.3f}  {h_ours or 0:13.3f}  {h_cam or 0:16.3f}")
