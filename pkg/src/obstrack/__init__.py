"""Tracking dynamic obstacles from mmWave link failures, and proactive
handoff of the links their trajectories threaten."""

from .evaluation import (Camera, CameraDeployment, ConfusionMatrix, Metrics, camera_covers,
                         camera_tracked, confusion, handoff_performance, metrics,
                         tracking_capability_camera, tracking_capability_ours)
from .geom import Line2, Point2, Segment, intersects, line_through, square_intersects_segment
from .handoff import HandoffDecision, at_risk, propose_handoffs
from .ilp import build_ilp, check_assignment, emit_lp
from .sim import (DiscoveryLog, EpochOutcome, ScenarioParams, generate_scenario,
                  ground_truth_blockage, load_trace, run_discovery)
from .track import (CoverInstance, TrajectorySet, build_instance, exact_min_cover,
                    gen_candidates, greedy_cover, track_per_bs)
from .world import (BaseStation, BlockedLink, EpochConfig, Link, Obstacle, PathLossModel,
                    StationKind, UserEquipment, World, load_world, save_world)

__version__ = "0.1.0"
