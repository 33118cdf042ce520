"""Prediction metrics, tracking capability and the RGB-D camera baseline."""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .geom import Point2, Segment
from .sim import ground_truth_blockage
from .world import Link, Obstacle, StationKind, World, centers_at, make_link


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: float = 0
    fp: float = 0
    fn: float = 0
    tn: float = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other):
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp,
                               self.fn + other.fn, self.tn + other.tn)

    def percentages(self) -> "ConfusionMatrix":
        t = self.total
        if t == 0:
            raise ValueError("empty confusion matrix")
        return ConfusionMatrix(*(100.0 * v / t for v in (self.tp, self.fp, self.fn, self.tn)))


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    # None when the denominator is zero
    sensitivity: Optional[float]
    precision: Optional[float]


class EmptyMatrixError(ValueError):
    pass


def confusion(predicted: Dict, actual: Dict) -> ConfusionMatrix:
    if set(predicted) != set(actual):
        raise KeyError("predicted and actual maps cover different links")
    tp = fp = fn = tn = 0
    for key, p in predicted.items():
        a = actual[key]
        if p and a:
            tp += 1
        elif p:
            fp += 1
        elif a:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def metrics(cm: ConfusionMatrix) -> Metrics:
    if cm.total <= 0:
        raise EmptyMatrixError("metrics of an empty confusion matrix")
    acc = (cm.tp + cm.tn) / cm.total
    sens = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn > 0 else None
    prec = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp > 0 else None
    return Metrics(acc, sens, prec)


# --- cameras --------------------------------------------------------------

@dataclass(frozen=True)
class Camera:
    pos: Point2
    heading: float
    fov: float = math.pi / 2
    r_min: float = 0.5
    r_max: float = 3.5

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if not 0 < self.fov <= 2 * math.pi:
            raise ValueError("fov must lie in (0, 2*pi]")


@dataclass(frozen=True)
class CameraDeployment:
    cameras: tuple = ()

    def __len__(self):
        return len(self.cameras)

    def first(self, n) -> "CameraDeployment":
        return CameraDeployment(self.cameras[:n])


def _angle_off(bearing, heading):
    """Absolute angular difference wrapped to [0, pi]."""
    d = np.mod(np.asarray(bearing) - heading + math.pi, 2 * math.pi) - math.pi
    return np.abs(d)


def camera_covers(cam: Camera, p) -> bool:
    dx, dy = p[0] - cam.pos.x, p[1] - cam.pos.y
    r = math.hypot(dx, dy)
    if not cam.r_min <= r <= cam.r_max:
        return False
    if cam.fov >= 2 * math.pi:
        return True
    return bool(_angle_off(math.atan2(dy, dx), cam.heading) <= cam.fov / 2 + 1e-12)


def coverage_matrix(dep: CameraDeployment, points) -> np.ndarray:
    """(n_points, n_cameras) boolean: point covered by camera."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if not len(dep):
        return np.zeros((len(points), 0), dtype=bool)
    pos = np.array([c.pos for c in dep.cameras])
    head = np.array([c.heading for c in dep.cameras])
    fov = np.array([c.fov for c in dep.cameras])
    rmin = np.array([c.r_min for c in dep.cameras])
    rmax = np.array([c.r_max for c in dep.cameras])
    dx = points[:, None, 0] - pos[None, :, 0]
    dy = points[:, None, 1] - pos[None, :, 1]
    r = np.hypot(dx, dy)
    ang = np.abs(np.mod(np.arctan2(dy, dx) - head + math.pi, 2 * math.pi) - math.pi)
    in_sector = (ang <= fov / 2 + 1e-12) | (fov >= 2 * math.pi)
    return (r >= rmin) & (r <= rmax) & in_sector


def window_times(window, delta):
    t0, t1 = window
    n = int(round((t1 - t0) / delta))
    return t0 + np.arange(n + 1) * delta


def camera_tracked(dep: CameraDeployment, o: Obstacle, window, delta: float) -> bool:
    """Every sampled centre position in the window is seen by some camera."""
    if not len(dep):
        return False
    pts = centers_at(o, window_times(window, delta))
    return bool(coverage_matrix(dep, pts).any(axis=1).all())


def deploy_cameras(rng, n: int, area) -> CameraDeployment:
    """Uniform positions over the area, uniform headings over [0, 2*pi)."""
    W, H = area
    xy = rng.uniform((0, 0), (W, H), size=(n, 2))
    heading = rng.uniform(0.0, 2 * math.pi, size=n)
    return CameraDeployment(tuple(Camera(Point2(float(x), float(y)), float(h))
                                  for (x, y), h in zip(xy, heading)))


def tracking_capability_camera(dep, obstacles, window, delta) -> float:
    if not obstacles:
        return 0.0
    return sum(camera_tracked(dep, o, window, delta) for o in obstacles) / len(obstacles)


# --- our method -----------------------------------------------------------

def line_tracks(lines: np.ndarray, o: Obstacle, window, delta, eps_match) -> bool:
    pts = centers_at(o, window_times(window, delta))
    d = np.abs(lines[:, :2] @ pts.T + lines[:, 2:3])
    return bool((d.max(axis=1) <= eps_match).any())


def tracked_obstacles(trajectories, obstacles, window, delta, eps_match=2.0) -> List[bool]:
    if eps_match <= 0:
        raise ValueError("eps_match must be positive")
    lines = np.array([c.line for c in trajectories], dtype=float).reshape(-1, 3)
    if not len(lines):
        return [False] * len(obstacles)
    return [line_tracks(lines, o, window, delta, eps_match) for o in obstacles]


def tracking_capability_ours(trajectories, obstacles, window, delta, eps_match=2.0) -> float:
    """Fraction of obstacles whose sampled centres all stay within
    ``eps_match`` of one reported line."""
    if not obstacles:
        return 0.0
    flags = tracked_obstacles(trajectories, obstacles, window, delta, eps_match)
    return sum(flags) / len(obstacles)


def handoff_performance(decisions, world: World, outcome) -> Optional[float]:
    """Share of actually-blocked active links that were moved to an mmWave
    station whose new link stays clear for the whole implementation phase.

    Returns None when no active link is actually blocked.
    """
    blocked = [l for l in world.active if outcome[l.key]]
    if not blocked:
        return None
    by_ue = {d.ue: d for d in decisions}
    mm_ids = {s.id for s in world.stations if s.kind is StationKind.MMWAVE}
    new_links = []
    for l in blocked:
        d = by_ue.get(l.ue)
        if d is not None and d.to in mm_ids:
            new_links.append(make_link(world.ue(l.ue), world.station(d.to)))
    post = ground_truth_blockage(world, new_links)
    good = sum(1 for nl in new_links if not post[nl.key])
    return good / len(blocked)
