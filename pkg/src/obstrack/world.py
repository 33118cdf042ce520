"""Scenario description: stations, UEs, moving obstacles, links, epoch timing
and the log-distance path-loss model.

A World is an immutable value. It can be written to and read back from an
INI-style scenario file (see ``save_world`` / ``load_world``); the round
trip is exact because floats are written with ``repr``.
"""

import configparser
import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .geom import Point2, Segment, TimedPoint, square_intersects_segment


class StationKind(enum.Enum):
    MMWAVE = "mmwave"
    LTE = "lte"


@dataclass(frozen=True)
class BaseStation:
    id: int
    pos: Point2
    kind: StationKind = StationKind.MMWAVE


@dataclass(frozen=True)
class UserEquipment:
    id: int
    pos: Point2
    # link request time; 0 for UEs present from the start of the epoch
    arrival: float = 0.0


@dataclass(frozen=True)
class LinearMotion:
    start: Point2
    velocity: Tuple[float, float]

    @property
    def speed(self):
        return math.hypot(*self.velocity)


@dataclass(frozen=True)
class PolylineMotion:
    waypoints: Tuple[TimedPoint, ...]

    def __post_init__(self):
        ts = [w.t for w in self.waypoints]
        if len(ts) < 2:
            raise ValueError("polyline motion needs at least two waypoints")
        if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
            raise ValueError("polyline waypoint times must be strictly increasing")


Motion = Union[LinearMotion, PolylineMotion]


@dataclass(frozen=True)
class Obstacle:
    id: int
    motion: Motion
    half_width: float = 0.5

    def __post_init__(self):
        if self.half_width < 0:
            raise ValueError("half_width must be nonnegative")


@dataclass(frozen=True)
class Link:
    ue: int
    bs: int
    seg: Segment

    @property
    def key(self):
        return (self.ue, self.bs)


@dataclass(frozen=True)
class BlockedLink:
    link: Link
    t_block: float


@dataclass(frozen=True)
class EpochConfig:
    T: float = 5.0
    tau: float = 3.0
    delta: float = 0.1
    K_max: int = 10

    def __post_init__(self):
        if not 0 < self.tau < self.T:
            raise ValueError(f"need 0 < tau < T, got tau={self.tau}, T={self.T}")
        if not 0 < self.delta <= self.tau:
            raise ValueError(f"need 0 < delta <= tau, got delta={self.delta}")
        for name in ("T", "tau"):
            ratio = getattr(self, name) / self.delta
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"{name} must be an integer multiple of delta")
        if self.K_max < 1:
            raise ValueError("K_max must be >= 1")

    @property
    def n_slots(self) -> int:
        """Index of the last slot; slots are 0..n_slots at times i*delta."""
        return int(round(self.T / self.delta))

    @property
    def tau_slot(self) -> int:
        return int(round(self.tau / self.delta))

    def slot_time(self, i):
        return i * self.delta


@dataclass(frozen=True)
class PathLossModel:
    A: float = 61.4
    B: float = 2.0
    sigma: float = 5.8
    max_loss: float = 120.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.B <= 0:
            raise ValueError("B must be positive")

    def max_range(self, zeta=0.0):
        """Largest link length that stays within ``max_loss``."""
        return 10 ** ((self.max_loss - self.A - zeta) / (10 * self.B))


@dataclass(frozen=True)
class World:
    area: Tuple[float, float]
    stations: Tuple[BaseStation, ...]
    ues: Tuple[UserEquipment, ...]
    obstacles: Tuple[Obstacle, ...]
    active: Tuple[Link, ...]
    epoch: EpochConfig = EpochConfig()
    pl: PathLossModel = PathLossModel()
    seed: int = 0
    # shadowing term per (ue id, mmWave bs id), drawn once per epoch
    shadowing: Dict[Tuple[int, int], float] = field(default_factory=dict, compare=True)

    def __post_init__(self):
        n_lte = sum(1 for s in self.stations if s.kind is StationKind.LTE)
        if n_lte != 1:
            raise ValueError(f"world needs exactly one LTE station, found {n_lte}")
        ids = [s.id for s in self.stations]
        if len(set(ids)) != len(ids):
            raise ValueError("station ids must be unique")
        ue_ids = [u.id for u in self.ues]
        if len(set(ue_ids)) != len(ue_ids):
            raise ValueError("UE ids must be unique")
        W, H = self.area
        for thing in (*self.stations, *self.ues):
            if not (0 <= thing.pos.x <= W and 0 <= thing.pos.y <= H):
                raise ValueError(f"{type(thing).__name__} {thing.id} lies outside the area")
        ues = {u.id: u for u in self.ues}
        bss = {s.id: s for s in self.stations}
        for link in self.active:
            if link.ue not in ues or link.bs not in bss:
                raise ValueError(f"link {link.key} references unknown endpoints")
            if link.seg != Segment(ues[link.ue].pos, bss[link.bs].pos):
                raise ValueError(f"link {link.key} segment does not match its endpoints")

    @property
    def lte(self) -> BaseStation:
        return next(s for s in self.stations if s.kind is StationKind.LTE)

    @property
    def mmwave(self):
        return tuple(sorted((s for s in self.stations if s.kind is StationKind.MMWAVE),
                            key=lambda s: s.id))

    def station(self, bs_id) -> BaseStation:
        for s in self.stations:
            if s.id == bs_id:
                return s
        raise KeyError(bs_id)

    def ue(self, ue_id) -> UserEquipment:
        for u in self.ues:
            if u.id == ue_id:
                return u
        raise KeyError(ue_id)

    def zeta(self, ue_id, bs_id) -> float:
        return self.shadowing.get((ue_id, bs_id), 0.0)


def make_link(ue: UserEquipment, bs: BaseStation) -> Link:
    return Link(ue.id, bs.id, Segment(ue.pos, bs.pos))


def path_loss(pl: PathLossModel, d: float, zeta: float = 0.0) -> float:
    if d <= 0:
        raise ValueError(f"path loss needs a positive distance, got {d}")
    return pl.A + 10.0 * pl.B * math.log10(d) + zeta


def link_feasible(pl: PathLossModel, seg: Segment, zeta: float = 0.0) -> bool:
    return path_loss(pl, seg.length, zeta) <= pl.max_loss


def obstacle_center_at(o: Obstacle, t: float, T: Optional[float] = None) -> Point2:
    """Centre of the obstacle footprint at time ``t`` (seconds from epoch start)."""
    if t < 0 or (T is not None and t > T + 1e-12):
        raise ValueError(f"time {t} outside the epoch")
    m = o.motion
    if isinstance(m, LinearMotion):
        return Point2(m.start.x + t * m.velocity[0], m.start.y + t * m.velocity[1])
    wps = m.waypoints
    if t < wps[0].t - 1e-12 or t > wps[-1].t + 1e-12:
        raise ValueError(f"time {t} not bracketed by waypoints [{wps[0].t}, {wps[-1].t}]")
    ts = [w.t for w in wps]
    i = int(np.searchsorted(ts, t, side="right")) - 1
    i = min(max(i, 0), len(wps) - 2)
    w0, w1 = wps[i], wps[i + 1]
    f = (t - w0.t) / (w1.t - w0.t)
    return Point2(w0.p.x + f * (w1.p.x - w0.p.x), w0.p.y + f * (w1.p.y - w0.p.y))


def centers_at(o: Obstacle, times) -> np.ndarray:
    """Vectorised ``obstacle_center_at``: (len(times), 2) array."""
    times = np.asarray(times, dtype=float)
    m = o.motion
    if isinstance(m, LinearMotion):
        return np.column_stack([m.start.x + times * m.velocity[0],
                                m.start.y + times * m.velocity[1]])
    ts = np.array([w.t for w in m.waypoints])
    if times.size and (times.min() < ts[0] - 1e-12 or times.max() > ts[-1] + 1e-12):
        raise ValueError("times not bracketed by waypoints")
    xs = np.array([w.p.x for w in m.waypoints])
    ys = np.array([w.p.y for w in m.waypoints])
    return np.column_stack([np.interp(times, ts, xs), np.interp(times, ts, ys)])


def is_blocked(o: Obstacle, t: float, link: Link) -> bool:
    return square_intersects_segment(obstacle_center_at(o, t), o.half_width, link.seg)


# --- scenario files -------------------------------------------------------

def _fmt(v):
    return repr(float(v))


def world_to_config(w: World) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["world"] = {"width": _fmt(w.area[0]), "height": _fmt(w.area[1]), "seed": str(w.seed)}
    cp["epoch"] = {"T": _fmt(w.epoch.T), "tau": _fmt(w.epoch.tau),
                   "delta": _fmt(w.epoch.delta), "K_max": str(w.epoch.K_max)}
    cp["pathloss"] = {"A": _fmt(w.pl.A), "B": _fmt(w.pl.B),
                      "sigma": _fmt(w.pl.sigma), "max_loss": _fmt(w.pl.max_loss)}
    for s in w.stations:
        cp[f"station.{s.id}"] = {"x": _fmt(s.pos.x), "y": _fmt(s.pos.y), "kind": s.kind.value}
    for u in w.ues:
        cp[f"ue.{u.id}"] = {"x": _fmt(u.pos.x), "y": _fmt(u.pos.y), "arrival": _fmt(u.arrival)}
    for o in w.obstacles:
        sec = {"half_width": _fmt(o.half_width)}
        if isinstance(o.motion, LinearMotion):
            sec.update(motion="linear", x=_fmt(o.motion.start.x), y=_fmt(o.motion.start.y),
                       vx=_fmt(o.motion.velocity[0]), vy=_fmt(o.motion.velocity[1]))
        else:
            sec.update(motion="polyline", waypoints="; ".join(
                f"{_fmt(wp.t)} {_fmt(wp.p.x)} {_fmt(wp.p.y)}" for wp in o.motion.waypoints))
        cp[f"obstacle.{o.id}"] = sec
    cp["links"] = {"active": ", ".join(f"{l.ue}-{l.bs}" for l in w.active)}
    cp["shadowing"] = {f"{u}-{b}": _fmt(z) for (u, b), z in sorted(w.shadowing.items())}
    return cp


def save_world(w: World, path):
    cp = world_to_config(w)
    with open(path, "w", encoding="utf-8") as fh:
        cp.write(fh)


def world_from_config(cp: configparser.ConfigParser) -> World:
    def need(section, key, conv=float):
        try:
            return conv(cp[section][key])
        except KeyError:
            raise ValueError(f"scenario is missing [{section}] {key}") from None
        except ValueError as exc:
            raise ValueError(f"bad value for [{section}] {key}: {exc}") from None

    stations, ues, obstacles = [], [], []
    for name in cp.sections():
        kind, _, ident = name.partition(".")
        if kind == "station":
            stations.append(BaseStation(int(ident), Point2(need(name, "x"), need(name, "y")),
                                        StationKind(cp[name].get("kind", "mmwave"))))
        elif kind == "ue":
            ues.append(UserEquipment(int(ident), Point2(need(name, "x"), need(name, "y")),
                                     float(cp[name].get("arrival", "0.0"))))
        elif kind == "obstacle":
            sec = cp[name]
            hw = float(sec.get("half_width", "0.5"))
            if sec.get("motion", "linear") == "linear":
                motion = LinearMotion(Point2(need(name, "x"), need(name, "y")),
                                      (need(name, "vx"), need(name, "vy")))
            else:
                wps = []
                for chunk in need(name, "waypoints", str).split(";"):
                    try:
                        t, x, y = (float(v) for v in chunk.split())
                    except ValueError:
                        raise ValueError(f"bad waypoint {chunk.strip()!r} in [{name}] waypoints") from None
                    wps.append(TimedPoint(Point2(x, y), t))
                motion = PolylineMotion(tuple(wps))
            obstacles.append(Obstacle(int(ident), motion, hw))
    by_ue = {u.id: u for u in ues}
    by_bs = {s.id: s for s in stations}
    active = []
    spec = cp["links"].get("active", "") if cp.has_section("links") else ""
    for item in filter(None, (s.strip() for s in spec.split(","))):
        try:
            u, b = (int(v) for v in item.split("-"))
            active.append(make_link(by_ue[u], by_bs[b]))
        except (ValueError, KeyError):
            raise ValueError(f"bad entry {item!r} in [links] active") from None
    shadowing = {}
    if cp.has_section("shadowing"):
        for key, val in cp["shadowing"].items():
            u, b = (int(v) for v in key.split("-"))
            shadowing[(u, b)] = float(val)
    epoch = EpochConfig(need("epoch", "T"), need("epoch", "tau"), need("epoch", "delta"),
                        need("epoch", "K_max", int))
    pl = PathLossModel(need("pathloss", "A"), need("pathloss", "B"),
                       need("pathloss", "sigma"), need("pathloss", "max_loss"))
    return World(area=(need("world", "width"), need("world", "height")),
                 stations=tuple(stations), ues=tuple(ues), obstacles=tuple(obstacles),
                 active=tuple(active), epoch=epoch, pl=pl,
                 seed=need("world", "seed", int), shadowing=shadowing)


def load_world(path) -> World:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    return world_from_config(cp)
