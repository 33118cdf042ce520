"""Epoch engine: scenario generation, slot-sampled blockage, discovery logs,
implementation-phase ground truth and trace replay.

Time is discretised into slots ``0, delta, 2*delta, ...``; slot ``i`` is at
``i * delta``. The discovery phase is slots ``0..tau_slot`` inclusive and
the implementation phase is ``tau_slot+1..n_slots``.
"""

import csv
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .geom import EPS_PT, Point2, Segment, TimedPoint, squares_hit_segments
from .world import (BaseStation, BlockedLink, EpochConfig, LinearMotion, Link, Obstacle,
                    PathLossModel, PolylineMotion, StationKind, UserEquipment, World,
                    centers_at, link_feasible, make_link)

EARTH_RADIUS = 6371008.8


@dataclass(frozen=True)
class ScenarioParams:
    n_mmwave_bs: int = 2
    n_ue: int = 50
    n_obstacles: int = 5
    v_min: float = 0.0
    v_max: float = 10.0
    half_width: float = 0.5
    area: Tuple[float, float] = (100.0, 100.0)
    epoch: EpochConfig = EpochConfig()
    pl: PathLossModel = PathLossModel()
    # draw UE link-request times uniformly over [0, T] instead of all at t=0
    staggered_arrivals: bool = False

    def __post_init__(self):
        if min(self.n_mmwave_bs, self.n_ue, self.n_obstacles) < 0:
            raise ValueError("counts must be nonnegative")
        if not 0 <= self.v_min <= self.v_max:
            raise ValueError("need 0 <= v_min <= v_max")
        if self.half_width < 0:
            raise ValueError("half_width must be nonnegative")


@dataclass
class DiscoveryLog:
    per_bs: Dict[int, List[BlockedLink]] = field(default_factory=dict)

    def __len__(self):
        return sum(len(v) for v in self.per_bs.values())

    def all(self) -> List[BlockedLink]:
        return [bl for bs in sorted(self.per_bs) for bl in self.per_bs[bs]]


@dataclass
class EpochOutcome:
    actual: Dict[Tuple[int, int], bool] = field(default_factory=dict)

    def __getitem__(self, key):
        return self.actual[key]

    def __len__(self):
        return len(self.actual)


def associate(ue: UserEquipment, stations, pl, shadowing) -> BaseStation:
    """Nearest mmWave station with a feasible path loss, else the LTE station.

    Ties on distance go to the smaller station id.
    """
    best = None
    for bs in sorted(stations, key=lambda s: s.id):
        if bs.kind is not StationKind.MMWAVE:
            continue
        seg = Segment(ue.pos, bs.pos)
        if seg.length <= EPS_PT or not link_feasible(pl, seg, shadowing.get((ue.id, bs.id), 0.0)):
            continue
        if best is None or seg.length < best[0]:
            best = (seg.length, bs)
    if best is None:
        return next(s for s in stations if s.kind is StationKind.LTE)
    return best[1]


def associate_all(ue_xy: np.ndarray, bs_xy: np.ndarray, zeta: np.ndarray,
                  pl: PathLossModel) -> np.ndarray:
    """Vectorised ``associate`` for mmWave stations ``1..n`` at ``bs_xy``.

    Returns, per UE, the chosen station id, or 0 for LTE.
    """
    ue_xy = np.asarray(ue_xy, dtype=float).reshape(-1, 2)
    bs_xy = np.asarray(bs_xy, dtype=float).reshape(-1, 2)
    if not len(bs_xy) or not len(ue_xy):
        return np.zeros(len(ue_xy), dtype=int)
    d = np.hypot(ue_xy[:, None, 0] - bs_xy[None, :, 0], ue_xy[:, None, 1] - bs_xy[None, :, 1])
    with np.errstate(divide="ignore"):
        loss = pl.A + 10.0 * pl.B * np.log10(d) + zeta
    ok = (d > EPS_PT) & (loss <= pl.max_loss)
    masked = np.where(ok, d, np.inf)
    # argmin keeps the first (smallest id) on ties
    best = np.argmin(masked, axis=1)
    return np.where(ok.any(axis=1), best + 1, 0)


def generate_scenario(params: ScenarioParams, seed: int) -> World:
    """Random world: stations, UEs and obstacle starts uniform over the area,
    headings uniform over [0, 2*pi), speeds uniform over [v_min, v_max]."""
    rng = np.random.default_rng(seed)
    W, H = params.area
    bs_xy = rng.uniform((0, 0), (W, H), size=(params.n_mmwave_bs, 2))
    ue_xy = rng.uniform((0, 0), (W, H), size=(params.n_ue, 2))
    if params.staggered_arrivals:
        arrivals = rng.uniform(0.0, params.epoch.T, size=params.n_ue)
        # snap to slots so a link joins at a well-defined slot
        arrivals = np.ceil(arrivals / params.epoch.delta - 1e-9) * params.epoch.delta
    else:
        arrivals = np.zeros(params.n_ue)
    ob_xy = rng.uniform((0, 0), (W, H), size=(params.n_obstacles, 2))
    heading = rng.uniform(0.0, 2 * math.pi, size=params.n_obstacles)
    speed = rng.uniform(params.v_min, params.v_max, size=params.n_obstacles)
    zeta = rng.normal(0.0, params.pl.sigma, size=(params.n_ue, params.n_mmwave_bs))

    stations = [BaseStation(0, Point2(W / 2, H / 2), StationKind.LTE)]
    stations += [BaseStation(i + 1, Point2(float(x), float(y))) for i, (x, y) in enumerate(bs_xy)]
    ues = [UserEquipment(i, Point2(float(x), float(y)), float(a))
           for i, ((x, y), a) in enumerate(zip(ue_xy, arrivals))]
    obstacles = [Obstacle(i, LinearMotion(Point2(float(x), float(y)),
                                          (float(v * math.cos(h)), float(v * math.sin(h)))),
                          params.half_width)
                 for i, ((x, y), h, v) in enumerate(zip(ob_xy, heading, speed))]
    shadowing = {(u.id, b + 1): float(zeta[u.id, b])
                 for u in ues for b in range(params.n_mmwave_bs)}
    choice = associate_all(ue_xy, bs_xy, zeta, params.pl)
    active = [make_link(ue, stations[b]) for ue, b in zip(ues, choice) if b]
    return World(area=(float(W), float(H)), stations=tuple(stations), ues=tuple(ues),
                 obstacles=tuple(obstacles), active=tuple(active), epoch=params.epoch,
                 pl=params.pl, seed=seed, shadowing=shadowing)


def _link_arrays(links):
    a = np.array([l.seg.a for l in links], dtype=float).reshape(-1, 2)
    b = np.array([l.seg.b for l in links], dtype=float).reshape(-1, 2)
    return a, b


def blocked_slots(w: World, links, first_slot: int, last_slot: int) -> np.ndarray:
    """Boolean (n_slots_in_range, len(links)) matrix: link blocked by any
    obstacle at each slot of ``first_slot..last_slot`` (inclusive), counting
    only slots at or after the UE's arrival."""
    slots = np.arange(first_slot, last_slot + 1)
    hit = np.zeros((len(slots), len(links)), dtype=bool)
    if not len(links) or not len(slots):
        return hit
    times = slots * w.epoch.delta
    seg_a, seg_b = _link_arrays(links)
    for o in w.obstacles:
        hit |= squares_hit_segments(centers_at(o, times), o.half_width, seg_a, seg_b)
    arrival = {u.id: u.arrival for u in w.ues}
    arr = np.array([arrival.get(l.ue, 0.0) for l in links])
    hit &= times[:, None] >= arr[None, :] - 1e-9
    return hit


def run_discovery(w: World) -> DiscoveryLog:
    """Per-station record of the links blocked during ``[0, tau]``, each with
    its earliest blocking slot."""
    links = list(w.active)
    hit = blocked_slots(w, links, 0, w.epoch.tau_slot)
    log = DiscoveryLog()
    any_hit = hit.any(axis=0)
    first = hit.argmax(axis=0)
    for j in np.flatnonzero(any_hit):
        link = links[j]
        log.per_bs.setdefault(link.bs, []).append(
            BlockedLink(link, w.epoch.slot_time(int(first[j]))))
    for bs in log.per_bs:
        log.per_bs[bs].sort(key=lambda bl: (bl.t_block, bl.link.ue))
    return log


def ground_truth_blockage(w: World, links) -> EpochOutcome:
    """Whether each link is blocked at any implementation-phase slot."""
    links = list(links)
    hit = blocked_slots(w, links, w.epoch.tau_slot + 1, w.epoch.n_slots)
    blocked = hit.any(axis=0)
    return EpochOutcome({l.key: bool(b) for l, b in zip(links, blocked)})


# --- constructed single-obstacle epochs -----------------------------------

def crossing_scenario(seed: int, n_links: int, area=(100.0, 100.0),
                      epoch: EpochConfig = EpochConfig(), v_range=(1.0, 10.0),
                      pl: PathLossModel = PathLossModel(sigma=0.0)) -> World:
    """One zero-width linearly moving obstacle and one mmWave station, with
    UEs placed so that each UE-station link is crossed by the obstacle centre
    exactly at a distinct discovery-phase slot.

    Each UE sits on the ray from the station through the crossing point,
    beyond it, at a uniformly drawn position inside the area.
    """
    rng = np.random.default_rng(seed)
    W, H = area
    margin = 0.05 * min(W, H)
    for _ in range(1000):
        bs_pos = rng.uniform((margin, margin), (W - margin, H - margin))
        start = rng.uniform((margin, margin), (W - margin, H - margin))
        v = rng.uniform(*v_range)
        h = rng.uniform(0, 2 * math.pi)
        vel = np.array([v * math.cos(h), v * math.sin(h)])
        k = epoch.tau_slot
        slots = np.sort(rng.choice(np.arange(0, k + 1), size=min(n_links, k + 1), replace=False))
        pts = start + np.outer(slots * epoch.delta, vel)
        if not ((pts > 0).all() and (pts[:, 0] < W).all() and (pts[:, 1] < H).all()):
            continue
        ues, ok = [], True
        for i, p in enumerate(pts):
            d = p - bs_pos
            norm = np.hypot(*d)
            if norm < 1.0:
                ok = False
                break
            # largest s with bs + s*d inside the area
            s_max = min(((W if dx > 0 else 0.0) - bx) / dx if dx != 0 else math.inf
                        for dx, bx in ((d[0], bs_pos[0]), (d[1], bs_pos[1])))
            s_max = min(s_max, pl.max_range() / norm)
            if s_max <= 1.05:
                ok = False
                break
            s = rng.uniform(1.05, s_max)
            u = bs_pos + s * d
            ues.append(UserEquipment(i, Point2(float(u[0]), float(u[1]))))
        if not ok:
            continue
        stations = (BaseStation(0, Point2(W / 2, H / 2), StationKind.LTE),
                    BaseStation(1, Point2(float(bs_pos[0]), float(bs_pos[1]))))
        ob = Obstacle(0, LinearMotion(Point2(float(start[0]), float(start[1])),
                                      (float(vel[0]), float(vel[1]))), 0.0)
        active = tuple(make_link(u, stations[1]) for u in ues)
        return World(area=(float(W), float(H)), stations=stations, ues=tuple(ues),
                     obstacles=(ob,), active=active, epoch=epoch, pl=pl, seed=seed)
    raise RuntimeError("could not place a crossing scenario; area too small")


# --- traces ---------------------------------------------------------------

class TraceError(ValueError):
    pass


def load_trace(path, area_origin: Optional[Tuple[float, float]] = None,
               window: Tuple[float, float] = (0.0, 12.0), half_width: float = 0.5) -> List[Obstacle]:
    """Read a trace CSV into one polyline obstacle per trace id.

    The header selects the coordinate mode: ``id,t,x,y`` gives positions in
    metres, ``id,t,lat,lon`` gives degrees that are projected
    equirectangularly about ``area_origin`` (lat, lon). Samples outside the
    window are dropped except for the nearest one on each side, which is
    used to interpolate the window ends; times are shifted so the window
    starts at t = 0. Every trace must span the whole window.
    """
    t0, t1 = window
    samples = defaultdict(list)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or not "".join(row).strip():
                continue
            if header is None:
                header = [h.strip().lower() for h in row]
                if header not in (["id", "t", "x", "y"], ["id", "t", "lat", "lon"]):
                    raise TraceError(f"line {lineno}: unknown header {row}")
                continue
            if len(row) != 4:
                raise TraceError(f"line {lineno}: expected 4 fields, got {len(row)}")
            try:
                t, c1, c2 = (float(v) for v in row[1:])
            except ValueError as exc:
                raise TraceError(f"line {lineno}: {exc}") from None
            samples[row[0].strip()].append((t, c1, c2))
    if header is None:
        return []
    geo = header[2] == "lat"
    if geo and area_origin is None:
        raise TraceError("lat/lon traces need an area_origin")

    def to_xy(c1, c2):
        if not geo:
            return c1, c2
        lat0, lon0 = area_origin
        x = math.radians(c2 - lon0) * EARTH_RADIUS * math.cos(math.radians(lat0))
        y = math.radians(c1 - lat0) * EARTH_RADIUS
        return x, y

    obstacles = []
    for idx, key in enumerate(sorted(samples, key=_trace_key)):
        rows = sorted(samples[key])
        if len(rows) < 2:
            raise TraceError(f"trace {key!r}: need at least 2 samples, got {len(rows)}")
        ts = np.array([r[0] for r in rows])
        xy = np.array([to_xy(r[1], r[2]) for r in rows])
        if ts[0] > t0 or ts[-1] < t1:
            raise TraceError(f"trace {key!r}: samples do not span the window [{t0}, {t1}]")
        # window edges are interpolated from the samples that straddle them
        keep_t = sorted({t0, t1, *(float(t) for t in ts if t0 < t < t1)})
        xs = np.interp(keep_t, ts, xy[:, 0])
        ys = np.interp(keep_t, ts, xy[:, 1])
        wps = tuple(TimedPoint(Point2(float(x), float(y)), float(t - t0))
                    for t, x, y in zip(keep_t, xs, ys))
        obstacles.append(Obstacle(idx, PolylineMotion(wps), half_width))
    return obstacles


def _trace_key(key):
    return (0, int(key), key) if key.lstrip("-").isdigit() else (1, 0, key)


# --- CSV export -----------------------------------------------------------

def write_discovery_csv(log: DiscoveryLog, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["bs_id", "ue_id", "t_block"])
        for bs in sorted(log.per_bs):
            for bl in log.per_bs[bs]:
                wr.writerow([bs, bl.link.ue, repr(bl.t_block)])


def write_outcome_csv(outcome: EpochOutcome, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["ue_id", "bs_id", "actual_blocked"])
        for (ue, bs), val in sorted(outcome.actual.items()):
            wr.writerow([ue, bs, int(val)])
