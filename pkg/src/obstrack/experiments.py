"""End-to-end epochs and the reproduction sweeps.

Trial ``i`` of a run with seed ``s`` uses world seed ``s + i``, so every
sweep point sees the same worlds (common random numbers) and trials can run
in any order or in parallel. All CSV floats are written with ``repr``; the
same config and seed give byte-identical files.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .config import Experiment, RunConfig, Settings, parse_int_list, parse_regimes
from .evaluation import (ConfusionMatrix, Metrics, confusion, deploy_cameras, camera_tracked,
                         handoff_performance, metrics, tracked_obstacles)
from .geom import EPS_PT, line_from_normal
from .handoff import HandoffDecision, at_risk, propose_handoffs, write_decisions_csv
from .ilp import build_ilp, emit_lp
from .sim import (DiscoveryLog, EpochOutcome, generate_scenario, ground_truth_blockage,
                  load_trace, run_discovery, write_discovery_csv, write_outcome_csv)
from .track import CandidateLine, TrajectorySet, track_per_bs
from .world import World, centers_at, load_world, save_world

SWEEP_HEADER = ["sweep_param", "value", "accuracy", "sensitivity", "precision",
                "handoff_perf", "tracking_ours", "tracking_camera"]


@dataclass
class EpochResult:
    world: World
    log: DiscoveryLog
    trajectories: TrajectorySet
    decisions: List[HandoffDecision]
    predicted: Dict
    outcome: EpochOutcome
    cm: ConfusionMatrix
    metrics: Optional[Metrics]
    handoff_perf: Optional[float]
    tracked: List[bool] = field(default_factory=list)

    @property
    def tracking(self) -> Optional[float]:
        return sum(self.tracked) / len(self.tracked) if self.tracked else None


def run_epoch(world: World, check_feasibility=True, eps_match=2.0) -> EpochResult:
    """Discover, track, hand off and score one epoch."""
    log = run_discovery(world)
    traj = track_per_bs(log)
    decisions = propose_handoffs(world.active, traj, world.stations, world.pl,
                                 world.zeta, check_feasibility)
    risky = {l.key for l in at_risk(world.active, traj)}
    predicted = {l.key: l.key in risky for l in world.active}
    outcome = ground_truth_blockage(world, world.active)
    cm = confusion(predicted, outcome.actual)
    window = (0.0, world.epoch.tau)
    tracked = tracked_obstacles(traj, world.obstacles, window, world.epoch.delta, eps_match)
    return EpochResult(world, log, traj, decisions, predicted, outcome, cm,
                       metrics(cm) if cm.total else None,
                       handoff_performance(decisions, world, outcome), tracked)


def camera_trajectories(world: World, tracked_flags) -> TrajectorySet:
    """Exact lines of the camera-tracked obstacles, through their positions
    at 0 and tau (horizontal through the position if the obstacle did not
    move)."""
    out = []
    for o, ok in zip(world.obstacles, tracked_flags):
        if not ok:
            continue
        p0, p1 = centers_at(o, [0.0, world.epoch.tau])
        d = p1 - p0
        normal = (-d[1], d[0]) if math.hypot(*d) > EPS_PT else (0.0, 1.0)
        out.append(CandidateLine(line_from_normal(p0, normal), ("camera", o.id)))
    return TrajectorySet(out)


def _mean(values):
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([v if isinstance(v, str) else _fmt(v) for v in r])


def _gen_label(c: CandidateLine) -> str:
    if c.is_fallback:
        return f"fallback:{c.gen.link_index}"
    return f"{c.gen[0]}:{c.gen[1]}" if c.gen[0] == "camera" else f"ues:{c.gen[0]}-{c.gen[1]}"


def _map(fn, args, jobs):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, args, chunksize=max(1, len(args) // (4 * jobs))))
    return [fn(a) for a in args]


def _world_for(settings: Settings, seed: int) -> World:
    if settings.world:
        return load_world(settings.world)
    return generate_scenario(settings.params, seed)


# --- single epoch ---------------------------------------------------------

def run_single(cfg: RunConfig) -> Dict[str, Path]:
    s = cfg.settings
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    world = _world_for(s, cfg.seed)
    res = run_epoch(world, s.check_feasibility, s.eps_match)
    paths = {k: out / f"{k}.{'ini' if k == 'world' else 'csv'}"
             for k in ("world", "discovery", "outcome", "trajectories", "decisions",
                       "confusion", "summary")}
    save_world(world, paths["world"])
    write_discovery_csv(res.log, paths["discovery"])
    write_outcome_csv(res.outcome, paths["outcome"])
    _write_rows(paths["trajectories"], ["a", "b", "c", "generator"],
                [(c.line.a, c.line.b, c.line.c, _gen_label(c)) for c in res.trajectories])
    write_decisions_csv(res.decisions, paths["decisions"])
    _write_rows(paths["confusion"], ["tp", "fp", "fn", "tn"],
                [(res.cm.tp, res.cm.fp, res.cm.fn, res.cm.tn)])
    m = res.metrics
    _write_rows(paths["summary"], SWEEP_HEADER,
                [("seed", cfg.seed, m.accuracy if m else None, m.sensitivity if m else None,
                  m.precision if m else None, res.handoff_perf, res.tracking, None)])
    return paths


# --- confusion matrices ---------------------------------------------------

def _confusion_trial(args):
    params, seed, check, eps = args
    res = run_epoch(generate_scenario(params, seed), check, eps)
    pct = res.cm.percentages() if res.cm.total else None
    m = res.metrics
    return (len(res.log), pct, m, res.handoff_perf, res.tracking)


def confusion_sweep(cfg: RunConfig):
    """Table-style confusion matrices, one per UE-density regime.

    Percentages and metrics are per-epoch values averaged over epochs;
    epochs without any mmWave link are skipped.
    """
    s = cfg.settings
    regimes = parse_regimes(s.extra.get("regimes", "A:30, B:300"))
    table, sweep = [], []
    for name, n_ue in regimes:
        params = replace(s.params, n_ue=n_ue)
        args = [(params, cfg.seed + i, s.check_feasibility, s.eps_match) for i in range(cfg.trials)]
        results = [r for r in _map(_confusion_trial, args, cfg.jobs) if r[1] is not None]
        pcts = np.array([[p.tp, p.fp, p.fn, p.tn] for _, p, *_ in results])
        fails = [r[0] for r in results]
        ms = [r[2] for r in results]
        acc = _mean(m.accuracy for m in ms)
        sens = _mean(m.sensitivity for m in ms)
        prec = _mean(m.precision for m in ms)
        hp = _mean(r[3] for r in results)
        tr = _mean(r[4] for r in results)
        table.append((name, n_ue, len(results), float(np.mean(fails)), *pcts.mean(axis=0), acc))
        sweep.append(("n_ue", n_ue, acc, sens, prec, hp, tr, None))
    return table, sweep


CONFUSION_HEADER = ["regime", "n_ue", "epochs", "mean_failed_links", "tp_pct", "fp_pct",
                    "fn_pct", "tn_pct", "accuracy"]


# --- camera sweep ---------------------------------------------------------

def _camera_trial(args):
    params, seed, counts, cam_seed, check, eps = args
    world = generate_scenario(params, seed)
    res = run_epoch(world, check, eps)
    rng = np.random.default_rng([cam_seed, seed])
    full = deploy_cameras(rng, max(counts), world.area)
    window = (0.0, world.epoch.tau)
    cam_track, cam_hp = [], []
    for n in counts:
        dep = full.first(n)
        flags = [camera_tracked(dep, o, window, world.epoch.delta) for o in world.obstacles]
        cam_track.append(sum(flags) / len(flags) if flags else None)
        traj = camera_trajectories(world, flags)
        dec = propose_handoffs(world.active, traj, world.stations, world.pl, world.zeta, check)
        cam_hp.append(handoff_performance(dec, world, res.outcome))
    m = res.metrics
    return (res.tracking, res.handoff_perf, cam_track, cam_hp,
            m.accuracy if m else None, m.sensitivity if m else None, m.precision if m else None)


def camera_sweep(cfg: RunConfig):
    """Tracking capability and handoff performance against camera count.

    Each trial draws one deployment of the largest count and uses its
    prefixes for smaller counts, so adding cameras only ever adds coverage.
    """
    s = cfg.settings
    counts = parse_int_list(s.extra.get("counts", "0:400:25"))
    cam_seed = int(s.extra.get("camera_seed_offset", 7919))
    args = [(s.params, cfg.seed + i, counts, cam_seed, s.check_feasibility, s.eps_match)
            for i in range(cfg.trials)]
    results = _map(_camera_trial, args, cfg.jobs)
    ours_tr = _mean(r[0] for r in results)
    ours_hp = _mean(r[1] for r in results)
    acc = _mean(r[4] for r in results)
    sens = _mean(r[5] for r in results)
    prec = _mean(r[6] for r in results)
    rows = []
    for j, n in enumerate(counts):
        cam_tr = _mean(r[2][j] for r in results)
        cam_hp = _mean(r[3][j] for r in results)
        rows.append(("cameras", n, acc, sens, prec, ours_hp, ours_tr, cam_tr))
    handoff_rows = [("cameras", n, ours_hp, _mean(r[3][j] for r in results))
                    for j, n in enumerate(counts)]
    return rows, handoff_rows


CAMERA_HANDOFF_HEADER = ["sweep_param", "value", "handoff_ours", "handoff_camera"]


# --- discovery-time sweep -------------------------------------------------

def _tau_trial(args):
    params, seed, obstacles, check, eps = args
    world = generate_scenario(params, seed)
    if obstacles is not None:
        world = replace(world, obstacles=tuple(obstacles))
    res = run_epoch(world, check, eps)
    m = res.metrics
    return (m.accuracy if m else None, m.sensitivity if m else None,
            m.precision if m else None, res.handoff_perf, res.tracking, len(res.log))


def _trace_obstacles(s: Settings):
    trace = s.extra.get("trace")
    if not trace:
        return None
    origin = s.extra.get("trace_origin")
    if origin:
        origin = tuple(float(v) for v in origin.split(","))
    start = float(s.extra.get("trace_start", 0.0))
    return load_trace(trace, origin, (start, start + s.params.epoch.T), s.params.half_width)


def tau_sweep(cfg: RunConfig):
    """Accuracy, sensitivity and precision against discovery time tau."""
    s = cfg.settings
    taus = parse_int_list(s.extra.get("taus", "5,6,7,8,9,10"))
    obstacles = _trace_obstacles(s)
    rows = []
    for tau in taus:
        params = replace(s.params, epoch=replace(s.params.epoch, tau=float(tau)))
        args = [(params, cfg.seed + i, obstacles, s.check_feasibility, s.eps_match)
                for i in range(cfg.trials)]
        results = _map(_tau_trial, args, cfg.jobs)
        rows.append(("tau", tau, _mean(r[0] for r in results), _mean(r[1] for r in results),
                     _mean(r[2] for r in results), _mean(r[3] for r in results),
                     _mean(r[4] for r in results), None))
    return rows


# --- ILP emission ---------------------------------------------------------

def emit_ilp_files(cfg: RunConfig) -> List[Path]:
    """One ``.lp`` file per station that saw failures in the discovery phase."""
    s = cfg.settings
    cfg.out.mkdir(parents=True, exist_ok=True)
    world = _world_for(s, cfg.seed)
    log = run_discovery(world)
    write_discovery_csv(log, cfg.out / "discovery.csv")
    paths = []
    for bs in sorted(log.per_bs):
        model = build_ilp(log.per_bs[bs], world.epoch.K_max, s.ilp_M)
        p = cfg.out / f"ilp_bs{bs}.lp"
        p.write_text(emit_lp(model), encoding="utf-8")
        paths.append(p)
    return paths


def run(cfg: RunConfig) -> List[Path]:
    """Run the configured experiment and write its outputs under ``cfg.out``."""
    cfg.out.mkdir(parents=True, exist_ok=True)
    exp = cfg.experiment
    if exp is Experiment.SINGLE:
        return list(run_single(cfg).values())
    if exp is Experiment.EMIT_ILP:
        return emit_ilp_files(cfg)
    if exp is Experiment.CONFUSION:
        table, sweep = confusion_sweep(cfg)
        _write_rows(cfg.out / "confusion.csv", CONFUSION_HEADER, table)
        _write_rows(cfg.out / "confusion_sweep.csv", SWEEP_HEADER, sweep)
        return [cfg.out / "confusion.csv", cfg.out / "confusion_sweep.csv"]
    if exp is Experiment.CAMERA:
        rows, handoff_rows = camera_sweep(cfg)
        _write_rows(cfg.out / "camera_sweep.csv", SWEEP_HEADER, rows)
        _write_rows(cfg.out / "camera_handoff.csv", CAMERA_HANDOFF_HEADER, handoff_rows)
        return [cfg.out / "camera_sweep.csv", cfg.out / "camera_handoff.csv"]
    if exp is Experiment.TAU:
        _write_rows(cfg.out / "tau_sweep.csv", SWEEP_HEADER, tau_sweep(cfg))
        return [cfg.out / "tau_sweep.csv"]
    raise ValueError(f"unknown experiment {exp}")
