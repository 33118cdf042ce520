"""Experiment configuration files.

A config is an INI file. ``[scenario]`` holds the base scenario; each
experiment section (``[single]``, ``[confusion]``, ``[camera]``, ``[tau]``,
``[emit_ilp]``) may override any scenario key and adds its own keys.
``[run]`` holds ``seed`` and ``trials``; an experiment section may set its
own ``trials``. Unknown keys are rejected.
"""

import configparser
import enum
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .sim import ScenarioParams
from .world import EpochConfig, PathLossModel


class Experiment(enum.Enum):
    SINGLE = "single"
    CONFUSION = "confusion"
    CAMERA = "camera"
    TAU = "tau"
    EMIT_ILP = "emit_ilp"


class ConfigError(ValueError):
    pass


SCENARIO_KEYS = {
    "width": float, "height": float, "n_mmwave_bs": int, "n_ue": int, "n_obstacles": int,
    "v_min": float, "v_max": float, "half_width": float, "T": float, "tau": float,
    "delta": float, "K_max": int, "A": float, "B": float, "sigma": float, "max_loss": float,
    "staggered_arrivals": "bool", "check_feasibility": "bool", "eps_match": float,
    "world": str, "ilp_M": float,
}
EXTRA_KEYS = {
    Experiment.SINGLE: {},
    Experiment.EMIT_ILP: {},
    Experiment.CONFUSION: {"regimes": str},
    Experiment.CAMERA: {"counts": str, "camera_seed_offset": int},
    Experiment.TAU: {"taus": str, "trace": str, "trace_origin": str, "trace_start": float},
}


@dataclass
class Settings:
    """Resolved options for one experiment."""
    params: ScenarioParams
    check_feasibility: bool = True
    eps_match: float = 2.0
    ilp_M: float = 1e6
    world: Optional[str] = None
    extra: Dict[str, object] = field(default_factory=dict)


@dataclass
class RunConfig:
    experiment: Experiment
    settings: Settings
    trials: int = 1
    seed: int = 0
    out: Path = Path("out")
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")


def _convert(section, key, raw, kind, cp):
    try:
        if kind == "bool":
            return cp.getboolean(section, key)
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def _read(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if path is None:
        text = resources.files("obstrack").joinpath("data/defaults.cfg").read_text(encoding="utf-8")
        cp.read_string(text)
    else:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    return cp


def _settings(cp, experiment: Experiment, base_dir: Path) -> Settings:
    vals = {}
    allowed = dict(SCENARIO_KEYS)
    allowed.update(EXTRA_KEYS[experiment])
    for section in ("scenario", experiment.value):
        if not cp.has_section(section):
            continue
        for key, raw in cp[section].items():
            if section != "scenario" and key == "trials":
                continue
            if section == "scenario" and key not in SCENARIO_KEYS:
                raise ConfigError(f"[scenario] unknown key {key!r}")
            if section != "scenario" and key not in allowed:
                raise ConfigError(f"[{section}] unknown key {key!r}")
            vals[key] = _convert(section, key, raw, allowed[key], cp)
    d = ScenarioParams()
    try:
        epoch = EpochConfig(vals.get("T", d.epoch.T), vals.get("tau", d.epoch.tau),
                            vals.get("delta", d.epoch.delta), vals.get("K_max", d.epoch.K_max))
        pl = PathLossModel(vals.get("A", d.pl.A), vals.get("B", d.pl.B),
                           vals.get("sigma", d.pl.sigma), vals.get("max_loss", d.pl.max_loss))
        params = ScenarioParams(
            n_mmwave_bs=vals.get("n_mmwave_bs", d.n_mmwave_bs), n_ue=vals.get("n_ue", d.n_ue),
            n_obstacles=vals.get("n_obstacles", d.n_obstacles), v_min=vals.get("v_min", d.v_min),
            v_max=vals.get("v_max", d.v_max), half_width=vals.get("half_width", d.half_width),
            area=(vals.get("width", d.area[0]), vals.get("height", d.area[1])),
            epoch=epoch, pl=pl, staggered_arrivals=vals.get("staggered_arrivals", False))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    world = vals.get("world")
    if world:
        world = str((base_dir / world).resolve())
    extra = {k: vals[k] for k in EXTRA_KEYS[experiment] if k in vals}
    if extra.get("trace"):
        extra["trace"] = str((base_dir / extra["trace"]).resolve())
    return Settings(params, vals.get("check_feasibility", True), vals.get("eps_match", 2.0),
                    vals.get("ilp_M", 1e6), world, extra)


def load_run_config(experiment, path=None, seed=None, trials=None, out="out", jobs=1) -> RunConfig:
    """Build a RunConfig from a config file (the shipped ``defaults.cfg`` when
    ``path`` is None); command-line values override ``[run]``."""
    experiment = Experiment(experiment)
    cp = _read(path)
    base_dir = Path(path).resolve().parent if path else Path.cwd()
    run = dict(cp["run"]) if cp.has_section("run") else {}
    if cp.has_option(experiment.value, "trials"):
        run["trials"] = cp[experiment.value]["trials"]
    settings = _settings(cp, experiment, base_dir)
    try:
        seed = int(run.get("seed", 0)) if seed is None else int(seed)
        trials = int(run.get("trials", 1)) if trials is None else int(trials)
    except ValueError as exc:
        raise ConfigError(f"[run] {exc}") from None
    return RunConfig(experiment, settings, trials, seed, Path(out), jobs)


def parse_int_list(spec: str) -> List[int]:
    """``"5,6,7"`` or ``"0:400:25"`` (inclusive range with step)."""
    spec = spec.strip()
    if ":" in spec:
        lo, hi, step = (int(v) for v in spec.split(":"))
        return list(range(lo, hi + 1, step))
    return [int(v) for v in spec.split(",") if v.strip()]


def parse_regimes(spec: str) -> List[Tuple[str, int]]:
    """``"A:30, B:300"`` -> [("A", 30), ("B", 300)]."""
    out = []
    for item in filter(None, (s.strip() for s in spec.split(","))):
        name, _, n = item.partition(":")
        out.append((name.strip(), int(n)))
    return out
