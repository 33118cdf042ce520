import csv
import subprocess
import sys

import pytest

from obstrack.cli import main
from obstrack.config import ConfigError, Experiment, load_run_config, parse_int_list, parse_regimes
from obstrack.experiments import SWEEP_HEADER, run

SMALL_CFG = """
[run]
seed = 5
trials = 3

[scenario]
n_ue = 20
n_obstacles = 4

[confusion]
regimes = A:10, B:40

[camera]
counts = 0:50:25

[tau]
width = 300
height = 300
n_mmwave_bs = 3
n_ue = 100
n_obstacles = 4
T = 8
staggered_arrivals = true
taus = 4,5,6
"""


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL_CFG)
    return p


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_shipped_defaults():
    cfg = load_run_config("confusion")
    assert cfg.trials == 500
    p = cfg.settings.params
    assert p.area == (100.0, 100.0) and p.n_mmwave_bs == 2 and p.half_width == 0.5
    assert (p.epoch.T, p.epoch.tau, p.v_min, p.v_max) == (5.0, 3.0, 0.0, 10.0)
    assert (p.pl.A, p.pl.B, p.pl.sigma, p.pl.max_loss) == (61.4, 2.0, 5.8, 120.0)
    tau = load_run_config("tau")
    assert tau.settings.params.area == (5000.0, 5000.0)
    assert tau.settings.params.epoch.T == 12.0 and tau.settings.params.n_obstacles == 15
    assert parse_int_list(tau.settings.extra["taus"]) == [5, 6, 7, 8, 9, 10]
    cam = load_run_config("camera")
    assert parse_int_list(cam.settings.extra["counts"]) == list(range(0, 401, 25))


def test_command_line_overrides(cfg_path):
    cfg = load_run_config("single", cfg_path, seed=9, trials=2, out="x")
    assert (cfg.seed, cfg.trials, str(cfg.out)) == (9, 2, "x")
    assert load_run_config("single", cfg_path).seed == 5


@pytest.mark.parametrize("text,field", [
    ("[scenario]\nbogus = 1\n", "bogus"),
    ("[scenario]\nn_ue = many\n", "n_ue"),
    ("[camera]\nregimes = A:1\n", "regimes"),
    ("[scenario]\nstaggered_arrivals = maybe\n", "staggered_arrivals"),
    ("[scenario]\ntau = 9\n", "tau"),
    ("[run]\ntrials = 0\n", "trials"),
])
def test_config_errors_name_the_field(tmp_path, text, field):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(ConfigError, match=field):
        load_run_config("camera", p)


def test_parsers():
    assert parse_int_list("0:100:25") == [0, 25, 50, 75, 100]
    assert parse_int_list("5, 7,9") == [5, 7, 9]
    assert parse_regimes("A:30, B:300") == [("A", 30), ("B", 300)]


def test_experiment_enum():
    assert {e.value for e in Experiment} == {"single", "confusion", "camera", "tau", "emit_ilp"}


def test_single_without_obstacles(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("[scenario]\nn_obstacles = 0\nn_ue = 40\n")
    out = tmp_path / "out"
    assert main(["single", "--config", str(p), "--out", str(out)]) == 0
    assert read_csv(out / "trajectories.csv") == [["a", "b", "c", "generator"]]
    assert read_csv(out / "decisions.csv") == [["ue_id", "from_bs", "to", "reason"]]
    (_, (tp, fp, fn, tn)) = read_csv(out / "confusion.csv")
    assert (tp, fp, fn) == ("0", "0", "0") and int(tn) > 0
    for name in ("world.ini", "discovery.csv", "outcome.csv", "summary.csv"):
        assert (out / name).exists()


def test_single_replays_a_saved_world(tmp_path, cfg_path):
    first = tmp_path / "a"
    assert main(["single", "--config", str(cfg_path), "--out", str(first)]) == 0
    p = tmp_path / "replay.cfg"
    p.write_text(f"[single]\nworld = {first / 'world.ini'}\n")
    second = tmp_path / "b"
    assert main(["single", "--config", str(p), "--out", str(second)]) == 0
    for name in ("discovery.csv", "outcome.csv", "trajectories.csv", "decisions.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


@pytest.mark.parametrize("command,files,rows", [
    ("confusion", ["confusion.csv", "confusion_sweep.csv"], 2),
    ("camera", ["camera_sweep.csv", "camera_handoff.csv"], 3),
    ("tau", ["tau_sweep.csv"], 3),
])
def test_sweeps_write_one_row_per_point(tmp_path, cfg_path, command, files, rows):
    out = tmp_path / command
    assert main([command, "--config", str(cfg_path), "--out", str(out)]) == 0
    for name in files:
        table = read_csv(out / name)
        assert len(table) == rows + 1
    sweep = read_csv(out / files[-1 if command != "camera" else 0])
    assert sweep[0] == SWEEP_HEADER


@pytest.mark.parametrize("command", ["single", "confusion", "camera", "tau", "emit-ilp"])
def test_rerun_is_byte_identical(tmp_path, cfg_path, command):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main([command, "--config", str(cfg_path), "--out", str(out)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir()) and names
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_parallel_matches_serial(tmp_path, cfg_path):
    serial = load_run_config("confusion", cfg_path, out=tmp_path / "s")
    parallel = load_run_config("confusion", cfg_path, out=tmp_path / "p", jobs=2)
    for cfg in (serial, parallel):
        run(cfg)
    for name in ("confusion.csv", "confusion_sweep.csv"):
        assert (tmp_path / "s" / name).read_bytes() == (tmp_path / "p" / name).read_bytes()


def test_emit_ilp_writes_lp_files(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("[scenario]\nn_ue = 60\nK_max = 3\n")
    out = tmp_path / "ilp"
    assert main(["emit-ilp", "--config", str(p), "--seed", "1", "--out", str(out)]) == 0
    lps = sorted(out.glob("ilp_bs*.lp"))
    assert lps
    text = lps[0].read_text()
    assert text.count("\nmin:") == 1 and "bin X_3;" in text and "X_4" not in text


def test_bad_config_exits_nonzero(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("[scenario]\nn_ue = lots\n")
    assert main(["single", "--config", str(p), "--out", str(tmp_path / "o")]) != 0
    assert "n_ue" in capsys.readouterr().err


def test_missing_config_exits_nonzero(tmp_path):
    assert main(["single", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) != 0


def test_argument_validation():
    with pytest.raises(SystemExit) as exc:
        main(["single", "--trials", "0"])
    assert exc.value.code != 0


def test_module_entry_point(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("[scenario]\nn_ue = 10\nn_obstacles = 2\n")
    res = subprocess.run([sys.executable, "-m", "obstrack", "single", "--config", str(p),
                          "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "summary.csv" in res.stdout
