import hashlib
import json
import subprocess
import sys

import pytest

from cadlag_lab.cli import run
from cadlag_lab.config import parse_config
from cadlag_lab.errors import LabError
from cadlag_lab.paths import from_json

SMALL = """
[scenario]
scenario = "RENEWAL_FINITE_VAR"
n = 200
T = 2.0
seed = 5

[dist]
kind = "exponential"
param = 1.0

[chain]
P = [[0.5, 0.5], [0.5, 0.5]]
V0 = [0, 2]

[probe.sigma_tilde]
reps = 300
n = 500
threshold = 0.2

[probe.compensator]
t_grid = [0.5, 1.0]
n_grid = [100]
reps = 50
"""


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL)
    return p


def _probe(cfg_file, out, *extra, name="sigma_tilde"):
    return run(["probe", "--config", str(cfg_file), "--name", name, "--out", str(out), *extra])


# ---------------------------------------------------------------- config parsing

def test_parse_config():
    cfg, probes, echo = parse_config(SMALL)
    assert cfg.n == 200 and cfg.seed == 5 and cfg.chain.V0.tolist() == [0, 2]
    assert probes["compensator"]["t_grid"] == [0.5, 1.0]
    assert echo["scenario"]["n"] == 200


@pytest.mark.parametrize("text,code", [
    (SMALL + "\n[probe.sigma_tilde2]\nreps = 3\n", "CONFIG_PARSE"),
    (SMALL.replace("seed = 5", "sead = 5"), "CONFIG_PARSE"),
    (SMALL.replace("n = 200", "n = [200"), "CONFIG_PARSE"),
    (SMALL.replace("n = 200", "n = 0"), "CONFIG_INVALID"),
    (SMALL.replace("[[0.5, 0.5], [0.5, 0.5]]", "[[1, 0], [0, 1]]"), "REDUCIBLE_CHAIN"),
    ("not an ini file", "CONFIG_PARSE"),
])
def test_config_errors(text, code):
    with pytest.raises(LabError) as e:
        parse_config(text)
    assert e.value.code == code


# ---------------------------------------------------------------- commands

def test_cv_command(capsys):
    assert run(["cv", "--v", "gaussian-centered", "--tol", "1e-8"]) == 0
    out = capsys.readouterr().out
    assert "GRADIENT" in out and "LOGKERNEL" in out


def test_cv_unknown_potential_is_config_error():
    assert run(["cv", "--v", "no-such-potential"]) == 2


def test_selftest_command(capsys):
    assert run(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_bad_invocation():
    assert run(["probe", "--name", "nope", "--config", "x"]) == 2
    assert run([]) == 2


def test_probe_outputs_and_manifest(cfg_file, tmp_path):
    out = tmp_path / "run"
    assert _probe(cfg_file, out) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["manifest.json", "sigma_tilde.csv", "sigma_tilde.json"]
    man = json.loads((out / "manifest.json").read_text())
    assert man["seed"] == 5 and man["config"]["scenario"]["n"] == 200
    for f in man["files"]:
        assert hashlib.sha256((out / f["name"]).read_bytes()).hexdigest() == f["sha256"]


def test_probe_is_reproducible(cfg_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _probe(cfg_file, a, name="compensator") == 0
    assert _probe(cfg_file, b, "--workers", "2", name="compensator") == 0
    for f in ("compensator.csv", "compensator.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_seed_flag_and_environment(cfg_file, tmp_path, monkeypatch):
    assert _probe(cfg_file, tmp_path / "flag", "--seed", "11") == 0
    monkeypatch.setenv("CADLAB_SEED", "11")
    assert _probe(cfg_file, tmp_path / "env") == 0
    assert (tmp_path / "flag" / "sigma_tilde.csv").read_bytes() == (tmp_path / "env" / "sigma_tilde.csv").read_bytes()
    assert json.loads((tmp_path / "env" / "manifest.json").read_text())["seed"] == 11


def test_threshold_failure_exits_one(cfg_file, tmp_path):
    text = cfg_file.read_text().replace("threshold = 0.2", "threshold = 0.0")
    cfg_file.write_text(text)
    assert _probe(cfg_file, tmp_path / "fail") == 1


def test_unknown_key_exits_two(cfg_file, tmp_path):
    cfg_file.write_text(cfg_file.read_text().replace("reps = 300", "repz = 300"))
    assert _probe(cfg_file, tmp_path / "bad") == 2


def test_missing_config_file_exits_two(tmp_path):
    assert run(["probe", "--config", str(tmp_path / "none.cfg"), "--name", "fdd"]) == 2


def test_simulate_writes_paths(cfg_file, tmp_path):
    out = tmp_path / "sim"
    assert run(["simulate", "--config", str(cfg_file), "--reps", "2", "--out", str(out)]) == 0
    M = from_json((out / "rep0001_M.json").read_text())
    A = from_json((out / "rep0001_A.json").read_text())
    assert M.horizon == 2.0 and A.values[0, 0] == 0
    header = (out / "grid.csv").read_text().splitlines()[0]
    assert header == "rep,t,M,A,W,X,centered"
    man = json.loads((out / "manifest.json").read_text())
    assert len(man["files"]) == 11


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cadlag_lab", "cv", "--tol", "1e-6"], capture_output=True, text=True)
    assert res.returncode == 0 and "gap" in res.stdout
