import csv
import io
import json
import subprocess
import sys

import pytest

from rho_hankel.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, load_config, main
from rho_hankel.report import ConfigError


def test_bessel_zeta_kernel(capsys):
    assert main(["bessel", "--kind", "K", "--nu", "0.5", "--x", "2"]) == EXIT_OK
    assert "0.119937771968" in capsys.readouterr().out
    assert main(["zeta", "--s", "2"]) == EXIT_OK
    assert "1.64493406684823" in capsys.readouterr().out
    assert main(["kernel", "--a", "1", "--s", "0.5"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "positive_arg" in out and "error <=" in out


def test_domain_errors_exit_2(capsys):
    assert main(["kernel", "--a", "0", "--s", "0.3"]) == EXIT_CONFIG
    assert main(["zeta", "--s", "1"]) == EXIT_CONFIG
    with pytest.raises(SystemExit) as exc:
        main(["bessel", "--kind", "Q", "--nu", "0", "--x", "1"])
    assert exc.value.code == EXIT_CONFIG
    capsys.readouterr()


def test_verify_local_json_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "local", "--q", "2", "--s", "0.3", "--out", str(a)]) == EXIT_OK
    assert main(["verify", "local", "--q", "2", "--s", "0.3", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["suite"] == "local" and rep["schema_version"] == 1
    statuses = {c["name"]: c["status"] for c in rep["checks"]}
    assert statuses["gamma_reflection[q=2]"] == "EXACT"
    assert statuses["eigenfunction_shells[q=2]"] == "PASS"
    assert all(v != "FAIL" for v in statuses.values())
    summary = capsys.readouterr().out
    assert "local: ok" in summary


def test_verify_csv(capsys):
    assert main(["verify", "local", "--q", "3", "--format", "csv"]) == EXIT_OK
    text = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["name", "status", "lhs", "rhs", "abs_err", "rel_err", "details"]
    assert any(r[0] == "bernstein[q=3]" and r[1] == "EXACT" for r in rows[1:])


def test_failing_check_exits_1(capsys):
    # an impossible absolute tolerance on the small-|x| kernel rows
    assert main(["verify", "local", "--q", "2", "--s", "0.3", "--tol", "1e-30"]) == EXIT_FAIL
    assert "FAIL" in capsys.readouterr().err


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("s = 0.45\nq = 2\ntol = 1e-10\n")
    assert load_config(str(cfg)) == {"s": [0.45], "q": [2], "tol": 1e-10}
    out = tmp_path / "r.json"
    assert main(["verify", "local", "--config", str(cfg), "--s", "0.3", "--out", str(out)]) == EXIT_OK
    names = [c["name"] for c in json.loads(out.read_text())["checks"]]
    assert any("s=0.3]" in n for n in names)
    assert not any("s=0.45]" in n for n in names)
    capsys.readouterr()


@pytest.mark.parametrize("text", ["tol = abc\n", "colour = red\n", "support = 1 2 3\n", "[run\ns = 0.3\n"])
def test_malformed_config_exits_2(tmp_path, capsys, text):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    with pytest.raises(ConfigError):
        load_config(str(cfg))
    assert main(["verify", "local", "--config", str(cfg)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["--q", "6"], ["--prime", "4"], ["--tol", "-1"], ["--support", "3", "1"],
                                  ["--max-n", "0"]])
def test_bad_flags_exit_2(argv, capsys):
    assert main(["verify", "local"] + argv) == EXIT_CONFIG
    capsys.readouterr()


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert main(["verify", "local", "--config", str(tmp_path / "nope.ini")]) == EXIT_CONFIG
    capsys.readouterr()


def test_figures(tmp_path, capsys):
    figs = tmp_path / "figs"
    assert main(["verify", "local", "--q", "2", "--s", "0.3", "--out", str(tmp_path / "r.json"),
                 "--figures", str(figs)]) == EXIT_OK
    png = figs / "local_residuals.png"
    assert png.exists() and png.read_bytes()[:4] == b"\x89PNG"
    capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rho_hankel", "zeta", "--s", "2"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "1.64493406684823" in proc.stdout
