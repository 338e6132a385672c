import pytest

from ipmcc.harness.cli import main
from ipmcc.harness.io import SUMMARY_HEADER, read_csv
from ipmcc.signals import load_system

CONFIG = """
[experiment]
L = 16
iterations = 600
runs = 2
base_seed = 3

[input]
kind = white

[system]
active = 2
seed = 1

[filter.ipmcc]
mu = 0.005

[filter.lms]
mu = 0.005
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(CONFIG)
    return path


def test_run_writes_curves_and_summary(config, tmp_path, capsys):
    out = tmp_path / "curves.csv"
    assert main(["run", "--config", str(config), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 600
    assert list(rows[0]) == ["iteration", "ipmcc_msd_db", "lms_msd_db"]
    summary = read_csv(tmp_path / "curves_summary.csv")
    assert [r["variant"] for r in summary] == ["ipmcc", "lms"]
    assert list(summary[0]) == SUMMARY_HEADER
    assert "steady MSD" in capsys.readouterr().out


def test_run_is_byte_identical(config, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["run", "--config", str(config), "--out", str(a), "--quiet"])
    main(["run", "--config", str(config), "--out", str(b), "--quiet"])
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a_summary.csv").read_bytes() == (tmp_path / "b_summary.csv").read_bytes()


def test_seed_and_runs_overrides(config, tmp_path):
    base, seeded, more = tmp_path / "x.csv", tmp_path / "y.csv", tmp_path / "z.csv"
    main(["run", "--config", str(config), "--out", str(base), "--quiet"])
    main(["run", "--config", str(config), "--out", str(seeded), "--seed", "4", "--quiet"])
    main(["run", "--config", str(config), "--out", str(more), "--runs", "3", "--quiet"])
    assert base.read_bytes() != seeded.read_bytes()
    assert base.read_bytes() != more.read_bytes()


def test_explicit_summary_path(config, tmp_path):
    summary = tmp_path / "s.csv"
    main(["run", "--config", str(config), "--out", str(tmp_path / "c.csv"),
          "--summary", str(summary), "--quiet"])
    assert summary.exists()


def test_track(config, tmp_path):
    config.write_text(CONFIG.replace("[input]", "[switch]\niteration = 300\n\n[input]"))
    out = tmp_path / "t.csv"
    assert main(["track", "--config", str(config), "--out", str(out), "--quiet"]) == 0
    assert len(read_csv(out)) == 600


@pytest.mark.parametrize(
    "argv,fragment",
    [
        (["run", "--config", "missing.ini", "--out", "o.csv"], "cannot read"),
        (["run", "--runs", "0"], "runs"),
        (["track"], "[switch]"),
        (["theory", "--mu", "0.5"], "no steady-state"),
        (["gen-system", "--L", "4", "--K", "5", "--out", "s.txt"], "ipmcc gen-system: error"),
    ],
)
def test_errors_exit_with_one_line(argv, fragment, config, tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    if argv[0] in ("run", "track") and "--config" not in argv:
        argv = argv + ["--config", str(config), "--out", "o.csv"]
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert fragment in err
    assert err.count("\n") == 1


def test_theory(capsys):
    assert main(["theory", "--mu", "0.001", "--L", "64", "--p", "0"]) == 0
    out = capsys.readouterr().out
    assert "Tr(S)" in out and "-34.851 dB" in out


def test_audit(capsys):
    assert main(["audit", "--variant", "ipmcc", "--L", "512"]) == 0
    out = capsys.readouterr().out
    assert "adds 2048   (reference: 2048)" in out
    assert "mults 2053   (reference: 2053)" in out


def test_gen_system(tmp_path, capsys):
    out = tmp_path / "sys.txt"
    assert main(["gen-system", "--L", "64", "--K", "4", "--seed", "2", "--out", str(out)]) == 0
    assert load_system(out).active_count == 4
    assert "S_m=" in capsys.readouterr().out
