import dataclasses

import pytest

from ipmcc.exceptions import ConfigError
from ipmcc.filters import Variant
from ipmcc.harness.config import (
    DEFAULT_MU,
    ExperimentConfig,
    dumps_config,
    emit_config,
    loads_config,
    parse_config,
    reference_config,
)
from ipmcc.signals import InputKind, gen_sparse_system, save_system

SHIPPED = ["experiment1", "impulsive", "tracking", "gaussian_theory"]


def test_minimal_config_defaults():
    c = loads_config("[experiment]\nL = 32\n")
    assert c.n_taps == 32
    assert c.iterations == 10_000 and c.runs == 100 and c.base_seed == 0
    assert c.msd_window == 1000
    assert c.input.kind is InputKind.AR1 and c.input.theta == 0.9
    assert (c.noise.sigma_s_sq, c.noise.p, c.noise.sigma_I_sq) == (0.01, 0.001, 1000.0)
    assert [f.label for f in c.filters] == ["ipmcc", "mcc"]
    assert all(f.params.mu == DEFAULT_MU for f in c.filters)
    assert c.switch is None and c.default_active == 2


def test_full_config():
    text = """
[experiment]
L = 64
iterations = 500
runs = 3
base_seed = 9
msd_window = 50

[input]
kind = white

[noise]
p = 0.05   ; inline comment

[system]
active = 4
seed = 2

[switch]
iteration = 250
clustered = no

[filter.fast]
variant = ipmcc
mu = 0.002
alpha = 0.5

[filter.lms]
mu = 1e-4
"""
    c = loads_config(text)
    assert c.input.kind is InputKind.WHITE
    assert c.noise.p == 0.05
    assert c.system.active == 4 and c.system.seed == 2 and c.system.is_fixed
    assert c.switch.iteration == 250 and not c.switch.system.clustered
    fast, lms = c.filters
    assert fast.variant is Variant.IPMCC and fast.params.alpha == 0.5
    assert lms.variant is Variant.LMS and lms.params.mu == 1e-4


def test_missing_l_names_the_field():
    with pytest.raises(ConfigError, match="'L'"):
        loads_config("[experiment]\nruns = 3\n")
    with pytest.raises(ConfigError, match=r"\[experiment\].*'L'"):
        loads_config("[noise]\np = 0\n")


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[experiment]\nL = 8\nlength = 3\n", "cfg.ini:3: .*unknown key"),
        ("[experiment]\nL = 8\n\n[bogus]\nx = 1\n", "cfg.ini:4: .*unknown section"),
        ("[experiment]\nL = eight\n", "cfg.ini:2: .*expected an integer"),
        ("[experiment]\nL = 8\n[noise]\np = 2\n", "cfg.ini:3: .*noise"),
        ("[experiment]\nL = 8\n[system]\nclustered = maybe\n", "expected a boolean"),
        ("[experiment]\nL = 8\n[filter.a]\nvariant = rls\n", "cfg.ini:4: .*unknown filter variant"),
        ("[experiment]\nL = 8\n[filter.a]\nvariant = mcc\nmu = -1\n", r"\[filter.a\]"),
        ("[experiment]\nL = 8\niterations = 10\nmsd_window = 10\n", "msd_window"),
        ("[experiment]\nL = 8\n[switch]\nactive = 2\n", "'iteration'"),
        ("[experiment]\nL = 8\niterations = 10\n[switch]\niteration = 10\n", "switch"),
        ("[experiment]\nL = 8\nL = 9\n", "cfg.ini"),
        ("[experiment]\nL = 0\n", "L must be"),
    ],
)
def test_bad_configs(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        loads_config(text, source="cfg.ini")


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_configs_round_trip(name):
    c = parse_config(reference_config(name))
    assert loads_config(dumps_config(c)) == c


def test_reference_config_unknown():
    with pytest.raises(ConfigError, match="no shipped config"):
        reference_config("nope")


def test_emit_and_parse(tmp_path):
    c = ExperimentConfig(n_taps=16, iterations=100, runs=2, base_seed=4)
    emit_config(c, tmp_path / "c.ini")
    assert parse_config(tmp_path / "c.ini") == c


def test_relative_system_path(tmp_path):
    save_system(gen_sparse_system(8, 2, 0), tmp_path / "sys.txt")
    (tmp_path / "c.ini").write_text("[experiment]\nL = 8\n[system]\npath = sys.txt\n")
    c = parse_config(tmp_path / "c.ini")
    assert c.system.path == str((tmp_path / "sys.txt").resolve())
    realized = c.system.realize(8, None, 1)
    assert realized == gen_sparse_system(8, 2, 0)


def test_system_length_mismatch(tmp_path):
    save_system(gen_sparse_system(8, 2, 0), tmp_path / "sys.txt")
    (tmp_path / "c.ini").write_text("[experiment]\nL = 16\n[system]\npath = sys.txt\n")
    c = parse_config(tmp_path / "c.ini")
    with pytest.raises(ConfigError):
        c.system.realize(16, None, 1)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "absent.ini")


def test_replace_revalidates():
    c = ExperimentConfig(n_taps=16, iterations=100)
    with pytest.raises(ConfigError):
        dataclasses.replace(c, runs=0)
