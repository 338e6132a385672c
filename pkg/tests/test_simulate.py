import logging

import numpy as np
import pytest

from ipmcc.exceptions import ConfigError
from ipmcc.filters import FilterParams, Variant
from ipmcc.harness import simulate
from ipmcc.harness.config import ExperimentConfig, FilterSpec, SystemSource, Switch
from ipmcc.harness.simulate import run_identification, run_tracking
from ipmcc.signals import InputModel, NoiseModel


def small_config(**kw):
    args = dict(
        n_taps=16,
        filters=(
            FilterSpec("ipmcc", Variant.IPMCC, FilterParams(0.005)),
            FilterSpec("mcc", Variant.MCC, FilterParams(0.005)),
        ),
        input=InputModel("white"),
        noise=NoiseModel(0.01, 0.0, 0.0),
        system=SystemSource(active=4, seed=1),
        iterations=2000,
        runs=3,
        base_seed=7,
    )
    args.update(kw)
    return ExperimentConfig(**args)


def test_noiseless_msd_never_increases():
    cfg = small_config(
        noise=NoiseModel(0.0, 0.0, 0.0),
        filters=(
            FilterSpec("lms", Variant.LMS, FilterParams(0.01)),
            FilterSpec("mcc", Variant.MCC, FilterParams(0.01)),
        ),
        iterations=1500,
    )
    for curve in run_identification(cfg).values():
        assert curve.msd_db[0] == pytest.approx(0.0, abs=1e-12)  # unit-norm system
        assert np.all(np.diff(curve.msd_db) <= 1e-9)
        assert curve.msd_db[-1] < -40.0


def test_repeatable():
    a = run_identification(small_config(runs=2))
    b = run_identification(small_config(runs=2))
    for lb in a:
        assert a[lb].msd_db.tobytes() == b[lb].msd_db.tobytes()
        assert a[lb].steady_state_emse == b[lb].steady_state_emse


def test_run_order_does_not_matter():
    cfg = small_config()
    a = run_identification(cfg, run_indices=[0, 1, 2])
    b = run_identification(cfg, run_indices=[2, 0, 1])
    for lb in a:
        np.testing.assert_allclose(a[lb].msd_db, b[lb].msd_db, rtol=1e-12, atol=1e-12)


def test_chunking_matches_single_batch(monkeypatch):
    cfg = small_config(runs=5)
    whole = run_identification(cfg)
    monkeypatch.setattr(simulate, "MEMORY_BUDGET", 1)
    assert len(simulate._chunks(cfg)) == 5
    split = run_identification(cfg)
    for lb in whole:
        np.testing.assert_allclose(whole[lb].msd_db, split[lb].msd_db, rtol=1e-12, atol=1e-12)


def test_identical_filters_see_identical_data():
    spec = FilterParams(0.004, alpha=0.2)
    cfg = small_config(
        filters=(FilterSpec("a", "ipmcc", spec), FilterSpec("b", "ipmcc", spec))
    )
    out = run_identification(cfg)
    assert out["a"].msd_db.tobytes() == out["b"].msd_db.tobytes()


def test_fresh_system_per_run_differs_from_fixed():
    fixed = run_identification(small_config())["mcc"].msd_db
    fresh = run_identification(small_config(system=SystemSource(active=4)))["mcc"].msd_db
    assert not np.array_equal(fixed, fresh)


def test_divergence_is_counted(caplog):
    cfg = small_config(
        filters=(
            FilterSpec("lms", Variant.LMS, FilterParams(0.5)),
            FilterSpec("mcc", Variant.MCC, FilterParams(0.005)),
        ),
        runs=4,
        iterations=400,
    )
    with caplog.at_level(logging.WARNING, logger="ipmcc"):
        out = run_identification(cfg)
    lms, mcc = out["lms"], out["mcc"]
    assert lms.included_runs + lms.excluded_runs == 4
    assert lms.excluded_runs == 4 and np.isinf(lms.steady_state_msd_db)
    assert mcc.excluded_runs == 0 and mcc.included_runs == 4
    assert "diverged" in caplog.text


def test_summary_fields():
    cfg = small_config(iterations=20_000, msd_window=5000, runs=4)
    out = run_identification(cfg)
    mcc = out["mcc"]
    assert mcc.steady_state_msd_db == pytest.approx(mcc.window_msd_db(15_000, 20_000))
    assert mcc.trace_s == 16.0 and out["ipmcc"].trace_s == 16.0
    assert mcc.steady_state_emse.samples_used == 4 * 5000
    assert mcc.steady_state_emse.converged
    assert abs(mcc.steady_state_emse.xi_db - mcc.theory_emse.xi_db) < 1.0
    assert mcc.iterations_to_reach(-20.0) < out["mcc"].iterations_to_reach(-30.0)
    assert mcc.iterations_to_reach(-200.0) is None


def test_colored_proportionate_trace_is_empirical():
    cfg = small_config(input=InputModel("ar1", 0.9), iterations=4000)
    out = run_identification(cfg)
    assert out["mcc"].trace_s == 16.0
    assert out["ipmcc"].trace_s != 16.0
    assert out["ipmcc"].trace_s == pytest.approx(16.0, rel=0.3)


def test_switch_to_same_system_is_identification():
    base = small_config(system=SystemSource(active=4, seed=3))
    same = small_config(
        system=SystemSource(active=4, seed=3),
        switch=Switch(1000, SystemSource(active=4, seed=3)),
    )
    a, b = run_identification(base), run_tracking(same)
    for lb in a:
        assert a[lb].msd_db.tobytes() == b[lb].msd_db.tobytes()


def test_switch_causes_jump():
    cfg = small_config(
        iterations=4000,
        switch=Switch(2000, SystemSource(active=8, seed=9, clustered=True)),
    )
    curve = run_tracking(cfg)["ipmcc"]
    assert curve.msd_db[2000] - curve.msd_db[1999] > 20.0
    assert curve.msd_db[-1] < curve.msd_db[2000] - 20.0


def test_tracking_requires_switch():
    with pytest.raises(ConfigError):
        run_tracking(small_config())


def test_lms_fails_under_impulses():
    cfg = small_config(
        n_taps=32,
        filters=(
            FilterSpec("ipmcc", Variant.IPMCC, FilterParams(0.001)),
            FilterSpec("lms", Variant.LMS, FilterParams(0.001)),
        ),
        noise=NoiseModel(0.01, 0.05, 1000.0),
        system=SystemSource(active=2, seed=1),
        iterations=15_000,
        runs=4,
    )
    out = run_identification(cfg)
    assert out["lms"].steady_state_msd_db - out["ipmcc"].steady_state_msd_db >= 10.0


def test_short_filter_flagged(caplog):
    with caplog.at_level(logging.WARNING, logger="ipmcc"):
        run_identification(small_config(iterations=200))
    assert "validity" in caplog.text
