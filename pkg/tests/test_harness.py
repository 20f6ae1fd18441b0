"""Experiment configs, perturbations, runs, sweeps, the verification suite."""

import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from bolab.harness import (
    ExperimentConfig,
    build_perturbation,
    derive_cell_config,
    format_config,
    load_config,
    load_snapshot,
    measure_inequalities,
    parse_config_text,
    run_experiment,
    run_sweep,
    run_verification_suite,
    save_snapshot,
)
from bolab.evolution import evolve
from bolab.modulation import track
from bolab.spectral import Grid, RealField, sobolev_norm
from bolab.solitons import SolitonParams, soliton_profile

SMALL = ExperimentConfig(
    speeds0=(1.0,),
    centers0=(-10.0,),
    domain_length=64.0,
    n=512,
    perturbation_width=2.0,
    dt=0.05,
    t_end=2.0,
    record_every=10,
)

RUN_FILES = (
    "config.txt",
    "initial.bin",
    "initial.json",
    "timeseries.csv",
    "final.bin",
    "final.json",
    "report.json",
    "manifest.txt",
)


def test_config_properties():
    cfg = ExperimentConfig(speeds0=(1.0, 2.0), centers0=(-60.0, -12.0))
    assert cfg.k == 2
    assert cfg.theta0 == pytest.approx(0.125)
    assert cfg.grid() == Grid(256.0, 4096)
    assert np.allclose(cfg.train().speeds, [1.0, 2.0])
    cfg.validate()


def test_config_validation_errors():
    base = ExperimentConfig(speeds0=(1.0, 2.0), centers0=(-60.0, -12.0))
    with pytest.raises(ValueError, match="separation"):
        replace(base, centers0=(-30.0, -12.0)).validate()
    with pytest.raises(ValueError, match="nonnegative"):
        replace(base, perturbation_amplitude=-0.1).validate()
    with pytest.raises(ValueError, match="perturbation kind"):
        replace(base, perturbation_kind="spike").validate()
    with pytest.raises(ValueError, match="width"):
        replace(base, perturbation_width=0.0).validate()
    with pytest.raises(ValueError, match="mode index"):
        replace(base, perturbation_mode=4096).validate()
    with pytest.raises(ValueError, match="advection guard"):
        replace(base, dt=0.1).validate()
    with pytest.raises(ValueError, match="record_every"):
        replace(base, record_every=0).validate()
    with pytest.raises(ValueError, match="enlarge domain_length"):
        replace(base, t_end=500.0).validate()


def test_config_text_round_trip(tmp_path):
    cfg = ExperimentConfig(
        speeds0=(1.0, 2.0), centers0=(-60.0, -12.0), perturbation_kind="mode"
    )
    text = format_config(cfg)
    back = ExperimentConfig.from_mapping(parse_config_text(text))
    assert back == cfg
    path = tmp_path / "run.cfg"
    path.write_text(text)
    assert load_config(path) == cfg
    # the hash ignores where the results land
    moved = replace(cfg, out_dir="/somewhere/else")
    assert moved.config_hash() == cfg.config_hash()


def test_parse_rejects_bad_lines():
    with pytest.raises(ValueError, match="unknown key"):
        parse_config_text("speed = 1.0\n")
    with pytest.raises(ValueError, match="repeated key"):
        parse_config_text("dt = 0.01\ndt = 0.02\n")
    with pytest.raises(ValueError, match="expected 'key = value'"):
        parse_config_text("just some words\n")
    # comments and blank lines are fine
    mapping = parse_config_text("# header\n\ndt = 0.01  # trailing\n")
    assert mapping == {"dt": 0.01}


def test_from_mapping_requires_train():
    with pytest.raises(ValueError, match="speeds and centers"):
        ExperimentConfig.from_mapping({"dt": 0.01})
    with pytest.raises(ValueError, match="unknown config keys"):
        ExperimentConfig.from_mapping(
            {"speeds": [1.0], "centers": [0.0], "zeta": 1.0}
        )


@pytest.mark.parametrize("kind", ["bump", "mode", "seeded-noise"])
def test_perturbation_norm_is_alpha(kind):
    cfg = replace(SMALL, perturbation_kind=kind, perturbation_amplitude=0.037)
    grid = cfg.grid()
    bump = build_perturbation(grid, cfg)
    assert sobolev_norm(bump, 0.5) == pytest.approx(0.037, rel=1e-12)


def test_perturbation_zero_amplitude():
    cfg = replace(SMALL, perturbation_amplitude=0.0)
    bump = build_perturbation(cfg.grid(), cfg)
    assert np.all(bump.values == 0.0)


def test_snapshot_round_trip(tmp_path):
    grid = Grid(64.0, 512)
    u = soliton_profile(grid, SolitonParams(1.0, 3.0))
    path = tmp_path / "field.bin"
    save_snapshot(u, path, time=2.5)
    v, meta = load_snapshot(path)
    assert np.array_equal(v.values, u.values)
    assert v.grid == grid
    assert meta["time"] == 2.5
    assert meta["format"] == "float64-le"
    # truncated payload is caught against the sidecar
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="sidecar"):
        load_snapshot(path)


def test_run_experiment_writes_everything(tmp_path):
    out = tmp_path / "run"
    report = run_experiment(SMALL, out)
    for name in RUN_FILES:
        assert (out / name).exists(), name
    assert report.failure is None
    assert report.passed
    assert set(report.flags) == {"tracking_ok", "eps_ok", "speed_ok", "mass_ok"}
    assert report.config_hash == SMALL.config_hash()
    assert set(report.files) == set(RUN_FILES) - {"manifest.txt"}

    header = (out / "timeseries.csv").read_text().splitlines()[0]
    assert header == "t,c_1,x_1,eps_l2,eps_h12,N,E,I_1,G,tracking_ok"

    payload = json.loads((out / "report.json").read_text())
    assert payload["passed"] is True
    assert "out_dir" not in payload

    manifest = (out / "manifest.txt").read_text().splitlines()
    assert len(manifest) == len(RUN_FILES) - 1  # everything but itself
    for line in manifest:
        digest, name = line.split("  ")
        assert len(digest) == 64

    # the final snapshot reloads onto the run's grid
    final, meta = load_snapshot(out / "final.bin")
    assert final.grid == SMALL.grid()
    assert meta["time"] == pytest.approx(2.0)


def test_run_experiment_requires_out_dir():
    with pytest.raises(ValueError, match="output directory"):
        run_experiment(SMALL)


def test_run_experiment_deterministic_bytes(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    run_experiment(SMALL, a)
    run_experiment(SMALL, b)
    for name in RUN_FILES:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_run_experiment_records_blow_up(tmp_path):
    # violent perturbation at a step size that cannot carry it: the run
    # ends in a recorded blow-up, not an exception.  Placed away from the
    # soliton so the t=0 modulation fit still converges.
    cfg = replace(
        SMALL,
        perturbation_amplitude=80.0,
        perturbation_offset=20.0,
        record_every=1000,
    )
    report = run_experiment(cfg, tmp_path / "boom")
    assert report.failure is not None
    assert report.failure["kind"] == "blow_up"
    assert report.failure["time"] > 0.0
    assert not report.flags["tracking_ok"]
    assert not report.passed
    # a single surviving record carries no rate information
    assert math.isnan(report.sup_rate_dev)
    payload = json.loads((tmp_path / "boom" / "report.json").read_text())
    assert payload["failure"]["kind"] == "blow_up"


def test_unperturbed_run_sits_on_the_floor():
    # alpha = 0: the residual is pure discretization error.  Needs the big
    # box; on smaller ones the periodic images dominate at ~5e-4.
    cfg = ExperimentConfig(
        speeds0=(1.0,),
        centers0=(-20.0,),
        domain_length=1024.0,
        n=16384,
        perturbation_amplitude=0.0,
        dt=0.01,
        t_end=50.0,
        record_every=500,
    )
    grid = cfg.grid()
    traj = evolve(soliton_profile(grid, SolitonParams(1.0, -20.0)), cfg.evolution_config())
    series = track(traj, cfg.train())
    assert float(np.max(series.eps_h12)) < 1e-4


BASE_SWEEP = ExperimentConfig(
    speeds0=(1.0, 2.0),
    centers0=(-18.0, 6.0),
    domain_length=64.0,
    n=512,
    perturbation_width=2.0,
    dt=0.05,
    t_end=1.0,
    record_every=5,
)


def test_derive_cell_config_respaces_and_grows():
    cell = derive_cell_config(BASE_SWEEP, 0.01, 12.0)
    assert cell.separation == 12.0
    assert cell.perturbation_amplitude == 0.01
    gaps = np.diff(cell.centers0)
    assert np.all(gaps == pytest.approx(1.2 * 12.0))
    cell.validate()

    # long runs force box doublings that keep the spacing fixed
    far = derive_cell_config(replace(BASE_SWEEP, t_end=20.0), 0.01, 12.0)
    assert far.domain_length > BASE_SWEEP.domain_length
    assert far.domain_length / far.n == BASE_SWEEP.domain_length / BASE_SWEEP.n
    far.validate()


def test_sweep_runs_resumes_and_records_errors(tmp_path):
    out = tmp_path / "sweep"
    table = run_sweep(BASE_SWEEP, [0.0, 0.01], [12.0], out, max_workers=2)
    assert len(table) == 2
    assert [row["status"] for row in table] == ["ran", "ran"]
    assert (out / "sweep.json").exists()
    assert (out / "sweep.csv").exists()
    assert (out / "sep12_alpha0.01" / "manifest.txt").exists()

    # a sweep cell equals the same experiment run by hand
    cell_cfg = derive_cell_config(BASE_SWEEP, 0.01, 12.0)
    solo = run_experiment(cell_cfg, tmp_path / "solo")
    row = next(r for r in table if r["alpha"] == 0.01)
    assert row["sup_eps_h12"] == solo.sup_eps_h12
    assert row["config_hash"] == solo.config_hash

    # second invocation touches nothing and reports the stored rows
    again = run_sweep(BASE_SWEEP, [0.0, 0.01], [12.0], out, max_workers=2)
    assert [row["status"] for row in again] == ["resumed", "resumed"]
    assert again[1]["sup_eps_h12"] == table[1]["sup_eps_h12"]

    # invalid cells land in the table instead of raising
    bad = run_sweep(BASE_SWEEP, [-0.01], [12.0], tmp_path / "bad")
    assert bad[0]["status"] == "invalid"
    assert "nonnegative" in bad[0]["error"]


def test_verification_suite_default_passes():
    summary = run_verification_suite()
    assert summary.analysis_n == 1024
    assert len(summary.checks) == 24
    names = [c["name"] for c in summary.checks]
    assert len(set(names)) == 24
    assert summary.all_passed, summary.to_text()
    assert "24/24 checks passed" in summary.to_text()
    payload = json.loads(summary.to_json())
    assert payload["all_passed"] is True


def test_verification_suite_small_box_fails_honestly():
    # the tolerances are calibrated to the default box; shrinking it makes
    # the tail-dominated identities fail while the exact ones keep passing
    summary = run_verification_suite(domain_length=32.0, n=512)
    failed = {c["name"] for c in summary.checks if not c["passed"]}
    assert not summary.all_passed
    assert len(failed) >= 4
    assert "soliton_equation_residual" in failed
    assert "soliton_fourier_tail" in failed
    # identities that do not see the box stay green
    assert "hilbert_cosine" not in failed
    assert "weight_partition" not in failed


def test_verification_suite_deterministic():
    a = run_verification_suite(domain_length=64.0, n=1024)
    b = run_verification_suite(domain_length=64.0, n=1024)
    assert a.to_json() == b.to_json()


def test_measure_inequalities_keys_and_bounds():
    out = measure_inequalities(n=1024, samples=40, seed=0)
    assert set(out) >= {
        "gn_max",
        "gn_soliton",
        "commutator_by_width",
        "commutator_max",
        "hilbert_max",
        "besov_slope",
        "besov_slope_expected",
    }
    assert out["gn_soliton"] == pytest.approx(5.0 / (2.0 * math.pi), abs=2e-2)
    assert 0.0 < out["gn_max"] < 0.9
    assert set(out["commutator_by_width"]) == {"1", "4", "16"}
    for v in out["commutator_by_width"].values():
        assert 0.0 < v < 0.05
    assert out["hilbert_max"] < 1.0
    # the plateau Besov decay follows the widening exponent
    expected = out["besov_slope_expected"]
    assert abs(out["besov_slope"] - expected) / abs(expected) < 0.1

    again = measure_inequalities(n=1024, samples=40, seed=0)
    assert again == out
