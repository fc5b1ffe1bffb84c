import json
import logging

import numpy as np
import pytest

from worldtrack import cli
from worldtrack.bench import EvalConfig, evaluate
from worldtrack.exceptions import ConfigError, InvalidInputError, LogParseError
from worldtrack.io import ObservationLog, ingest_log, load_result, result_from_dict, result_to_dict, write_log
from worldtrack.simulator import ScenarioConfig, generate
from worldtrack.tracker import LMKTracker


@pytest.fixture(scope="module")
def scenario():
    return generate(ScenarioConfig(seed=3, duration_frames=600, num_objects=8))


@pytest.fixture
def log_path(tmp_path, scenario):
    path = tmp_path / "log.jsonl"
    write_log(scenario, str(path))
    return path


def test_log_round_trip_reproduces_the_run(scenario, log_path):
    log = ingest_log(str(log_path))
    assert len(log) == scenario.obs_frame.size
    direct = LMKTracker().fit(scenario).result()
    via_log = LMKTracker().fit(log).result()
    assert direct.assign_tracks.tolist() == via_log.assign_tracks.tolist()
    for j in range(direct.n_tracks):
        np.testing.assert_array_equal(direct.track_locations[j], via_log.track_locations[j])


def test_reexport_is_byte_identical(log_path, tmp_path):
    again = tmp_path / "again.jsonl"
    ingest_log(str(log_path)).write(str(again))
    assert again.read_bytes() == log_path.read_bytes()


def test_depth_is_realigned_from_samples(scenario, tmp_path):
    path = tmp_path / "raw.jsonl"
    write_log(scenario, str(path), include_aligned=False)
    log = ingest_log(str(path))
    assert np.isnan(log.obs_depth_aligned).all()
    err = np.abs(log.depths() - scenario.obs_depth)
    assert np.median(err) < 0.02


def test_empty_log(tmp_path, scenario):
    path = tmp_path / "empty.jsonl"
    header = ObservationLog.from_scenario(scenario).header()
    header["n_frames"] = 5
    path.write_text(json.dumps(header) + "\n")
    log = ingest_log(str(path))
    assert len(log) == 0
    result = LMKTracker().fit(log).result()
    assert result.n_tracks == 0


def test_malformed_line_is_named(log_path):
    lines = log_path.read_text().splitlines()
    lines[4] = lines[4][:-3]
    log_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(LogParseError, match="line 5"):
        ingest_log(str(log_path))


def test_appearance_dimension_mismatch(log_path):
    lines = log_path.read_text().splitlines()
    n = next(k for k, l in enumerate(lines) if '"type":"obs"' in l)
    rec = json.loads(lines[n])
    rec["appearance"] = rec["appearance"][:-1]
    lines[n] = json.dumps(rec)
    log_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ConfigError, match="dimension"):
        ingest_log(str(log_path))


def test_duplicate_observation_warns_and_keeps_first(log_path, caplog):
    lines = log_path.read_text().splitlines()
    n = next(k for k, l in enumerate(lines) if '"type":"obs"' in l)
    lines.insert(n + 1, lines[n])
    log_path.write_text("\n".join(lines) + "\n")
    with caplog.at_level(logging.WARNING):
        log = ingest_log(str(log_path))
    assert "duplicate" in caplog.text
    assert len(log) == sum('"type":"obs"' in l for l in lines) - 1


def test_missing_pose(log_path):
    lines = [l for l in log_path.read_text().splitlines() if '"type":"camera"' not in l]
    log_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(InvalidInputError, match="no camera pose"):
        ingest_log(str(log_path))


def test_result_serialisation(scenario):
    result = LMKTracker().fit(scenario).result()
    back = result_from_dict(json.loads(json.dumps(result_to_dict(result))))
    frames = np.arange(scenario.n_frames)
    for j in range(result.n_tracks):
        ids = np.full(frames.size, j)
        np.testing.assert_array_equal(result.locate(ids, frames), back.locate(ids, frames))


def test_lifted_truth_from_log(log_path):
    truth = ingest_log(str(log_path)).lifted_ground_truth()
    assert truth.positions.shape[0] == truth.observed.shape[0]
    assert np.isnan(truth.radii).all()


def test_run_spec_validation():
    with pytest.raises(ConfigError):
        cli.RunSpec()
    with pytest.raises(ConfigError):
        cli.RunSpec(scenario={}, methods="sort")
    with pytest.raises(ConfigError):
        cli.RunSpec.from_dict({"scenario": {}, "colour": 1})
    spec = cli.RunSpec(scenario={}, methods="lmk:V,osl")
    assert list(spec.method_modes()) == [("lmk", "V"), ("osl", "V+L")]


def test_cli_pipeline(tmp_path, capsys):
    out = tmp_path / "sim"
    config = tmp_path / "run.yaml"
    config.write_text("scenario:\n  duration_frames: 400\n  num_objects: 6\neval:\n  deltas: [0, 10]\n")
    assert cli.main(["simulate", "--config", str(config), "--seed", "2", "--out", str(out)]) == 0
    log, truth = str(out / "log.jsonl"), str(out / "truth.npz")
    assert cli.main(["track", "--log", log, "--method", "lmk", "--out", str(tmp_path / "res.json")]) == 0
    assert load_result(str(tmp_path / "res.json")).method == "lmk"
    assert cli.main(["eval", "--result", str(tmp_path / "res.json"), "--truth", truth,
                     "--deltas", "0,10", "--out", str(tmp_path / "ev")]) == 0
    assert (tmp_path / "ev.csv").exists()
    assert cli.main(["run", "--config", str(config), "--method", "lmk,osl", "--out", str(tmp_path / "rep")]) == 0
    for suffix in (".csv", "_states.csv", "_motion.csv", "_scenarios.csv", ".json"):
        assert (tmp_path / f"rep{suffix}").exists()
    assert cli.main(["stats", "--log", log, "--pairs", "200", "--out", str(tmp_path / "s.json")]) == 0
    assert json.loads((tmp_path / "s.json").read_text())["n_pairs"] == 200
    assert cli.main(["track", "--log", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "x.json")]) == 2
    capsys.readouterr()


def test_report_rows_carry_provenance(tmp_path):
    spec = cli.RunSpec(scenario={"duration_frames": 300, "num_objects": 5}, eval={"deltas": [0, 5]},
                       output=str(tmp_path / "r"))
    cli.run(spec)
    head = (tmp_path / "r.csv").read_text().splitlines()
    assert head[0].startswith("# ")
    assert any("version" in line for line in head if line.startswith("#"))


def test_beta_l_sweep_peaks_at_the_default():
    spec = cli.RunSpec(scenario={"duration_frames": 3000}, seeds=(0, 1, 2), eval={"deltas": [60]})
    rows = cli.sweep(spec, "beta_L", [1.0, 5.0, 13.0, 50.0])
    by_value = {r["value"]: r["pcl_mean"] for r in rows}
    best = max(by_value.values())
    assert by_value[13.0] == best
    # plateau: the neighbouring grid points stay close to the best value
    assert best - min(by_value[5.0], by_value[50.0]) <= 0.05
