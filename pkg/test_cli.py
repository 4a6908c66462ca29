#!/usr/bin/env python3
"""
Command line tests: synthetic data through learning, inference and evaluation
"""

import hashlib
import json

import pytest
from typer.testing import CliRunner

from groundkit.cli import app
from groundkit.models.bundle import WeightedModelBundle

runner = CliRunner()


def invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def error_of(result):
    """The JSON error object the CLI prints on failure"""
    for line in result.output.splitlines():
        if line.startswith("{"):
            return json.loads(line)
    raise AssertionError(f"no JSON error in output: {result.output!r}")


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    # keep configuration discovery away from any file in the repository
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def val_dir(workdir):
    out = workdir / "val"
    result = invoke("--seed", 3, "synth", "--output", out, "--images", 12, "--noise", 0)
    assert result.exit_code == 0, result.output
    return out


def test_synth_writes_every_file(val_dir):
    for name in ("sentences.jsonl", "candidates.jsonl", "cues.jsonl", "pairs.jsonl"):
        assert (val_dir / name).exists()


def test_synth_vrd(workdir):
    result = invoke("synth", "--kind", "vrd", "--output", workdir / "vrd", "--images", 8)
    assert result.exit_code == 0, result.output
    assert (workdir / "vrd" / "vrd_vocab.json").exists()
    assert (workdir / "vrd" / "vrd_vectors.jsonl").exists()


def test_learn_infer_eval(val_dir, workdir):
    bundle = workdir / "bundle.json"
    result = invoke("learn-weights", "--stage", "spc", "--val", val_dir, "--bundle", bundle, "--restarts", 3)
    assert result.exit_code == 0, result.output
    learned = WeightedModelBundle.load(bundle)
    assert learned.ws.shape == (14,)
    assert learned.config_fingerprint

    result = invoke("learn-weights", "--stage", "ppc", "--val", val_dir, "--bundle", bundle, "--restarts", 2)
    assert result.exit_code == 0, result.output
    assert WeightedModelBundle.load(bundle).wq.shape == (3,)

    predictions = workdir / "pred.jsonl"
    result = invoke("infer", "--cues", val_dir / "cues.jsonl", "--bundle", bundle, "--output", predictions)
    assert result.exit_code == 0, result.output
    assert len(predictions.read_text(encoding="utf-8").splitlines()) == 36

    csv = workdir / "recall.csv"
    result = invoke("eval", "--pred", predictions, "--gt", val_dir / "sentences.jsonl", "--csv", csv)
    assert result.exit_code == 0, result.output
    lines = csv.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "type,correct,total,recall"
    assert lines[-1].startswith("overall,")
    assert lines[-1].split(",")[2] == "36"

    result = invoke("upper-bound", "--cues", val_dir / "cues.jsonl", "--gt", val_dir / "sentences.jsonl")
    assert result.exit_code == 0, result.output


def test_global_seed_and_command_seed(val_dir, workdir):
    first, second = workdir / "a.json", workdir / "b.json"
    assert invoke("--seed", 1, "learn-weights", "--val", val_dir, "--bundle", first, "--restarts", 2).exit_code == 0
    assert invoke("learn-weights", "--val", val_dir, "--bundle", second, "--restarts", 2, "--seed", 1).exit_code == 0
    assert WeightedModelBundle.load(first).ws.tolist() == WeightedModelBundle.load(second).ws.tolist()


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_same_seed_writes_identical_files(workdir):
    hashes = []
    for run in ("first", "second"):
        out = workdir / run
        assert invoke("--seed", 5, "synth", "--output", out / "val", "--images", 10).exit_code == 0
        bundle, predictions = out / "bundle.json", out / "pred.jsonl"
        result = invoke("--seed", 5, "learn-weights", "--val", out / "val", "--bundle", bundle, "--restarts", 2)
        assert result.exit_code == 0, result.output
        result = invoke("infer", "--cues", out / "val" / "cues.jsonl", "--bundle", bundle, "--output", predictions)
        assert result.exit_code == 0, result.output
        files = sorted((out / "val").iterdir()) + [bundle, predictions]
        hashes.append({path.name: digest(path) for path in files})

        vrd = out / "vrd"
        assert invoke("--seed", 5, "synth", "--kind", "vrd", "--output", vrd, "--images", 8).exit_code == 0
        hashes[-1].update({f"vrd/{path.name}": digest(path) for path in sorted(vrd.iterdir())})

    assert "pred.jsonl" in hashes[0] and "vrd/vrd_test_gt.jsonl" in hashes[0]
    assert hashes[0] == hashes[1]


def test_missing_file_is_a_json_error(workdir):
    result = invoke("infer", "--cues", workdir / "nope.jsonl", "--bundle", workdir / "bundle.json")
    assert result.exit_code == 1
    assert error_of(result)["error"] == "data_format_error"


def test_bad_arguments_are_json_errors(val_dir, workdir):
    result = invoke("learn-weights", "--stage", "both", "--val", val_dir, "--bundle", workdir / "b.json")
    assert result.exit_code == 1
    assert error_of(result)["error"] == "configuration_error"

    result = invoke("infer", "--bundle", workdir / "b.json")
    assert result.exit_code == 1
    assert error_of(result)["error"] == "configuration_error"


def test_bad_config_file_fails_early(workdir):
    path = workdir / "broken.yaml"
    path.write_text("solver:\n  provider: quantum\n", encoding="utf-8")
    result = invoke("--config", path, "info")
    assert result.exit_code == 1
    assert error_of(result)["error"] == "configuration_error"


def test_config_create_and_reuse(workdir):
    path = workdir / "groundkit_config.yaml"
    result = invoke("config-create", "--output", path)
    assert result.exit_code == 0, result.output
    assert path.exists()
    result = invoke("--config", path, "config-validate")
    assert result.exit_code == 0, result.output


def test_info_lists_cues(workdir):
    result = invoke("info")
    assert result.exit_code == 0
    assert "GROUNDKIT" in result.output
