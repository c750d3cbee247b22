from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from unittest.mock import patch

import pytest
from pydantic import ValidationError

import nshentropy as E


def requires_yaml(func):
    """Decorator to skip tests if pydantic-yaml is not installed."""
    try:
        import pydantic_yaml  # noqa

        return func
    except ImportError:
        return pytest.mark.skip(reason="pydantic-yaml not installed")(func)


@pytest.fixture
def entropy_job() -> E.JobConfig:
    """A finalized entropy job over two barcode files."""
    draft = E.JobConfig.draft()
    draft.command = "entropy"
    draft.inputs = [Path("a.json"), Path("b.json")]
    return draft.finalize()


def test_draft_finalize(entropy_job):
    """Test that a draft is completed with defaults when finalized."""
    assert entropy_job.command == "entropy"
    assert entropy_job.inputs == [Path("a.json"), Path("b.json")]
    assert entropy_job.output is None
    assert entropy_job.p == math.inf
    assert isinstance(entropy_job.inf_policy, E.TauPolicyConfig)
    assert entropy_job.inf_policy.constant == 0.0


def test_finalize_only_drafts(entropy_job):
    """Test that finalizing a finished config is an error."""
    with pytest.raises(ValueError, match="drafts"):
        entropy_job.finalize()


def test_default_outputs():
    """Test that commands writing files get a default output location."""
    cfg = E.JobConfig.draft(command="distmat", inputs=["a.json", "b.json"]).finalize()
    assert cfg.output == Path("distances.csv")
    assert cfg.output_path == Path("distances.csv")

    cfg = E.JobConfig.draft(command="bound-table").finalize()
    assert cfg.output == Path("bound_table.csv")
    assert cfg.ns[0] == 10 and cfg.ns[-1] == 5010
    assert cfg.rs == [0.1, 0.05, 0.025, 0.01]


def test_missing_command():
    """Test that the command is a required value."""
    with pytest.raises(ValueError):
        E.JobConfig.draft(inputs=["a.json"]).finalize()


@pytest.mark.parametrize(
    "values",
    [
        {"command": "dist", "inputs": ["a.json"]},
        {"command": "dist", "inputs": ["a.json", "b.json", "c.json"]},
        {"command": "entropy", "inputs": []},
        {"command": "bound-table", "inputs": ["a.json"]},
        {"command": "entropy", "inputs": ["cloud.csv"]},
        {"command": "rips", "inputs": ["a.json"], "max_scale": 1.0},
        {"command": "entropy", "inputs": ["a.json"], "p": 0.5},
        {"command": "entropy", "inputs": ["a.json"], "max_scale": -1.0},
        {"command": "features", "inputs": ["a.json"], "top_k": 0},
        {"command": "cluster", "inputs": ["a.json"]},
    ],
)
def test_invalid_jobs(values):
    """Test that inconsistent jobs are rejected at finalization."""
    with pytest.raises(ValueError):
        E.JobConfig.draft(**values).finalize()


def test_point_clouds_need_a_scale():
    """Test that a scale makes point-cloud inputs valid."""
    cfg = E.JobConfig.draft(
        command="entropy", inputs=["cloud.csv"], max_scale="2.5"
    ).finalize()
    assert cfg.max_scale == 2.5
    assert E.JobConfig.draft(command="rips", inputs=["x.txt"], max_scale=1).finalize()


@pytest.mark.parametrize(
    ("value", "expected"),
    [("inf", math.inf), ("Infinity", math.inf), (1, 1.0), ("2", 2.0), (math.inf, math.inf)],
)
def test_exponent_parsing(value, expected):
    """Test that the Wasserstein exponent accepts "inf"."""
    cfg = E.JobConfig.draft(command="entropy", inputs=["a.json"], p=value).finalize()
    assert cfg.p == expected


def test_policy_from_mapping():
    """Test that policies given as mappings resolve through the registry."""
    cfg = E.JobConfig.draft(
        command="features",
        inputs=["a.json"],
        inf_policy={"kind": "phi", "constant": 3},
    ).finalize()
    assert isinstance(cfg.inf_policy, E.PhiPolicyConfig)
    assert cfg.inf_policy.constant == 3.0

    with pytest.raises(ValidationError):
        E.JobConfig.draft(
            command="features", inputs=["a.json"], inf_policy={"kind": "phi"}
        ).finalize()
    with pytest.raises(ValidationError):
        E.JobConfig.draft(
            command="features", inputs=["a.json"], inf_policy={"kind": "clamp"}
        ).finalize()


def test_to_dict(entropy_job):
    """Test that dumped jobs are JSON compatible."""
    data = entropy_job.to_dict()
    assert data["command"] == "entropy"
    assert data["inputs"] == ["a.json", "b.json"]
    assert data["p"] == "inf"
    assert data["inf_policy"] == {"kind": "tau", "constant": 0.0}


def test_from_dict(entropy_job):
    """Test that a job validates from its python dump."""
    assert E.JobConfig.from_dict(entropy_job.model_dump()) == entropy_job


def test_json_file_roundtrip(entropy_job, tmp_path):
    """Test JSON file serialization roundtrip."""
    path = tmp_path / "job.json"
    entropy_job.to_json_file(path)

    data = json.loads(path.read_text())
    assert data["p"] == "inf"

    assert E.JobConfig.from_json_file(path) == entropy_job


def test_from_json_str_invalid():
    """Test error handling for invalid JSON input."""
    with pytest.raises(ValidationError):
        E.JobConfig.from_json_str('{"command": "entropy", "inputs": "a.json"}')

    with pytest.raises(ValidationError):
        E.JobConfig.from_json_str('{"command": "entropy", "inputs": ["a.json"], "top_k": "x"}')


@requires_yaml
def test_yaml_file_roundtrip(entropy_job, tmp_path):
    """Test YAML file serialization roundtrip."""
    path = tmp_path / "job.yaml"
    entropy_job.to_yaml_file(path)

    assert "command: entropy" in entropy_job.to_yaml_str()
    assert E.JobConfig.from_yaml(path) == entropy_job
    assert E.JobConfig.yaml_dict(path)["command"] == "entropy"


def test_yaml_not_installed(entropy_job):
    """Test error handling when pydantic-yaml is not installed."""
    with patch.dict(sys.modules, {"pydantic_yaml": None}):
        with pytest.raises(ImportError, match="Pydantic-yaml is required for YAML support"):
            entropy_job.to_yaml_str()

        with pytest.raises(ImportError, match="Pydantic-yaml is required for YAML support"):
            entropy_job.to_yaml_file("job.yaml")

        with pytest.raises(ImportError, match="Pydantic-yaml is required for YAML support"):
            E.JobConfig.from_yaml("job.yaml")


def test_missing_fields_are_rejected():
    """Test that a `MISSING` value left in a finished config is an error."""

    class Window(E.Config):
        start: float
        end: E.AllowMissing[float] = E.MISSING

    draft = Window.draft(start=0.0)
    assert draft.end is E.MISSING
    with pytest.raises(ValidationError):
        draft.finalize()

    draft = Window.draft(start=0.0)
    draft.end = 1.0
    assert draft.finalize() == Window(start=0.0, end=1.0)
