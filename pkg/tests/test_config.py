from __future__ import annotations

import pytest

from veech.config import RunConfig
from veech.errors import ConfigError


def test_defaults_are_valid():
    config = RunConfig()
    assert config.q_max >= 1
    assert config.tolerance > 0


@pytest.mark.parametrize("overrides", [
    {"q_max": 0},
    {"precision_start_bits": 16},
    {"workers": 0},
    {"format": "xml"},
    {"prefilter_tolerance": "abc"},
    {"prefilter_tolerance": "0"},
    {"prefilter_tolerance": "-1e-6"},
])
def test_validation(overrides):
    with pytest.raises(ConfigError):
        RunConfig(**overrides)


def test_environment_then_flags(monkeypatch):
    monkeypatch.setenv("VEECH_Q_MAX", "5")
    monkeypatch.setenv("VEECH_FORMAT", "TEXT")
    config = RunConfig.from_env()
    assert config.q_max == 5
    assert config.format == "text"
    assert config.with_overrides(q_max=7, format=None).q_max == 7
    assert config.with_overrides(q_max=None).q_max == 5


def test_bad_environment_value(monkeypatch):
    monkeypatch.setenv("VEECH_WORKERS", "many")
    with pytest.raises(ConfigError):
        RunConfig.from_env()


def test_echo_leaves_out_run_local_settings():
    echo = RunConfig(workers=3, output_path="x.json").echo()
    assert "workers" not in echo
    assert "output_path" not in echo
    assert set(echo) == {"q_max", "precision_start_bits", "prefilter_tolerance", "format"}
