"""
Pytest configuration and fixtures for the command-line tests.

This module provides:
- A scenario profile file built from the shared tiny profile
- A JSON config file with the reduced system parameters
- A runner that calls cli.main in-process and returns its exit code and stdout
"""

import json

import pytest

from chanmodel.scenario import save_profile
from cli import main


@pytest.fixture
def profile_file(tmp_path, tiny_profile):
    path = tmp_path / "tiny.json"
    save_profile(tiny_profile, path)
    return path


@pytest.fixture
def config_file(tmp_path, small_cfg, profile_file):
    """Defaults shared by gen and sweep: reduced arrays, the tiny profile, Q = 1."""
    path = tmp_path / "config.json"
    payload = {"system": small_cfg.to_dict(), "scenario": str(profile_file), "q": 1}
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def run_cli(capsys):
    def run(*argv):
        code = main([str(arg) for arg in argv])
        return code, capsys.readouterr().out

    return run


@pytest.fixture
def small_dataset(tmp_path, run_cli, config_file):
    out = tmp_path / "sf"
    code, _ = run_cli("gen", "--config", config_file, "--count", 20, "--seed", 3, "--out", out)
    assert code == 0
    return out
