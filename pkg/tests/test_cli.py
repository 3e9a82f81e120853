"""Tests for the experiment runner CLI."""

import json
import os

import numpy as np
import pytest

from kgdamp.cli import ConfigError, config_hash, main, profile_from_descriptor, run_config


def write_config(tmp_path, config):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return str(path)


def artifact(tmp_path, command, config):
    return os.path.join(str(tmp_path), f"{command}-{config_hash(config)}")


class TestProfileDescriptor:
    def test_none(self):
        assert profile_from_descriptor(None) is None
        assert profile_from_descriptor({"kind": "none"}) is None

    def test_cosine(self):
        p = profile_from_descriptor({"kind": "cosine", "mean": 1.0, "amplitude": 0.5})
        assert p.eval(0.0) == pytest.approx(1.5)

    def test_unknown_rejected(self):
        with pytest.raises(ConfigError):
            profile_from_descriptor({"kind": "sawtooth"})

    def test_invalid_params_surface_as_config_error(self):
        with pytest.raises(ConfigError):
            profile_from_descriptor({"kind": "cosine", "mean": 0.1, "amplitude": 1.0})


class TestRunConfig:
    def test_gcc_check_cosine(self, tmp_path):
        config = {"command": "gcc-check", "profile": {"kind": "cosine"},
                  "horizon": 1.0, "n_x": 16}
        status = run_config(config, str(tmp_path))
        assert status == 0
        base = artifact(tmp_path, "gcc-check", config)
        lines = open(base + ".csv").read().strip().split("\n")
        assert lines[0].startswith("T,n_x,n_xi,alpha_hat")
        alpha = float(lines[1].split(",")[3])
        assert alpha == pytest.approx(1.0, abs=1e-8)

    def test_simulate_conservative(self, tmp_path):
        config = {"command": "simulate", "profile": "none", "t_end": 2.0,
                  "grid_n": 32, "data": {"kind": "gaussian", "width": 0.15}}
        status = run_config(config, str(tmp_path))
        assert status == 0
        base = artifact(tmp_path, "simulate", config)
        rows = open(base + ".csv").read().strip().split("\n")
        assert rows[0] == "t,E,D,eta"
        energies = np.array([float(r.split(",")[1]) for r in rows[1:]])
        assert np.max(np.abs(energies - energies[0])) <= 1e-11 * energies[0]

    def test_idempotent_bytes(self, tmp_path):
        config = {"command": "resolvent-scan", "profile": {"kind": "cosine"},
                  "m": 1.0, "etas": [1.0], "taus": [2.0, 3.0], "n_sigma": 8}
        run_config(config, str(tmp_path))
        base = artifact(tmp_path, "resolvent-scan", config)
        first = open(base + ".csv", "rb").read()
        run_config(config, str(tmp_path))
        assert open(base + ".csv", "rb").read() == first

    def test_semiclassical_scan(self, tmp_path):
        config = {"command": "semiclassical-scan", "profile": {"kind": "constant"},
                  "hs": [0.25], "epss": [0.5], "n_sigma": 64}
        assert run_config(config, str(tmp_path)) == 0

    def test_semigroup_lab(self, tmp_path):
        config = {"command": "semigroup-lab", "seeds": [0, 1], "dims": [4],
                  "spectral_gap": 0.2}
        assert run_config(config, str(tmp_path)) == 0
        base = artifact(tmp_path, "semigroup-lab", config)
        lines = open(base + ".csv").read().strip().split("\n")
        assert lines[0] == "seed,n,kind,C1,M,gamma,C,kappa,nu,c1,sup_stat"
        assert len(lines) == 5  # two seeds x two experiment kinds

    def test_fit_command(self, tmp_path):
        config = {"command": "fit", "profile": {"kind": "cosine"}, "etas": [1],
                  "t_end": 20.0, "grid_n": 32,
                  "data": {"kind": "gaussian", "width": 0.15}}
        assert run_config(config, str(tmp_path)) == 0
        base = artifact(tmp_path, "fit", config)
        lines = open(base + ".csv").read().strip().split("\n")
        assert lines[0] == "eta,model,gamma_or_c,C,r2,window_lo,window_hi"
        gamma = float(lines[1].split(",")[2])
        assert gamma > 0

    def test_all_acceptance_subset(self, tmp_path):
        config = {"command": "all-acceptance", "criteria": [2, 3]}
        assert run_config(config, str(tmp_path)) == 0
        base = artifact(tmp_path, "all-acceptance", config)
        meta = json.loads(open(base + ".json").read())
        assert meta["all_passed"] is True
        assert len(meta["summary"]) == 2

    def test_unknown_command(self, tmp_path):
        with pytest.raises(ConfigError):
            run_config({"command": "explode"}, str(tmp_path))

    def test_empty_list_rejected(self, tmp_path):
        config = {"command": "resolvent-scan", "profile": {"kind": "cosine"},
                  "m": 1.0, "etas": [], "taus": [1.0]}
        with pytest.raises(ConfigError):
            run_config(config, str(tmp_path))

    def test_nonpositive_mass_rejected(self, tmp_path):
        config = {"command": "simulate", "profile": "none", "t_end": 1.0, "m": -1.0}
        with pytest.raises(ConfigError):
            run_config(config, str(tmp_path))


class TestMain:
    def test_malformed_json_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = main(["--config", str(bad), "--out", str(tmp_path)])
        assert code == 2
        assert not [f for f in os.listdir(tmp_path) if f.endswith(".csv")]

    def test_good_run_exit_0(self, tmp_path):
        cfg = write_config(tmp_path, {"command": "gcc-check",
                                      "profile": {"kind": "constant"}, "n_x": 8})
        assert main(["--config", cfg, "--out", str(tmp_path)]) == 0

    def test_config_error_exit_2(self, tmp_path):
        cfg = write_config(tmp_path, {"command": "bogus"})
        assert main(["--config", cfg, "--out", str(tmp_path)]) == 2


class TestHash:
    def test_deterministic_and_order_independent(self):
        a = config_hash({"b": 1, "a": [1, 2]})
        b = config_hash({"a": [1, 2], "b": 1})
        assert a == b and len(a) == 16
