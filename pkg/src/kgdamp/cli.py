"""Experiment runner: config parsing, orchestration, deterministic artifacts.

A run is described by a JSON config with a ``command`` field and per-command
numeric parameters.  Artifacts are written as ``<command>-<hash>.csv`` plus
a ``.json`` sidecar, where the hash is the sha256 of the canonicalized
config, so identical configs reproduce byte-identical outputs.  All floats
are formatted with 17 significant digits and written atomically
(temp-then-rename).

Exit codes: 0 success, 1 numerical failure (unexpected singular fibers,
failed fits, failed acceptance criteria), 2 config error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile

import numpy as np

from kgdamp.damping import DampingProfile, gcc_infimum, gcc_report_csv
from kgdamp.fields import TorusGrid, make_state
from kgdamp.evolve import simulate
from kgdamp import bloch
from kgdamp import semigroup_lab as sgl
from kgdamp.decayfit import fit_exponential, verify_power_bound, fits_csv
from kgdamp import acceptance

__all__ = ["main", "run_config", "config_hash", "profile_from_descriptor"]

COMMANDS = (
    "simulate",
    "resolvent-scan",
    "gcc-check",
    "semiclassical-scan",
    "semigroup-lab",
    "fit",
    "all-acceptance",
)


class ConfigError(ValueError):
    pass


def config_hash(config: dict) -> str:
    """sha256 over the canonicalized (sorted, compact) JSON of the config."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def profile_from_descriptor(desc) -> DampingProfile | None:
    """Build a damping profile from a JSON descriptor.

    Kinds: "none" (conservative), "constant" {level, dim}, "cosine"
    {mean, amplitude, dim}, "smoothed-strip" {half_width, ramp, level, dim},
    "fourier" {table: {"n" or "n1,n2": [re, im]}, dim}.
    """
    if desc is None or desc == "none" or (isinstance(desc, dict) and desc.get("kind") == "none"):
        return None
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("profile descriptor must be a dict with a 'kind'")
    kind = desc["kind"]
    dim = int(desc.get("dim", 1))
    try:
        if kind == "constant":
            return DampingProfile.constant(float(desc.get("level", 1.0)), dim)
        if kind == "cosine":
            return DampingProfile.cosine(
                float(desc.get("mean", 1.0)), float(desc.get("amplitude", 1.0)), dim
            )
        if kind == "smoothed-strip":
            return DampingProfile.smoothed_strip(
                float(desc.get("half_width", 0.15)),
                float(desc.get("ramp", 0.05)),
                float(desc.get("level", 1.0)),
                dim,
            )
        if kind == "fourier":
            table = {}
            for key, val in desc["table"].items():
                parts = tuple(int(k) for k in str(key).split(","))
                n = parts[0] if len(parts) == 1 else parts
                table[n] = complex(val[0], val[1])
            return DampingProfile.from_fourier(table, dim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown profile kind: {kind}")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _require(config: dict, key: str):
    if key not in config:
        raise ConfigError(f"config missing required key: {key}")
    return config[key]


def _state_from_config(config: dict, grid: TorusGrid):
    data = config.get("data", {"kind": "gaussian"})
    kind = data.get("kind", "gaussian")
    kw = {k: v for k, v in data.items() if k != "kind"}
    sigma = tuple(config.get("sigma", [0.0] * grid.dim))
    return make_state(grid, sigma, float(config.get("m", 1.0)), kind, **kw)


def _cmd_simulate(config: dict) -> tuple:
    p = profile_from_descriptor(config.get("profile"))
    dim = p.dim if p is not None else int(config.get("dim", 1))
    grid = TorusGrid(dim, int(config.get("grid_n", 64)))
    state = _state_from_config(config, grid)
    rec = simulate(
        state,
        p,
        eta=int(config.get("eta", 1)),
        t_end=float(_require(config, "t_end")),
        dt=config.get("dt"),
        sample_stride=int(config.get("sample_stride", 10)),
    )
    return rec.to_csv(), {"input_norms": rec.input_norms, "eta": rec.eta}, 0


def _cmd_resolvent_scan(config: dict) -> tuple:
    p = profile_from_descriptor(_require(config, "profile"))
    if p is None:
        raise ConfigError("resolvent-scan needs a nonzero profile")
    plan = {
        "mode": config.get("mode", "scalar"),
        "profile": p,
        "m": float(config.get("m", 1.0)),
        "etas": _require(config, "etas"),
        "taus": _require(config, "taus"),
        "n_sigma": int(config.get("n_sigma", 64 if p.dim == 1 else 8)),
    }
    if "cutoff" in config:
        plan["cutoff"] = int(config["cutoff"])
    if "cutoff_cap" in config:
        plan["cutoff_cap"] = int(config["cutoff_cap"])
    samples = bloch.scan(plan)
    bad = any(s.singular for s in samples) and not config.get("allow_singular", False)
    return bloch.scan_csv(samples), {"n_samples": len(samples)}, (1 if bad else 0)


def _cmd_gcc_check(config: dict) -> tuple:
    p = profile_from_descriptor(_require(config, "profile"))
    if p is None:
        raise ConfigError("gcc-check needs a nonzero profile")
    rep = gcc_infimum(
        p,
        horizon=float(config.get("horizon", 4.0)),
        n_x=int(config.get("n_x", 64)),
        n_xi=config.get("n_xi"),
    )
    return gcc_report_csv(rep), {"alpha_hat": rep.alpha_hat}, 0


def _cmd_semiclassical_scan(config: dict) -> tuple:
    p = profile_from_descriptor(_require(config, "profile"))
    if p is None:
        raise ConfigError("semiclassical-scan needs a nonzero profile")
    plan = {
        "mode": "semiclassical",
        "profile": p,
        "hs": _require(config, "hs"),
        "epss": _require(config, "epss"),
        "n_sigma": int(config.get("n_sigma", 512)),
    }
    if "cutoff" in config:
        plan["cutoff"] = int(config["cutoff"])
    samples = bloch.scan(plan)
    bad = any(s.singular for s in samples)
    return bloch.scan_csv(samples), {"n_samples": len(samples)}, (1 if bad else 0)


def _cmd_semigroup_lab(config: dict) -> tuple:
    seeds = config.get("seeds", list(range(10)))
    dims = config.get("dims", [2, 5, 20, 50])
    gap = float(config.get("spectral_gap", 0.2))
    kappa = int(config.get("kappa", 2))
    nu = float(config.get("nu", 0.5))
    rows = []
    status = 0
    for i, seed in enumerate(seeds):
        n = int(dims[i % len(dims)])
        case = sgl.random_dissipative(n, int(seed), spectral_gap=gap)
        try:
            g = sgl.gearhart_experiment(case)
            rows.append({"seed": seed, "n": n, "kind": "gearhart", **g})
        except ValueError:
            status = 1
        try:
            b = sgl.borichev_tomilov_experiment(case, kappa, nu)
            rows.append({"seed": seed, "n": n, "kind": "borichev", **b})
        except ValueError:
            status = 1
    return sgl.report_csv(rows), {"n_rows": len(rows)}, status


def _cmd_fit(config: dict) -> tuple:
    p = profile_from_descriptor(config.get("profile"))
    dim = p.dim if p is not None else int(config.get("dim", 1))
    grid = TorusGrid(dim, int(config.get("grid_n", 64)))
    window = tuple(config.get("window", (0.1, 1.0)))
    model = config.get("model", "exponential")
    fits = []
    status = 0
    for eta in _require(config, "etas"):
        state = _state_from_config(config, grid)
        rec = simulate(
            state,
            p,
            eta=int(eta),
            t_end=float(_require(config, "t_end")),
            dt=config.get("dt"),
            sample_stride=int(config.get("sample_stride", 10)),
        )
        try:
            if model == "exponential":
                fits.append((eta, fit_exponential(rec, window)))
            else:
                fits.append((eta, verify_power_bound(rec)))
        except ValueError:
            status = 1
    return fits_csv(fits), {"n_fits": len(fits)}, status


def _cmd_all_acceptance(config: dict) -> tuple:
    numbers = config.get("criteria")
    results = acceptance.run_all(numbers)
    rows = ["criterion,name,passed"]
    for r in results:
        rows.append(f"{r.number},{r.name},{int(r.passed)}")
    meta = {
        "summary": acceptance.summary_lines(results).strip().split("\n"),
        "details": {str(r.number): _jsonable(r.details) for r in results},
        "all_passed": all(r.passed for r in results),
    }
    return "\n".join(rows) + "\n", meta, (0 if meta["all_passed"] else 1)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


_RUNNERS = {
    "simulate": _cmd_simulate,
    "resolvent-scan": _cmd_resolvent_scan,
    "gcc-check": _cmd_gcc_check,
    "semiclassical-scan": _cmd_semiclassical_scan,
    "semigroup-lab": _cmd_semigroup_lab,
    "fit": _cmd_fit,
    "all-acceptance": _cmd_all_acceptance,
}


def run_config(config: dict, out_dir: str, verbose: bool = False) -> int:
    """Validate, run, and write artifacts; returns the process exit code."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    command = _require(config, "command")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command: {command}")
    if "m" in config and float(config["m"]) <= 0:
        raise ConfigError("mass m must be positive")
    for key in ("etas", "taus", "hs", "epss", "seeds"):
        if key in config and not config[key]:
            raise ConfigError(f"list '{key}' must be non-empty")

    digest = config_hash(config)
    csv_text, meta, status = _RUNNERS[command](config)

    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"{command}-{digest}")
    _atomic_write(base + ".csv", csv_text)
    meta_full = {"config": config, "config_hash": digest, "status": status}
    meta_full.update(_jsonable(meta))
    _atomic_write(base + ".json", json.dumps(meta_full, sort_keys=True, indent=2) + "\n")
    if verbose:
        print(f"wrote {base}.csv and {base}.json (status {status})", file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kgdamp",
        description="Numerical laboratory for Klein-Gordon energy decay with oscillating damping",
    )
    parser.add_argument("--config", required=True, help="path to a JSON experiment config")
    parser.add_argument("--out", default=".", help="output directory for artifacts")
    parser.add_argument("--threads", type=int, default=1, help="worker thread cap")
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)

    if args.threads >= 1:
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_config(config, args.out, verbose=args.verbose)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
