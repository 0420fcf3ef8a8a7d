"""Experiment execution: sweeps to CSV files plus a JSON manifest.

CSV values are written with 12 significant digits and newline-terminated
rows, so identical configs produce byte-identical files.  The manifest
records the canonical config hash, the package version, wall-clock time,
a checksum for every emitted file and the computed metric summary.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import DensityMatrix, Operator, basis_dm, partial_trace
from .analysis import GateMetrics, concurrence, find_resonance, pseudo_fidelity, state_fidelity
from .config import ConfigError, ExperimentConfig
from .evolution import PropagatorCache, apply_sequence, sweep_n, sweep_tau
from .sequences import inject_errors


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".12g")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _observable_labels(cfg: ExperimentConfig, system) -> list:
    available = [obs.label for obs in system.observables]
    wanted = cfg.data["outputs"]["observables"]
    if wanted is None:
        return available
    missing = [w for w in wanted if w not in available]
    if missing:
        raise ConfigError([f"outputs.observables: unknown {missing}; have {available}"])
    return list(wanted)


def _fit_observable(cfg: ExperimentConfig, system):
    label = cfg.data["outputs"]["fit_observable"]
    if label is None:
        label = system.observables[-1].label
    for obs in system.observables:
        if obs.label == label:
            return obs
    raise ConfigError([f"outputs.fit_observable: unknown {label!r}"])


def _run_sweep(cfg, system, pulse, sim_cfg, cache=None, length_factor=None, freq_factor=None):
    seq = cfg.data["sequence"]
    kwargs = dict(
        wrapper_phase=seq["wrapper_phase"],
        closing_rule=seq["closing_rule"],
        length_factor=seq["length_factor"] if length_factor is None else length_factor,
        freq_factor=seq["freq_factor"] if freq_factor is None else freq_factor,
        cache=cache,
    )
    values = cfg.sweep_values()
    if cfg.sweep_axis == "n":
        return sweep_n(system, seq["family"], values, float(seq["tau"]), pulse, sim_cfg, **kwargs)
    return sweep_tau(system, seq["family"], int(seq["n"]), values, pulse, sim_cfg, **kwargs)


def _state_at(cfg, system, pulse, sim_cfg, n, cache):
    from .evolution import _compile_family

    seq = cfg.data["sequence"]
    wrapper = seq["wrapper_phase"]
    if wrapper is None:
        wrapper = system.wrapper_phase
    compiled = _compile_family(seq["family"], int(n), float(seq["tau"]), pulse,
                               wrapper, seq["closing_rule"])
    if seq["length_factor"] != 1.0 or seq["freq_factor"] != 1.0:
        compiled = inject_errors(compiled, seq["length_factor"], seq["freq_factor"])
    return apply_sequence(system, compiled, sim_cfg, cache).rho_final


def _target_site(system, label: str) -> int:
    if label == "Iz":
        return 1
    if label.startswith("Iz") and label[2:].isdigit():
        return int(label[2:])
    raise ConfigError([f"outputs.fit_observable: {label!r} is not a target observable"])


def _polarization_target(system, site: int) -> DensityMatrix:
    dims = system.dims
    if dims[0] == 3:
        central = np.diag([0.0, 0.5, 0.5]).astype(complex)  # qubit manifold m_S in {0, -1}
    else:
        central = np.eye(dims[0], dtype=complex) / dims[0]
    mat = central
    for j, d in enumerate(dims[1:], start=1):
        part = np.zeros((d, d), dtype=complex)
        if j == site:
            part[0, 0] = 1.0
        else:
            part = np.eye(d, dtype=complex) / d
        mat = np.kron(mat, part)
    return DensityMatrix(Operator(mat, dims))


def _clamp_to_grid(n: float, values) -> int:
    n = int(round(n))
    return int(min(max(n, int(values.min())), int(values.max())))


def _compute_metrics(cfg, system, pulse, sim_cfg, sweep, cache):
    metrics = GateMetrics()
    extras = {}
    obs = _fit_observable(cfg, system)
    value_range = (obs.lo, obs.hi)
    tau = cfg.data["sequence"].get("tau")
    n_pi = None

    def fitted_n_pi():
        nonlocal n_pi
        if n_pi is None:
            _, n_pi = pseudo_fidelity(sweep, obs.label, value_range)
        return n_pi

    for name in cfg.data["outputs"]["metrics"]:
        if name == "pseudo-fidelity":
            f_tilde, n_pi = pseudo_fidelity(sweep, obs.label, value_range)
            metrics.f_tilde = f_tilde
            metrics.n_pi = n_pi
            if cfg.sweep_axis == "n":
                metrics.t_pi = n_pi * float(tau)
        elif name == "resonance":
            extras["resonance_tau"] = find_resonance(sweep, obs.label)
        elif name == "inversion-fidelity":
            n_star = _clamp_to_grid(fitted_n_pi(), sweep.values)
            rho = _state_at(cfg, system, pulse, sim_cfg, n_star, cache)
            site = _target_site(system, obs.label)
            reduced = partial_trace(rho, {site})
            target = basis_dm(reduced.dims, (1,))
            metrics.state_fidelity = state_fidelity(reduced, target)
            extras["inversion_n"] = n_star
        elif name == "concurrence":
            n_half = _clamp_to_grid(fitted_n_pi() / 2.0, sweep.values)
            rho = _state_at(cfg, system, pulse, sim_cfg, n_half, cache)
            if rho.dims != (2, 2):
                raise ConfigError(["outputs.metrics: concurrence needs a two-qubit register"])
            metrics.concurrence = concurrence(rho)
            extras["concurrence_n"] = n_half
        elif name == "polarization":
            trace = sweep.trace(obs.label)
            idx = int(np.argmax(trace))
            n_star = int(sweep.values[idx])
            extras["iz_max"] = float(trace[idx])
            extras["iz_max_n"] = n_star
            extras["efficiency"] = float(trace[idx] / obs.hi)
            if tau is not None:
                extras["t_pol"] = n_star * float(tau)
            rho = _state_at(cfg, system, pulse, sim_cfg, n_star, cache)
            site = _target_site(system, obs.label)
            metrics.state_fidelity = state_fidelity(rho, _polarization_target(system, site))
    return metrics, extras


def _sweep_rows(sweep, labels):
    rows = []
    for i, value in enumerate(sweep.values):
        axis_value = int(value) if sweep.axis == "n" else value
        rows.append([_fmt(axis_value)] + [_fmt(sweep.traces[lab][i]) for lab in labels])
    return rows


def _manifest(cfg, verb, out_dir, files, metrics, extras, wall_clock):
    entries = []
    for path in files:
        entries.append({"path": path.name, "sha256": _sha256(path), "bytes": path.stat().st_size})
    payload = {
        "name": cfg.name,
        "verb": verb,
        "config_hash": cfg.config_hash(),
        "version": __version__,
        "wall_clock_s": round(wall_clock, 3),
        "axis": cfg.sweep_axis,
        "outputs": entries,
        "metrics": asdict(metrics),
        "extras": extras,
    }
    path = out_dir / f"{cfg.name}-manifest.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return payload


def run_experiment(cfg: ExperimentConfig, out_dir, threads: int = 1,
                   dt_override: float | None = None) -> dict:
    """Execute one sweep config; returns the manifest dictionary."""
    start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pulse = cfg.build_pulse()
    sim_cfg = cfg.sim_config(dt_override)
    scan = cfg.data.get("coupling_scan")

    if scan is None:
        system = cfg.build_system()
        labels = _observable_labels(cfg, system)
        cache = PropagatorCache(system)
        sweep = _run_sweep(cfg, system, pulse, sim_cfg, cache)
        csv_path = out / f"{cfg.name}.csv"
        _write_csv(csv_path, [sweep.axis] + labels, _sweep_rows(sweep, labels))
        metrics, extras = _compute_metrics(cfg, system, pulse, sim_cfg, sweep, cache)
        return _manifest(cfg, "run", out, [csv_path], metrics, extras,
                         time.perf_counter() - start)

    # one sweep per coupling value, then the inverse-coupling gate-time fit
    def run_one(azx: float):
        system = cfg.build_system(azx_override=azx)
        cache = PropagatorCache(system)
        sweep = _run_sweep(cfg, system, pulse, sim_cfg, cache)
        obs = _fit_observable(cfg, system)
        _, n_pi = pseudo_fidelity(sweep, obs.label, (obs.lo, obs.hi))
        labels = _observable_labels(cfg, system)
        return sweep, labels, n_pi

    azx_values = [float(a) for a in scan]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, azx_values))
    else:
        results = [run_one(a) for a in azx_values]

    files = []
    gate_times = {}
    for azx, (sweep, labels, n_pi) in zip(azx_values, results):
        csv_path = out / f"{cfg.name}-azx{azx:g}.csv"
        _write_csv(csv_path, [sweep.axis] + labels, _sweep_rows(sweep, labels))
        files.append(csv_path)
        gate_times[f"{azx:g}"] = n_pi * float(cfg.data["sequence"]["tau"])

    from .analysis import tpi_scaling

    c_fit, residuals = tpi_scaling([(float(a), gate_times[f"{a:g}"]) for a in azx_values])
    metrics = GateMetrics()
    extras = {
        "c_fit": c_fit,
        "worst_residual": float(np.abs(residuals).max()),
        "gate_time_by_azx": gate_times,
    }
    return _manifest(cfg, "run", out, files, metrics, extras, time.perf_counter() - start)


def errmap_experiment(cfg: ExperimentConfig, out_dir, threads: int = 1,
                      dt_override: float | None = None) -> dict:
    """Pseudo-fidelity over a pulse-error grid; failed cells become nan."""
    start = time.perf_counter()
    grid = cfg.data.get("errmap")
    if grid is None:
        raise ConfigError(["errmap: config has no errmap section"])
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    system = cfg.build_system()
    pulse = cfg.build_pulse()
    sim_cfg = cfg.sim_config(dt_override)
    obs = _fit_observable(cfg, system)
    seq = cfg.data["sequence"]
    length_factors = [float(x) for x in grid["length_factors"]]
    freq_factors = [float(x) for x in grid["freq_factors"]]

    def cell(factors):
        lf, ff = factors
        try:
            sweep = _run_sweep(cfg, system, pulse, sim_cfg, cache=None,
                               length_factor=lf * seq["length_factor"],
                               freq_factor=ff * seq["freq_factor"])
            f_tilde, _ = pseudo_fidelity(sweep, obs.label, (obs.lo, obs.hi))
            return f_tilde
        except ValueError:
            return math.nan

    cells = [(lf, ff) for lf in length_factors for ff in freq_factors]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(cell, cells))
    else:
        flat = [cell(c) for c in cells]
    values = np.array(flat).reshape(len(length_factors), len(freq_factors))

    csv_path = out / f"{cfg.name}-errmap.csv"
    header = ["length_factor"] + [_fmt(ff) for ff in freq_factors]
    rows = [[_fmt(lf)] + [_fmt(v) for v in row] for lf, row in zip(length_factors, values)]
    _write_csv(csv_path, header, rows)

    finite = values[np.isfinite(values)]
    extras = {
        "rows": len(length_factors),
        "cols": len(freq_factors),
        "failed_cells": int(np.isnan(values).sum()),
        "min_f_tilde": float(finite.min()) if finite.size else math.nan,
        "max_f_tilde": float(finite.max()) if finite.size else math.nan,
    }
    return _manifest(cfg, "errmap", out, [csv_path], GateMetrics(), extras,
                     time.perf_counter() - start)
