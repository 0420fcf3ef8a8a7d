"""Time evolution through compiled pulse sequences.

Free evolution is a single exact exponential of the static Hamiltonian.
Driven intervals are Trotterized: the lab-frame Hamiltonian including
the oscillating carrier is sampled at the midpoint of each step of
length ``dt`` and the step exponentials (each exactly unitary, via
eigendecomposition) are multiplied right to left.  The lab clock runs
continuously across the whole sequence, so the carrier phase of later
pulses follows from their start time; ``SimConfig.carrier_reset``
restarts the carrier at every pulse instead, for comparison.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .algebra import DensityMatrix, Operator, eig_hermitian
from .analysis import SweepResult, expval
from .sequences import Delay, DrivePulse, Pulse, PulseSequence, SimConfig, compile_cpmg, compile_xyn, inject_errors

_KEY_DIGITS = 12


@dataclass(frozen=True)
class EvolutionResult:
    """Final state, total propagator, optional per-element snapshots."""

    rho_final: DensityMatrix
    unitary: Operator
    intermediates: list | None = None
    times: list | None = None


def pulse_propagator(h0: Operator, pulse: DrivePulse, drive_op: Operator,
                     t_start: float = 0.0, dt: float = None) -> Operator:
    """Propagator of one driven interval.

    The pulse duration is snapped to an integer number of steps; the
    snap never moves the duration by more than half a step, and a pulse
    shorter than half a step is rejected.  Each step evolves under
    ``h0 + omega1 cos(2 pi omegap t + phase) * drive_op`` with ``t``
    taken at the step midpoint.
    """
    if dt is None or dt <= 0:
        raise ValueError("pulse_propagator requires a positive dt")
    nsteps = int(round(pulse.duration / dt))
    if nsteps < 1:
        raise ValueError(f"pulse duration {pulse.duration} shorter than half a step dt={dt}")
    drift = abs(pulse.duration - nsteps * dt)
    if drift > 0.5 * dt * (1.0 + 1e-9):
        raise ValueError(f"pulse duration {pulse.duration} drifts {drift} from the dt grid")
    if h0.dims != drive_op.dims:
        raise ValueError("h0 and drive operator live on different registers")

    t_mid = t_start + (np.arange(nsteps) + 0.5) * dt
    coeff = pulse.omega1 * np.cos(2.0 * np.pi * pulse.omegap * t_mid + pulse.phase)
    steps = h0.mat[None, :, :] + coeff[:, None, None] * drive_op.mat[None, :, :]
    w, v = np.linalg.eigh(steps)
    phases = np.exp(-2j * np.pi * dt * w)
    step_us = (v * phases[:, None, :]) @ v.conj().transpose(0, 2, 1)

    u = np.eye(h0.shape[0], dtype=complex)
    for k in range(nsteps):
        u = step_us[k] @ u
    return Operator(u, h0.dims)


class PropagatorCache:
    """Memoizes element propagators for one system.

    Free propagators reuse a single eigendecomposition of the static
    Hamiltonian; pulse propagators are keyed by start time and carrier
    parameters, which lets N sweeps reuse the shared sequence prefix.
    """

    def __init__(self, system):
        self.system = system
        self._evals, evecs = eig_hermitian(system.h0)
        self._evecs = evecs.mat
        self._free = {}
        self._pulses = {}

    def free(self, duration: float) -> np.ndarray:
        key = round(duration, _KEY_DIGITS)
        u = self._free.get(key)
        if u is None:
            phases = np.exp(-2j * np.pi * duration * self._evals)
            u = (self._evecs * phases[None, :]) @ self._evecs.conj().T
            self._free[key] = u
        return u

    def pulse(self, pulse: DrivePulse, t_start: float, dt: float) -> np.ndarray:
        key = (
            round(t_start, _KEY_DIGITS),
            round(pulse.duration, _KEY_DIGITS),
            round(pulse.omega1, _KEY_DIGITS),
            round(pulse.omegap, _KEY_DIGITS),
            round(pulse.phase, _KEY_DIGITS),
            dt,
        )
        u = self._pulses.get(key)
        if u is None:
            u = pulse_propagator(self.system.h0, pulse, self.system.drive_op, t_start, dt).mat
            self._pulses[key] = u
        return u


def apply_sequence(system, seq: PulseSequence, cfg: SimConfig,
                   cache: PropagatorCache | None = None) -> EvolutionResult:
    """Evolve ``system.rho0`` through a compiled sequence."""
    cfg.validate_for(seq)
    if cache is None:
        cache = PropagatorCache(system)
    elif cache.system is not system:
        raise ValueError("cache was built for a different system")

    dim = system.h0.shape[0]
    u_total = np.eye(dim, dtype=complex)
    t = 0.0
    rho0 = system.rho0.mat
    intermediates = [] if cfg.record_intermediate else None
    times = [] if cfg.record_intermediate else None

    for el in seq.elements:
        if isinstance(el, Delay):
            if el.duration > 0:
                u_el = cache.free(el.duration)
                u_total = u_el @ u_total
            t += el.duration
        elif isinstance(el, Pulse):
            t_start = 0.0 if cfg.carrier_reset else t
            u_el = cache.pulse(el.pulse, t_start, cfg.dt)
            u_total = u_el @ u_total
            # the clock advances by the snapped duration so later
            # carrier phases stay consistent with the actual evolution
            t += round(el.duration / cfg.dt) * cfg.dt
        else:
            raise TypeError(f"unknown sequence element {el!r}")
        if intermediates is not None:
            rho_t = u_total @ rho0 @ u_total.conj().T
            intermediates.append(DensityMatrix(Operator(rho_t, system.h0.dims)))
            times.append(t)

    rho_f = u_total @ rho0 @ u_total.conj().T
    return EvolutionResult(
        rho_final=DensityMatrix(Operator(rho_f, system.h0.dims), label=system.rho0.label),
        unitary=Operator(u_total, system.h0.dims),
        intermediates=intermediates,
        times=times,
    )


def _compile_family(family, n, tau, pulse, wrapper_phase, closing_rule):
    if family == "cpmg":
        rule = "plain" if closing_rule is None else closing_rule
        return compile_cpmg(n, tau, pulse, wrapper_phase, rule)
    if family == "xyn":
        rule = "xy8-parity" if closing_rule is None else closing_rule
        return compile_xyn(n, tau, pulse, wrapper_phase, rule)
    raise ValueError(f"unknown sequence family {family!r}")


def _provenance(payload: dict) -> dict:
    blob = json.dumps(payload, sort_keys=True, default=float).encode()
    return {
        "config_hash": hashlib.sha256(blob).hexdigest(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _measure(system, rho: DensityMatrix) -> dict:
    return {obs.label: expval(rho, obs.op) for obs in system.observables}


def sweep_tau(system, family: str, n: int, tau_grid, pulse: DrivePulse,
              cfg: SimConfig, wrapper_phase: float | None = None,
              closing_rule: str | None = None,
              length_factor: float = 1.0, freq_factor: float = 1.0,
              cache: PropagatorCache | None = None) -> SweepResult:
    """Observable traces versus inter-pulse spacing ``tau``.

    ``wrapper_phase`` defaults to the system's own convention.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size == 0:
        raise ValueError("empty tau grid")
    if wrapper_phase is None:
        wrapper_phase = system.wrapper_phase
    if cache is None:
        cache = PropagatorCache(system)
    traces = {obs.label: np.empty(tau_grid.size) for obs in system.observables}
    for i, tau in enumerate(tau_grid):
        seq = _compile_family(family, n, float(tau), pulse, wrapper_phase, closing_rule)
        if length_factor != 1.0 or freq_factor != 1.0:
            seq = inject_errors(seq, length_factor, freq_factor)
        res = apply_sequence(system, seq, cfg, cache)
        for label, value in _measure(system, res.rho_final).items():
            traces[label][i] = value
    prov = _provenance({
        "sweep": "tau", "family": family, "n": n,
        "tau_grid": [float(x) for x in tau_grid],
        "pulse": [pulse.omega1, pulse.omegap, pulse.phase, pulse.duration],
        "wrapper_phase": wrapper_phase, "closing_rule": closing_rule,
        "errors": [length_factor, freq_factor],
        "dt": cfg.dt, "carrier_reset": cfg.carrier_reset,
    })
    return SweepResult(axis="tau", values=tau_grid, traces=traces, provenance=prov)


def sweep_n(system, family: str, n_values, tau: float, pulse: DrivePulse,
            cfg: SimConfig, wrapper_phase: float | None = None,
            closing_rule: str | None = None,
            length_factor: float = 1.0, freq_factor: float = 1.0,
            cache: PropagatorCache | None = None) -> SweepResult:
    """Observable traces versus pulse count at fixed ``tau``.

    ``wrapper_phase`` defaults to the system's own convention.
    """
    n_values = np.asarray(n_values, dtype=int)
    if n_values.size == 0 or n_values.min() < 1:
        raise ValueError("n values must be positive integers")
    if wrapper_phase is None:
        wrapper_phase = system.wrapper_phase
    if cache is None:
        cache = PropagatorCache(system)
    traces = {obs.label: np.empty(n_values.size) for obs in system.observables}
    for i, n in enumerate(n_values):
        seq = _compile_family(family, int(n), tau, pulse, wrapper_phase, closing_rule)
        if length_factor != 1.0 or freq_factor != 1.0:
            seq = inject_errors(seq, length_factor, freq_factor)
        res = apply_sequence(system, seq, cfg, cache)
        for label, value in _measure(system, res.rho_final).items():
            traces[label][i] = value
    prov = _provenance({
        "sweep": "n", "family": family,
        "n_values": [int(x) for x in n_values], "tau": tau,
        "pulse": [pulse.omega1, pulse.omegap, pulse.phase, pulse.duration],
        "wrapper_phase": wrapper_phase, "closing_rule": closing_rule,
        "errors": [length_factor, freq_factor],
        "dt": cfg.dt, "carrier_reset": cfg.carrier_reset,
    })
    return SweepResult(axis="n", values=n_values.astype(float), traces=traces, provenance=prov)
