"""Pulse-sequence construction: timing, phases and error injection.

A sequence is a flat list of delays and pulses.  Compilation fixes the
timing so that pi-pulse centers sit exactly ``tau`` apart and the
half-pi wrappers sit ``tau/2`` from the first and last pi pulse,
center to center.  Durations refer to the full pulse envelope; delays
are the gaps that remain between envelopes.

Pulse phases set the drive axis: phase 0 is x, ``pi/2`` is y.  CPMG
drives every pi pulse along x; the XY family alternates between x and
the wrapper axis.  Both open with a half-pi wrapper (by default along
y) that takes the central spin off the quantization axis, and close
with a wrapper that brings it back.  When the monitored level of the
driven transition is the lower one, the effective rotating frame turns
the other way and every carrier phase acquires a minus sign; passing
``wrapper_phase = 3 pi / 2`` realizes the same y-wrapper sequence in
such a conjugated frame, because x pulses are phase-sign invariant.  The closing wrapper is a plain half-pi by default; the
``"xy8-parity"`` rule upgrades it to ``3 pi / 2`` when the number of
two-pulse blocks ``n // 2`` is odd, which keeps the sign of the central
observable consistent across an N sweep of XY sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

HALF_PI = math.pi / 2.0

NOMINAL_ANGLES = (HALF_PI, math.pi, 3.0 * HALF_PI)


@dataclass(frozen=True)
class DrivePulse:
    """Carrier parameters of one pulse.

    ``omega1`` is the nutation (Rabi) frequency: a spin-1/2 driven
    resonantly flips in ``t_pi = 1 / (2 omega1)``.  The drive couples
    through twice the spin-x operator, which is what makes that closed
    form hold; see ``hamiltonians.drive_h1``.  ``omegap`` is the carrier
    frequency and ``phase`` the carrier phase offset in radians.
    """

    omega1: float
    omegap: float
    phase: float
    duration: float

    def __post_init__(self):
        if self.omega1 <= 0:
            raise ValueError(f"omega1 must be positive, got {self.omega1}")
        if self.omegap <= 0:
            raise ValueError(f"omegap must be positive, got {self.omegap}")
        if self.duration <= 0:
            raise ValueError(f"pulse duration must be positive, got {self.duration}")


@dataclass(frozen=True)
class Delay:
    """Free evolution for ``duration`` (may be zero at sequence edges)."""

    duration: float

    def __post_init__(self):
        if self.duration < -1e-15:
            raise ValueError(
                f"negative delay {self.duration}: pulses do not fit into the requested tau"
            )


@dataclass(frozen=True)
class Pulse:
    """A driven element: carrier parameters plus bookkeeping labels.

    ``nominal_angle`` is one of pi/2, pi, 3 pi/2 and records the intended
    rotation; the actual rotation follows from the carrier parameters and
    duration.  ``axis_phase`` duplicates ``pulse.phase`` for readability.
    """

    pulse: DrivePulse
    nominal_angle: float
    axis_phase: float

    def __post_init__(self):
        if not any(abs(self.nominal_angle - a) < 1e-12 for a in NOMINAL_ANGLES):
            raise ValueError(f"nominal angle {self.nominal_angle} not in {{pi/2, pi, 3pi/2}}")

    @property
    def duration(self) -> float:
        return self.pulse.duration


@dataclass(frozen=True)
class PulseSequence:
    """Compiled sequence plus the parameters it was compiled from."""

    elements: tuple
    family: str
    n_pulses: int
    tau: float
    base_pulse: DrivePulse
    wrapper_phase: float
    closing_rule: str
    error_length_factor: float = 1.0
    error_freq_factor: float = 1.0

    def duration(self) -> float:
        return float(sum(e.duration for e in self.elements))

    def pulses(self):
        return [e for e in self.elements if isinstance(e, Pulse)]


@dataclass(frozen=True)
class SimConfig:
    """Numerical evolution settings.

    ``dt`` is the Trotter step used inside pulses (free evolution is
    exact).  It must resolve both the pulse envelope (at most one
    twentieth of the pi duration) and the carrier; presets pick
    ``dt ~ 1 / (20 omegap)`` which satisfies both for resonant pulses.
    """

    dt: float
    record_intermediate: bool = False
    carrier_reset: bool = False

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    def validate_for(self, seq: PulseSequence):
        t_pi = seq.base_pulse.duration * seq.error_length_factor
        if self.dt > t_pi / 20 + 1e-15:
            raise ValueError(
                f"dt={self.dt} too coarse for pi duration {t_pi}: need dt <= t_pi/20"
            )


def _closing_angle(family: str, n: int, closing_rule: str) -> float:
    if closing_rule == "plain":
        return HALF_PI
    if closing_rule == "xy8-parity":
        # odd number of two-pulse blocks flips the sign of the central
        # observable; a 3pi/2 closer undoes that
        return 3.0 * HALF_PI if (n // 2) % 2 == 1 else HALF_PI
    raise ValueError(f"unknown closing rule {closing_rule!r}")


def _axis_phases(family: str, n: int, wrapper_phase: float):
    # the alternating axis is the wrapper axis, so a conjugated frame
    # (wrapper at -pi/2) negates every phase in the sequence at once
    if family == "cpmg":
        return [0.0] * n
    if family == "xyn":
        return [0.0 if k % 2 == 0 else wrapper_phase for k in range(n)]
    raise ValueError(f"unknown sequence family {family!r}")


def _compile(family, n, tau, pi_pulse, wrapper_phase, closing_rule,
             length_factor=1.0, freq_factor=1.0) -> PulseSequence:
    if n < 1:
        raise ValueError(f"need at least one pi pulse, got n={n}")
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")

    t_pi = pi_pulse.duration * length_factor
    omegap = pi_pulse.omegap * freq_factor
    t_half = t_pi / 2.0
    closing = _closing_angle(family, n, closing_rule)
    t_close = t_half * (3.0 if closing > math.pi else 1.0)

    def mk(duration, angle, axis):
        return Pulse(
            DrivePulse(pi_pulse.omega1, omegap, axis, duration),
            nominal_angle=angle,
            axis_phase=axis,
        )

    open_gap = tau / 2.0 - t_pi / 2.0 - t_half / 2.0
    close_gap = tau / 2.0 - t_pi / 2.0 - t_close / 2.0
    inner_gap = tau - t_pi
    for gap, name in ((open_gap, "opening"), (close_gap, "closing"), (inner_gap, "inter-pulse")):
        if gap < -1e-12:
            raise ValueError(
                f"{name} gap is negative ({gap:.4g}): tau={tau} too short for pulse length {t_pi}"
            )

    elements = [mk(t_half, HALF_PI, wrapper_phase), Delay(max(open_gap, 0.0))]
    for k, axis in enumerate(_axis_phases(family, n, wrapper_phase)):
        elements.append(mk(t_pi, math.pi, axis))
        if k < n - 1:
            elements.append(Delay(inner_gap))
    elements.append(Delay(max(close_gap, 0.0)))
    elements.append(mk(t_close, closing, wrapper_phase))

    return PulseSequence(
        elements=tuple(elements),
        family=family,
        n_pulses=n,
        tau=tau,
        base_pulse=pi_pulse,
        wrapper_phase=wrapper_phase,
        closing_rule=closing_rule,
        error_length_factor=length_factor,
        error_freq_factor=freq_factor,
    )


def compile_cpmg(n: int, tau: float, pi_pulse: DrivePulse,
                 wrapper_phase: float = HALF_PI,
                 closing_rule: str = "plain") -> PulseSequence:
    """CPMG-n: all pi pulses along x, wrappers along ``wrapper_phase``."""
    return _compile("cpmg", n, tau, pi_pulse, wrapper_phase, closing_rule)


def compile_xyn(n: int, tau: float, pi_pulse: DrivePulse,
                wrapper_phase: float = HALF_PI,
                closing_rule: str = "xy8-parity") -> PulseSequence:
    """XY-n: pi-pulse axes alternate between x and the wrapper axis.

    With the default wrapper this is the usual x, y, x, y, ... pattern;
    odd ``n`` truncates the alternation.  The default closing rule keeps
    the central-observable sign consistent across N sweeps.
    """
    return _compile("xyn", n, tau, pi_pulse, wrapper_phase, closing_rule)


def inject_errors(seq: PulseSequence, length_factor: float = 1.0,
                  freq_factor: float = 1.0) -> PulseSequence:
    """Systematic pulse miscalibration.

    Every pulse duration is scaled by ``length_factor`` and every carrier
    frequency by ``freq_factor``; delays are then recomputed so pi-pulse
    centers remain ``tau`` apart.  Raises when the stretched pulses no
    longer fit into the timing grid.
    """
    if length_factor <= 0 or freq_factor <= 0:
        raise ValueError("error factors must be positive")
    return _compile(
        seq.family, seq.n_pulses, seq.tau, seq.base_pulse,
        seq.wrapper_phase, seq.closing_rule,
        length_factor=length_factor * seq.error_length_factor,
        freq_factor=freq_factor * seq.error_freq_factor,
    )
