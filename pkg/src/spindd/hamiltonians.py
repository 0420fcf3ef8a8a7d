"""Static Hamiltonians, drive terms and ready-made spin systems.

Two models are provided.  The generic model is a central spin-1/2 with
Larmor frequency ``omega00`` coupled to target spin-1/2 qubits through
``azx Sz Ix`` terms (or a full coupling tensor); all frequencies are in
one arbitrary unit and times in its inverse.  The NV model is the
spin-1 electron of a nitrogen-15 vacancy center hyperfine-coupled to
its host nucleus, with a zero-field splitting and a static field of
adjustable misalignment; units are MHz, microseconds and millitesla.

The drive couples through twice the central spin-x operator,

    H1(t) = omega1 cos(2 pi omegap t + phase) * (2 Sx),

so ``omega1`` is the nutation frequency of a resonantly driven
spin-1/2: a pi pulse takes ``t_pi = 1 / (2 omega1)``.  On the spin-1
electron the 0 to -1 transition has a sqrt(2) larger matrix element,
which ``calibrate_rabi`` picks up automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .algebra import (
    DensityMatrix,
    Operator,
    basis_dm,
    eig_hermitian,
    embed,
    identity,
    spin_ops,
    tensor,
)
from .sequences import DrivePulse

__all__ = [
    "TargetParams", "GenericSystemParams", "NvParams", "Observable",
    "SpinSystem", "DrivePulse", "generic_h0", "drive_h1", "nv_h0",
    "nv_rotated_tensor", "transition_frequency", "calibrate_rabi",
    "generic_system", "nv_system",
]


@dataclass(frozen=True)
class TargetParams:
    """One target qubit: Larmor frequency and coupling to the center.

    ``coupling`` is either the scalar ``azx`` (secular approximation,
    coupling term ``azx Sz Ix``) or a full 3x3 tensor ``A`` giving
    ``sum_ab A[a, b] S_a I_b``.
    """

    omega0: float
    coupling: object = 0.0

    def coupling_matrix(self) -> np.ndarray:
        arr = np.asarray(self.coupling, dtype=float)
        if arr.ndim == 0:
            full = np.zeros((3, 3))
            full[2, 0] = float(arr)  # z of the center, x of the target
            return full
        if arr.shape != (3, 3):
            raise ValueError(f"coupling must be scalar or 3x3, got shape {arr.shape}")
        return arr


@dataclass(frozen=True)
class GenericSystemParams:
    """Central spin plus targets of the dimensionless model."""

    omega00: float
    targets: tuple

    def __post_init__(self):
        if not self.targets:
            raise ValueError("need at least one target qubit")
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclass(frozen=True)
class NvParams:
    """NV center with a nitrogen-15 nucleus.

    ``b0`` in mT, ``theta0`` in radians (field tilt from the NV axis),
    all frequencies in MHz.  Gyromagnetic ratios are negative for both
    the electron and nitrogen-15.
    """

    b0: float
    theta0: float = 0.0
    d_zfs: float = 2870.0
    gamma_e: float = -28.025
    gamma_n: float = -4.316e-3
    axx: float = 3.65
    ayy: float = 3.65
    azz: float = 3.03


@dataclass(frozen=True)
class Observable:
    """Labeled Hermitian observable with its full value range."""

    label: str
    op: Operator
    lo: float
    hi: float


@dataclass(frozen=True)
class SpinSystem:
    """Everything the evolution layer needs about one register.

    ``wrapper_phase`` records the carrier phase that realizes a y-axis
    wrapper pulse for this system.  It is ``pi/2`` when the monitored
    level of the driven transition lies above the other one and
    ``3 pi / 2`` when it lies below, where the effective rotating frame
    is conjugated and carrier phases map to drive axes with a minus
    sign.  Sweeps use it as their default wrapper setting.
    """

    h0: Operator
    drive_op: Operator
    rho0: DensityMatrix
    observables: tuple
    time_unit: str = "arb"
    wrapper_phase: float = math.pi / 2.0

    @property
    def dims(self):
        return self.h0.dims


def generic_h0(params: GenericSystemParams) -> Operator:
    """Static Hamiltonian of the generic model.

    ``omega00 Sz + sum_j (omega0j Iz_j + coupling_j)`` over a register
    of qubits with the central spin at site 0.
    """
    m = len(params.targets)
    dims = (2,) * (1 + m)
    central = spin_ops(2)
    s_comps = [central.sx, central.sy, central.sz]
    h = params.omega00 * embed(central.sz, 0, dims).mat
    for j, tgt in enumerate(params.targets, start=1):
        tops = spin_ops(2)
        h = h + tgt.omega0 * embed(tops.sz, j, dims).mat
        amat = tgt.coupling_matrix()
        i_comps = [tops.sx, tops.sy, tops.sz]
        for a in range(3):
            for b in range(3):
                if amat[a, b] == 0.0:
                    continue
                term = embed(s_comps[a], 0, dims) @ embed(i_comps[b], j, dims)
                h = h + amat[a, b] * term.mat
    return Operator(h, dims, herm=True)


def drive_h1(t: float, pulse: DrivePulse, drive_op: Operator) -> Operator:
    """Drive Hamiltonian at lab time ``t``.

    ``omega1 cos(2 pi omegap t + phase)`` times the system's drive
    operator (twice the central spin-x, embedded).
    """
    coeff = pulse.omega1 * math.cos(2.0 * math.pi * pulse.omegap * t + pulse.phase)
    return Operator(coeff * drive_op.mat, drive_op.dims, herm=True)


def nv_rotated_tensor(params: NvParams) -> np.ndarray:
    """Hyperfine tensor in the frame whose z axis follows the field.

    Rotating the NV-frame diagonal tensor by ``theta0`` about y gives

        A'xx = Axx cos^2 + Azz sin^2      A'yy = Ayy
        A'zz = Axx sin^2 + Azz cos^2      A'xz = A'zx = (Axx - Azz) sin cos
    """
    c, s = math.cos(params.theta0), math.sin(params.theta0)
    a = np.zeros((3, 3))
    a[0, 0] = params.axx * c * c + params.azz * s * s
    a[1, 1] = params.ayy
    a[2, 2] = params.axx * s * s + params.azz * c * c
    a[0, 2] = a[2, 0] = (params.axx - params.azz) * s * c
    return a


def nv_h0(params: NvParams, frame: str = "nv") -> Operator:
    """Static NV Hamiltonian on the (electron, nucleus) register.

    In the ``"nv"`` frame the zero-field-splitting axis is z and the
    static field is tilted by ``theta0``; in the ``"field"`` frame the
    field is along z, the splitting axis is tilted and the hyperfine
    tensor is the rotated ``nv_rotated_tensor``.  Both frames have the
    same spectrum.
    """
    dims = (3, 2)
    e = spin_ops(3)
    n = spin_ops(2)
    ge_b = params.gamma_e * params.b0
    gn_b = params.gamma_n * params.b0
    c, s = math.cos(params.theta0), math.sin(params.theta0)

    if frame == "nv":
        h = params.d_zfs * (e.sz.mat @ e.sz.mat)
        h = np.kron(h, np.eye(2))
        h = h - ge_b * embed(c * e.sz + s * e.sx, 0, dims).mat
        h = h - gn_b * embed(c * n.sz + s * n.sx, 1, dims).mat
        amat = np.diag([params.axx, params.ayy, params.azz])
    elif frame == "field":
        # the NV axis sits at (-sin, 0, cos) in field coordinates; this
        # tilt direction is what makes A'zx come out positive below
        sz_t = c * e.sz - s * e.sx
        h = params.d_zfs * (sz_t.mat @ sz_t.mat)
        h = np.kron(h, np.eye(2))
        h = h - ge_b * embed(e.sz, 0, dims).mat
        h = h - gn_b * embed(n.sz, 1, dims).mat
        amat = nv_rotated_tensor(params)
    else:
        raise ValueError(f"unknown frame {frame!r}; expected 'nv' or 'field'")

    e_comps = [e.sx, e.sy, e.sz]
    n_comps = [n.sx, n.sy, n.sz]
    for a in range(3):
        for b in range(3):
            if amat[a, b] == 0.0:
                continue
            term = embed(e_comps[a], 0, dims) @ embed(n_comps[b], 1, dims)
            h = h + amat[a, b] * term.mat
    return Operator(h, dims, herm=True)


def _label_eigenstates(h0: Operator):
    """Assign each product-basis label to its closest eigenstate."""
    w, v = eig_hermitian(h0)
    overlaps = np.abs(v.mat) ** 2  # overlaps[basis, k]
    assignment = {}
    for basis in range(h0.shape[0]):
        order = np.argsort(overlaps[basis])[::-1]
        best, second = overlaps[basis, order[0]], overlaps[basis, order[1]]
        if best - second < 0.1:
            raise ValueError(
                f"basis state {basis} has no clear eigenstate: overlaps "
                f"{best:.3f} vs {second:.3f} (strong mixing)"
            )
        assignment[basis] = int(order[0])
    return w, assignment


def _basis_index(dims, levels) -> int:
    levels = tuple(int(x) for x in levels)
    if len(levels) != len(dims):
        raise ValueError(f"expected {len(dims)} level indices, got {levels}")
    index = 0
    for lv, d in zip(levels, dims):
        if not 0 <= lv < d:
            raise ValueError(f"level {lv} outside dimension {d}")
        index = index * d + lv
    return index


def transition_frequency(h0: Operator, from_levels, to_levels) -> float:
    """Frequency of a transition between two product-basis-labeled levels.

    Eigenstates are matched to basis states by maximum overlap; states
    mixed too strongly to label (overlap gap below 0.1) raise.  Returns
    the absolute energy difference.
    """
    w, assignment = _label_eigenstates(h0)
    idx_from = assignment[_basis_index(h0.dims, from_levels)]
    idx_to = assignment[_basis_index(h0.dims, to_levels)]
    if idx_from == idx_to:
        raise ValueError("both labels map to the same eigenstate")
    return float(abs(w[idx_to] - w[idx_from]))


def _central_level_projector(system: SpinSystem) -> Operator:
    """Projector on the central level initially populated in rho0."""
    from .algebra import partial_trace

    central = partial_trace(system.rho0.op, {0})
    level = int(np.argmax(np.real(np.diag(central.mat))))
    proj = np.zeros((system.dims[0], system.dims[0]), dtype=complex)
    proj[level, level] = 1.0
    return embed(Operator(proj, (system.dims[0],), herm=True), 0, system.dims)


def calibrate_rabi(system: SpinSystem, target_tpi: float, carrier: float,
                   dt: float | None = None) -> float:
    """Drive amplitude that makes a ``target_tpi`` pulse a pi pulse.

    Simulates a single resonant pulse of the requested duration and
    maximizes the population transferred out of the initial central
    level over ``omega1`` (bounded scalar search).  Raises if the best
    transfer stays below 0.99, which signals an unresolvable transition
    or a too-coarse ``dt``.
    """
    from .evolution import pulse_propagator

    if target_tpi <= 0:
        raise ValueError(f"target pi duration must be positive, got {target_tpi}")
    if dt is None:
        dt = target_tpi / 512.0
    proj0 = _central_level_projector(system)
    rho0 = system.rho0.mat

    def transfer(omega1: float) -> float:
        pulse = DrivePulse(omega1, carrier, 0.0, target_tpi)
        u = pulse_propagator(system.h0, pulse, system.drive_op, 0.0, dt).mat
        rho_f = u @ rho0 @ u.conj().T
        return 1.0 - float(np.real(np.trace(proj0.mat @ rho_f)))

    lo, hi = 0.15 / target_tpi, 0.65 / target_tpi
    res = minimize_scalar(lambda x: -transfer(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6 / target_tpi})
    best = float(res.x)
    achieved = transfer(best)
    if achieved < 0.99:
        raise ValueError(
            f"calibration failed: best transfer {achieved:.4f} at omega1={best:.4g} "
            "(transition not resolvable at this carrier, or dt too coarse)"
        )
    return best


def _generic_observables(dims) -> tuple:
    ops = spin_ops(2)
    obs = [Observable("Sz", embed(ops.sz, 0, dims), -0.5, 0.5)]
    n_targets = len(dims) - 1
    for j in range(1, len(dims)):
        label = "Iz" if n_targets == 1 else f"Iz{j}"
        obs.append(Observable(label, embed(ops.sz, j, dims), -0.5, 0.5))
    return tuple(obs)


def _mixed_targets_dm(dims, label: str) -> DensityMatrix:
    central = np.zeros((dims[0], dims[0]), dtype=complex)
    central[0, 0] = 1.0
    mat = central
    for d in dims[1:]:
        mat = np.kron(mat, np.eye(d) / d)
    return DensityMatrix(Operator(mat, tuple(dims)), label=label)


def generic_system(params: GenericSystemParams,
                   initial: str = "polarized") -> SpinSystem:
    """Build the generic model as a ready-to-evolve system.

    ``initial`` is ``"polarized"`` (all spins up, ``|0...0>``) or
    ``"mixed-target"`` (central spin up, targets maximally mixed).
    """
    h0 = generic_h0(params)
    dims = h0.dims
    drive = 2.0 * embed(spin_ops(2).sx, 0, dims)
    drive = Operator(drive.mat, dims, herm=True)
    if initial == "polarized":
        rho0 = basis_dm(dims, (0,) * len(dims), label="polarized")
    elif initial == "mixed-target":
        rho0 = _mixed_targets_dm(dims, "mixed-target")
    else:
        raise ValueError(f"unknown initial state {initial!r}")
    return SpinSystem(h0, drive, rho0, _generic_observables(dims), time_unit="arb")


def nv_system(params: NvParams, initial: str = "polarized",
              frame: str = "nv") -> SpinSystem:
    """Build the NV model as a ready-to-evolve system.

    The central-observable label ``Sz`` is the fluorescence-normalized
    population of the ``m_S = 0`` level (range 0 to 1); ``Iz`` is the
    nuclear spin projection.  ``initial`` is ``"polarized"``
    (``|m_S=0, m_I=+1/2>``) or ``"mixed-target"`` (electron in
    ``m_S = 0``, nucleus maximally mixed).

    Driving the 0 to -1 transition puts the monitored ``m_S = 0`` level
    at the bottom of the working manifold, so the effective rotating
    frame is conjugated: the system's ``wrapper_phase`` is ``3 pi / 2``,
    which realizes y-axis wrappers there (see ``sequences``).
    """
    h0 = nv_h0(params, frame=frame)
    dims = h0.dims
    drive = 2.0 * embed(spin_ops(3).sx, 0, dims)
    drive = Operator(drive.mat, dims, herm=True)

    proj_ms0 = np.zeros((3, 3), dtype=complex)
    proj_ms0[1, 1] = 1.0  # basis order is m_S = +1, 0, -1
    fluor = embed(Operator(proj_ms0, (3,), herm=True), 0, dims)
    iz = embed(spin_ops(2).sz, 1, dims)
    observables = (
        Observable("Sz", fluor, 0.0, 1.0),
        Observable("Iz", iz, -0.5, 0.5),
    )

    if initial == "polarized":
        rho0 = basis_dm(dims, (1, 0), label="polarized")
    elif initial == "mixed-target":
        central = np.zeros((3, 3), dtype=complex)
        central[1, 1] = 1.0
        mat = np.kron(central, np.eye(2) / 2.0)
        rho0 = DensityMatrix(Operator(mat, dims), label="mixed-target")
    else:
        raise ValueError(f"unknown initial state {initial!r}")
    return SpinSystem(h0, drive, rho0, observables, time_unit="us",
                      wrapper_phase=3.0 * math.pi / 2.0)
