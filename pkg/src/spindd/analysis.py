"""Post-processing: observables, tomography, fidelities, sweep fits.

Works on plain arrays and the small value types from ``algebra``; no
dependency on how the data was produced, so the same fits run on
simulated sweeps and on externally measured traces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .algebra import DensityMatrix, Operator

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


@dataclass(frozen=True)
class SweepResult:
    """Observable traces along one swept axis.

    ``traces`` maps observable labels to arrays aligned with ``values``.
    ``provenance`` records the hash of the generating parameters and a
    timestamp.
    """

    axis: str
    values: NDArray[np.float64]
    traces: dict
    provenance: dict = field(default_factory=dict)

    def trace(self, label: str) -> NDArray[np.float64]:
        if label not in self.traces:
            raise KeyError(f"no trace {label!r}; have {sorted(self.traces)}")
        return self.traces[label]


@dataclass
class GateMetrics:
    """Summary numbers for one characterized gate."""

    f_tilde: float | None = None
    n_pi: float | None = None
    t_pi: float | None = None
    state_fidelity: float | None = None
    concurrence: float | None = None


def expval(rho: DensityMatrix, obs: Operator) -> float:
    """Expectation value ``Tr(rho obs)`` for a Hermitian observable."""
    if rho.dims != obs.dims:
        raise ValueError(f"state dims {rho.dims} do not match observable dims {obs.dims}")
    val = np.trace(rho.mat @ obs.mat)
    scale = max(np.abs(obs.mat).max(), 1.0)
    if abs(val.imag) > 1e-10 * scale:
        raise ValueError(f"non-real expectation value {val}; observable not Hermitian?")
    return float(val.real)


def fluorescence(rho0: DensityMatrix, rhof: DensityMatrix) -> float:
    """Overlap readout ``Tr(2 rho0 rhof)``.

    With the reference ``rho0 = |0><0| x 1/2`` this equals the
    population of the central level 0 and lies in [0, 1].
    """
    if rho0.dims != rhof.dims:
        raise ValueError("reference and final state live on different registers")
    val = 2.0 * np.trace(rho0.mat @ rhof.mat)
    return float(val.real)


def _pauli_labels(n: int):
    for combo in itertools.product("IXYZ", repeat=n):
        label = "".join(combo)
        if label != "I" * n:
            yield label


def _pauli_matrix(label: str) -> NDArray[np.complex128]:
    mat = _PAULI[label[0]]
    for ch in label[1:]:
        mat = np.kron(mat, _PAULI[ch])
    return mat


def pauli_expectations(rho: DensityMatrix) -> dict:
    """All ``4^n - 1`` non-identity Pauli-product expectations."""
    if any(d != 2 for d in rho.dims):
        raise ValueError("Pauli expectations require a register of qubits")
    n = len(rho.dims)
    return {
        label: float(np.real(np.trace(rho.mat @ _pauli_matrix(label))))
        for label in _pauli_labels(n)
    }


def tomography(values: dict) -> DensityMatrix:
    """Linear-inversion state reconstruction with positivity projection.

    ``values`` maps Pauli-product labels (strings over ``IXYZ``) to
    measured expectations; the set must be complete for the register.
    The linear estimate ``(1 + sum_P <P> P) / 2^n`` is projected to the
    physical set by clipping negative eigenvalues and renormalizing.
    """
    if not values:
        raise ValueError("empty expectation set")
    n = len(next(iter(values)))
    expected = set(_pauli_labels(n))
    got = set(values)
    if got != expected:
        missing = sorted(expected - got)[:6]
        extra = sorted(got - expected)[:6]
        raise ValueError(f"incomplete Pauli set: missing {missing}, unexpected {extra}")

    dim = 2 ** n
    mat = np.eye(dim, dtype=complex)
    for label, val in values.items():
        mat += float(val) * _pauli_matrix(label)
    mat /= dim

    w, v = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= 0:
        raise ValueError("reconstruction collapsed to the zero matrix")
    w /= total
    projected = (v * w[None, :]) @ v.conj().T
    return DensityMatrix(Operator(projected, (2,) * n), label="tomography")


def state_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    Squared convention: coincident states give 1 and for pure states
    this is the squared overlap.
    """
    if rho.dims != sigma.dims:
        raise ValueError("states live on different registers")
    w, v = np.linalg.eigh(rho.mat)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))[None, :]) @ v.conj().T
    inner = sqrt_rho @ sigma.mat @ sqrt_rho
    w2 = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    f = float(np.sqrt(np.clip(w2, 0.0, None)).sum() ** 2)
    return min(f, 1.0) if f < 1.0 + 1e-9 else f


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence via the spin-flipped product spectrum."""
    if rho.dims != (2, 2):
        raise ValueError(f"concurrence requires a two-qubit state, got dims {rho.dims}")
    yy = np.kron(_PAULI["Y"], _PAULI["Y"])
    r = rho.mat @ yy @ rho.mat.conj() @ yy
    lam = np.sqrt(np.clip(np.linalg.eigvals(r).real, 0.0, None))
    lam.sort()
    return float(max(0.0, lam[-1] - lam[-2] - lam[-3] - lam[-4]))


def _cosine_design(n: np.ndarray, period: float):
    arg = 2.0 * np.pi * n / period
    return np.column_stack([np.ones_like(n), np.cos(arg), np.sin(arg)])


def _cosine_lsq(n: np.ndarray, y: np.ndarray, period: float):
    design = _cosine_design(n, period)
    coeff, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coeff
    return coeff, float(np.sqrt(np.mean(resid ** 2)))


def pseudo_fidelity(sweep: SweepResult, label: str, value_range) -> tuple:
    """Oscillation contrast and inversion period of an N-sweep trace.

    Fits ``a + b cos(2 pi n / T + phi)`` by scanning the period over a
    dense grid (linear least squares at each trial period, then a local
    refinement).  Returns ``(f_tilde, n_pi)`` where ``f_tilde = 2|b|``
    normalized by the declared observable range and clipped to 1, and
    ``n_pi = T / 2`` is the inversion period in pulses.  Raises when the
    series is shorter than one period or the fit residual exceeds 0.15
    of the range.
    """
    n = np.asarray(sweep.values, dtype=float)
    y = np.asarray(sweep.trace(label), dtype=float)
    lo, hi = value_range
    rng = float(hi - lo)
    if rng <= 0:
        raise ValueError(f"invalid observable range {value_range}")
    if n.size < 6:
        raise ValueError("need at least 6 points to fit an oscillation")

    span = n.max() - n.min()
    periods = np.linspace(3.0, 1.5 * span, 600)
    best_t, best_rms = None, np.inf
    for t in periods:
        _, rms = _cosine_lsq(n, y, t)
        if rms < best_rms:
            best_t, best_rms = t, rms
    # parabolic-style refinement around the best grid period
    lo_t = max(2.5, best_t * 0.9)
    hi_t = min(1.6 * span, best_t * 1.1)
    for t in np.linspace(lo_t, hi_t, 400):
        _, rms = _cosine_lsq(n, y, t)
        if rms < best_rms:
            best_t, best_rms = t, rms

    coeff, rms = _cosine_lsq(n, y, best_t)
    amp = float(np.hypot(coeff[1], coeff[2]))
    if best_t > 1.26 * span:
        raise ValueError(
            f"series spans {span:.1f} pulses but the best-fit period is {best_t:.1f}; "
            "sweep does not contain a full oscillation"
        )
    if rms > 0.15 * rng:
        raise ValueError(
            f"cosine fit residual {rms:.3g} exceeds 0.15 of the observable range {rng:.3g} "
            f"(period {best_t:.2f}, amplitude {amp:.3g})"
        )
    f_tilde = min(2.0 * amp / rng, 1.0)
    return f_tilde, best_t / 2.0


def find_resonance(sweep: SweepResult, label: str) -> float:
    """Axis position of the strongest feature, parabolically refined.

    The feature is the global extremum of the deviation from the median
    level.  A maximum on the sweep boundary raises, since it cannot be
    bracketed.
    """
    x = np.asarray(sweep.values, dtype=float)
    y = np.asarray(sweep.trace(label), dtype=float)
    if x.size < 3:
        raise ValueError("need at least 3 sweep points")
    dev = np.abs(y - np.median(y))
    idx = int(np.argmax(dev))
    if idx == 0 or idx == x.size - 1:
        raise ValueError(f"extremum at sweep boundary (index {idx}); widen the grid")
    # quadratic through the bracketing triple
    xs, ys = x[idx - 1: idx + 2], y[idx - 1: idx + 2]
    a, b, _ = np.polyfit(xs - xs[1], ys, 2)
    if a == 0:
        return float(xs[1])
    vertex = -b / (2.0 * a)
    vertex = float(np.clip(vertex, xs[0] - xs[1], xs[2] - xs[1]))
    return float(xs[1] + vertex)


def baseline_correct(x, y, order: int = 2, renormalize: bool = True) -> NDArray[np.float64]:
    """Remove a slow polynomial background from a spectrum.

    Fits a polynomial of the given order, masks points deviating more
    than two standard deviations (the resonances), refits, and subtracts.
    With ``renormalize`` the corrected trace is scaled to span [0, 1];
    a flat trace is returned unscaled.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x and y must have the same length")
    if x.size <= order + 1:
        raise ValueError(f"too few points ({x.size}) for polynomial order {order}")

    mask = np.ones(x.size, dtype=bool)
    coeffs = np.polynomial.polynomial.polyfit(x, y, order)
    for _ in range(2):
        fit = np.polynomial.polynomial.polyval(x, coeffs)
        resid = y - fit
        sigma = resid[mask].std()
        if sigma == 0:
            break
        mask = np.abs(resid) <= 2.0 * sigma
        if mask.sum() <= order + 1:
            raise ValueError("baseline fit excluded almost every point")
        coeffs = np.polynomial.polynomial.polyfit(x[mask], y[mask], order)

    corrected = y - np.polynomial.polynomial.polyval(x, coeffs)
    if renormalize:
        span = corrected.max() - corrected.min()
        if span > 1e-12:
            corrected = (corrected - corrected.min()) / span
    return corrected


def tpi_scaling(fits) -> tuple:
    """Fit gate times against coupling: ``t_pi = c / azx``.

    ``fits`` is a sequence of ``(azx, t_pi)`` pairs.  Returns the
    least-squares constant and the per-point relative residuals; a
    relative residual above 10 percent raises, since then the inverse
    scaling does not describe the data.
    """
    pairs = [(float(a), float(t)) for a, t in fits]
    if len(pairs) < 2:
        raise ValueError("need at least two (azx, t_pi) pairs")
    a = np.array([p[0] for p in pairs])
    t = np.array([p[1] for p in pairs])
    if (a <= 0).any() or (t <= 0).any():
        raise ValueError("couplings and gate times must be positive")
    c = float(np.sum(t / a) / np.sum(1.0 / a ** 2))
    model = c / a
    residuals = (t - model) / model
    worst = float(np.abs(residuals).max())
    if worst > 0.10:
        raise ValueError(
            f"inverse-coupling fit fails: worst relative residual {worst:.3f} "
            f"(c={c:.4g}, data={pairs})"
        )
    return c, residuals
