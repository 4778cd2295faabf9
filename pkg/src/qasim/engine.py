"""Subspace dynamics in a basis of time-evolved states.

The ansatz is |psi(t)> = sum_j alpha_j(t) |psi_j> with fixed basis states
|psi_j> = exp(-i H s_j) |psi_0| generated from one reference state at a small
set of evolution times s_j.  Projecting the Schrodinger equation onto that
subspace (McLachlan's variational principle with fixed basis) gives the
linear ODE

    F alpha_dot = -i H alpha,       F_jk = <psi_j|psi_k>,
                                    H_jk = <psi_j|Hhat|psi_k>,

integrated here with fixed-step RK4 after applying a spectral-cutoff
pseudo-inverse to F.  Observables follow as alpha^dag O alpha, and the
instantaneous McLachlan residual

    eps = alpha^dag H2 alpha - alpha_dot^dag F alpha_dot,
    H2_jk = <psi_j|Hhat^2|psi_k>,

measures how much of the exact evolution leaks out of the subspace.

All matrix elements can also be produced through a shot-noise channel that
models Hadamard-test estimation: each independently measured real component
with exact mean c gets Gaussian noise of variance (1 - c^2) / N_s, applied
per Pauli term for operator matrix elements and per element for overlaps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .paulis import PauliSum, pauli_action
from .statevector import ExactPropagator, StateVector, apply_pauli_sum, trotter1_evolve

# Relative eigenvalue cutoff for the overlap pseudo-inverse.
PINV_CUTOFF_RATIO = 1e-8

PROPAGATION_MODES = ("exact", "trotter1")


class EngineError(RuntimeError):
    """Numerical failure inside the subspace integrator."""


class ConditionError(EngineError):
    """Overlap matrix has no eigenvalue above the pseudo-inverse cutoff."""


@dataclass(frozen=True)
class BasisSpec:
    """Recipe for the time-evolved basis.

    ``times`` are the evolution durations s_j (hartree^-1), starting at 0 and
    strictly increasing, so the first basis state is the reference itself.
    ``propagation`` selects exact evolution or first-order Trotter with
    ``trotter_steps`` steps per basis state.
    """

    times: tuple[float, ...]
    propagation: str = "exact"
    trotter_steps: int | None = None

    def __post_init__(self) -> None:
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        if not times:
            raise ValueError("basis needs at least one time")
        if times[0] != 0.0:
            raise ValueError("first basis time must be 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("basis times must be strictly increasing")
        if self.propagation not in PROPAGATION_MODES:
            raise ValueError(f"unknown propagation mode {self.propagation!r}")
        if self.propagation == "trotter1":
            if self.trotter_steps is None or self.trotter_steps < 1:
                raise ValueError("trotter1 propagation needs trotter_steps >= 1")

    @property
    def size(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class ShotModel:
    """Shot-noise channel: ``shots`` measurement samples per real component."""

    shots: int
    seed: int

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class PauliTermElements:
    """Per-Pauli-term matrix elements of one Hermitian operator.

    ``elements[l, j, k] = <psi_j|P_l|psi_k>`` and the assembled operator
    matrix is ``sum_l coefficients[l] * elements[l]``.  These are the
    individually measured estimands in the shot-noise channel.
    """

    coefficients: np.ndarray
    elements: np.ndarray


@dataclass
class QasMatrices:
    """Subspace matrices, either exact or shot-sampled.

    Exact construction fills the term-resolved blocks and the H^2 matrix;
    sampling consumes the blocks and leaves them (and H^2) unset on the
    noisy copy.
    """

    overlap: np.ndarray
    hamiltonian: np.ndarray
    observables: dict[str, np.ndarray] = field(default_factory=dict)
    hamiltonian_sq: np.ndarray | None = None
    hamiltonian_terms: PauliTermElements | None = None
    observable_terms: dict[str, PauliTermElements] | None = None
    sample_draws: int | None = None

    @property
    def size(self) -> int:
        return self.overlap.shape[0]


@dataclass
class CoefficientTrajectory:
    """Integrated subspace coefficients on a uniform time grid."""

    times: np.ndarray
    alphas: np.ndarray

    @property
    def n_states(self) -> int:
        return self.alphas.shape[-1]


def build_basis(
    psi0: StateVector, hamiltonian: PauliSum, spec: BasisSpec
) -> list[StateVector]:
    """Evolve the reference state to each basis time."""
    if abs(psi0.norm() - 1.0) > 1e-8:
        raise ValueError("reference state must be normalized")
    out = [psi0.copy()]
    if spec.propagation == "exact":
        prop = ExactPropagator(hamiltonian)
        for t in spec.times[1:]:
            out.append(prop.evolve(t, psi0))
    else:
        for t in spec.times[1:]:
            out.append(trotter1_evolve(hamiltonian, t, spec.trotter_steps, psi0))
    return out


def _term_elements(operator: PauliSum, basis_matrix: np.ndarray) -> PauliTermElements:
    if not operator.is_hermitian():
        raise ValueError("operators must be Hermitian (real canonical coefficients)")
    n_qubits = operator.n_qubits
    pairs = list(operator.items())
    coeffs = np.array([c.real for _, c in pairs])
    n = basis_matrix.shape[0]
    elems = np.empty((len(pairs), n, n), dtype=complex)
    for l, (string, _) in enumerate(pairs):
        perm, vals = pauli_action(n_qubits, string.x_mask, string.z_mask)
        applied = vals * basis_matrix[:, perm]
        elems[l] = basis_matrix.conj() @ applied.T
    return PauliTermElements(coeffs, elems)


def exact_matrices(
    basis: list[StateVector],
    hamiltonian: PauliSum,
    observables: dict[str, PauliSum] | None = None,
) -> QasMatrices:
    """Exact subspace matrices F, H, O_i, and H^2 from dense basis states.

    H and the observables are assembled term by term from the same
    Pauli-elements that the shot-noise channel perturbs, so exact and
    sampled constructions agree in the infinite-shot limit by construction.
    H^2 is evaluated as <H psi_j | H psi_k> without squaring the operator.
    """
    if not basis:
        raise ValueError("empty basis")
    if any(s.n_qubits != hamiltonian.n_qubits for s in basis):
        raise ValueError("basis and Hamiltonian qubit counts differ")
    B = np.stack([s.amplitudes for s in basis])
    overlap = B.conj() @ B.T

    h_terms = _term_elements(hamiltonian, B)
    h_matrix = np.tensordot(h_terms.coefficients, h_terms.elements, axes=1)

    applied = np.stack([apply_pauli_sum(hamiltonian, s).amplitudes for s in basis])
    h_sq = applied.conj() @ applied.T

    obs_mats: dict[str, np.ndarray] = {}
    obs_terms: dict[str, PauliTermElements] = {}
    for label, op in (observables or {}).items():
        if op.n_qubits != hamiltonian.n_qubits:
            raise ValueError(f"observable {label!r} qubit count differs")
        block = _term_elements(op, B)
        obs_terms[label] = block
        obs_mats[label] = np.tensordot(block.coefficients, block.elements, axes=1)

    return QasMatrices(
        overlap=overlap,
        hamiltonian=h_matrix,
        observables=obs_mats,
        hamiltonian_sq=h_sq,
        hamiltonian_terms=h_terms,
        observable_terms=obs_terms,
    )


def sample_matrices(exact: QasMatrices, model: ShotModel) -> QasMatrices:
    """Shot-sampled copy of exact subspace matrices.

    Every independently measured real component with exact mean c is drawn
    from Normal(c, sqrt((1 - c^2) / shots)); draws are not clipped.  The
    unit overlap diagonal is kept exact (known a priori), operator diagonal
    elements only receive a real draw (their imaginary part is identically
    zero), and Hermiticity is completed from the upper triangle.  H^2 is not
    sampled; residual diagnostics stay exact-mode only.

    Draw order is fixed: overlap real then imaginary components, then for
    the Hamiltonian and each observable in map order the per-term upper
    off-diagonal real, off-diagonal imaginary, and diagonal components.
    """
    if exact.hamiltonian_terms is None or exact.observable_terms is None:
        raise ValueError("sampling needs term-resolved matrices from exact_matrices")
    rng = np.random.default_rng(model.seed)
    draws = 0

    def noisy(values: np.ndarray) -> np.ndarray:
        nonlocal draws
        draws += values.size
        sd = np.sqrt(np.maximum(0.0, 1.0 - values**2) / model.shots)
        return rng.normal(values, sd)

    n = exact.size
    ju, ku = np.triu_indices(n, k=1)
    diag = np.arange(n)

    overlap = np.eye(n, dtype=complex)
    re = noisy(exact.overlap[ju, ku].real)
    im = noisy(exact.overlap[ju, ku].imag)
    overlap[ju, ku] = re + 1j * im
    overlap[ku, ju] = re - 1j * im

    def sample_block(block: PauliTermElements) -> np.ndarray:
        elems = np.zeros_like(block.elements)
        off = block.elements[:, ju, ku]
        re = noisy(off.real.ravel()).reshape(off.shape)
        im = noisy(off.imag.ravel()).reshape(off.shape)
        elems[:, ju, ku] = re + 1j * im
        elems[:, ku, ju] = re - 1j * im
        dg = noisy(block.elements[:, diag, diag].real.ravel())
        elems[:, diag, diag] = dg.reshape(-1, n)
        return np.tensordot(block.coefficients, elems, axes=1)

    hamiltonian = sample_block(exact.hamiltonian_terms)
    observables = {
        label: sample_block(block) for label, block in exact.observable_terms.items()
    }
    return QasMatrices(
        overlap=overlap,
        hamiltonian=hamiltonian,
        observables=observables,
        sample_draws=draws,
    )


def derive_seeds(master_seed: int, count: int) -> list[int]:
    """Deterministic child seeds for an ensemble of sampling runs."""
    ss = np.random.SeedSequence(master_seed)
    return [int(s) for s in ss.generate_state(count, dtype=np.uint64)]


# ---------------------------------------------------------------------------
# Linear algebra and integration.


def truncated_pinv(matrix: np.ndarray, cutoff_ratio: float = PINV_CUTOFF_RATIO):
    """Hermitian pseudo-inverse discarding eigenvalues below a relative cutoff.

    Works on a single matrix or a stack (..., n, n); raises ConditionError
    when some matrix in the stack retains no eigenvalue.
    """
    w, v = np.linalg.eigh(matrix)
    top = w[..., -1]
    cutoff = cutoff_ratio * top
    keep = w > cutoff[..., None]
    dead = ~keep.any(axis=-1) | (top <= 0.0)
    if np.any(dead):
        where = np.argwhere(np.atleast_1d(dead)).ravel().tolist()
        raise ConditionError(
            f"overlap matrix has no eigenvalue above cutoff (stack index {where})"
        )
    inv_w = np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)
    return (v * inv_w[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def _step_count(total_time: float, dt: float) -> int:
    if dt <= 0 or total_time <= 0:
        raise ValueError("total_time and dt must be positive")
    steps = int(np.floor(total_time / dt + 1e-9))
    if steps < 1:
        raise ValueError("total_time shorter than one step")
    return steps


def integrate_rk4(a_matrix: np.ndarray, alpha0: np.ndarray, steps: int, dt: float):
    """Fixed-step RK4 for alpha_dot = A alpha over a stack of systems.

    a_matrix: (..., n, n), alpha0: (n,) shared start.  Returns the stacked
    trajectory (..., steps + 1, n).
    """
    lead = a_matrix.shape[:-2]
    n = a_matrix.shape[-1]
    out = np.empty(lead + (steps + 1, n), dtype=complex)
    al = np.broadcast_to(alpha0, lead + (n,)).astype(complex).copy()
    out[..., 0, :] = al

    def rhs(y):
        return (a_matrix @ y[..., None])[..., 0]

    for step in range(steps):
        k1 = rhs(al)
        k2 = rhs(al + (0.5 * dt) * k1)
        k3 = rhs(al + (0.5 * dt) * k2)
        k4 = rhs(al + dt * k3)
        al = al + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[..., step + 1, :] = al
    return out


def solve_dynamics(
    matrices: QasMatrices, total_time: float, dt: float
) -> CoefficientTrajectory:
    """Integrate F alpha_dot = -i H alpha from alpha = (1, 0, ...).

    The overlap is inverted once through the spectral-cutoff pseudo-inverse;
    the propagation matrix is then constant and RK4 takes ``floor(T/dt)``
    steps of size dt.
    """
    times, alphas = solve_dynamics_stack(
        matrices.overlap, matrices.hamiltonian, total_time, dt
    )
    return CoefficientTrajectory(times=times, alphas=alphas)


def solve_dynamics_stack(overlaps: np.ndarray, hamiltonians: np.ndarray,
                         total_time: float, dt: float):
    """Stacked variant: overlaps/hamiltonians (..., n, n) integrated jointly."""
    steps = _step_count(total_time, dt)
    f_pinv = truncated_pinv(overlaps)
    a_matrix = -1j * (f_pinv @ hamiltonians)
    n = a_matrix.shape[-1]
    alpha0 = np.zeros(n, dtype=complex)
    alpha0[0] = 1.0
    alphas = integrate_rk4(a_matrix, alpha0, steps, dt)
    if not np.all(np.isfinite(alphas.view(float))):
        bad = np.argwhere(~np.isfinite(alphas.view(float)))
        raise EngineError(
            f"non-finite trajectory amplitudes (first at index {bad[0].tolist()}); "
            "the overlap conditioning is likely too poor for this basis"
        )
    times = np.arange(steps + 1) * dt
    return times, alphas


def quadratic_form_series(matrix: np.ndarray, alphas: np.ndarray):
    """alpha^dag M alpha along a trajectory; returns (real series, max |imag|).

    Broadcasts over leading stack axes of either argument.
    """
    vals = np.einsum("...tj,...jk,...tk->...t", alphas.conj(), matrix, alphas)
    return vals.real, float(np.max(np.abs(vals.imag)))


@dataclass
class ObservableSeries:
    """Real observable trajectory plus its imaginary-part residual."""

    values: np.ndarray
    max_imag_residual: float


def observable_trajectory(
    matrices: QasMatrices, trajectory: CoefficientTrajectory, label: str
) -> ObservableSeries:
    """Expectation series alpha^dag O alpha for one named observable.

    The imaginary residual must vanish (up to roundoff) in exact mode;
    under sampling it is genuinely nonzero and reported as a diagnostic.
    """
    if label not in matrices.observables:
        raise KeyError(f"unknown observable {label!r}")
    values, resid = quadratic_form_series(matrices.observables[label], trajectory.alphas)
    return ObservableSeries(values=values, max_imag_residual=resid)


def min_error_overlap(
    matrices: QasMatrices, trajectory: CoefficientTrajectory
) -> np.ndarray:
    """McLachlan residual series eps(t) >= 0 measuring subspace leakage.

    eps = alpha^dag H2 alpha - alpha_dot^dag F alpha_dot with alpha_dot taken
    from the same pseudo-inverted equation of motion used by the integrator.
    Requires the exact-mode H^2 block.
    """
    if matrices.hamiltonian_sq is None:
        raise ValueError("H^2 block unavailable; residuals are exact-mode only")
    f_pinv = truncated_pinv(matrices.overlap)
    a_matrix = -1j * (f_pinv @ matrices.hamiltonian)
    alpha_dot = trajectory.alphas @ a_matrix.T
    first, _ = quadratic_form_series(matrices.hamiltonian_sq, trajectory.alphas)
    second, _ = quadratic_form_series(matrices.overlap, alpha_dot)
    return first - second


def subspace_state(basis: list[StateVector], alpha: np.ndarray) -> StateVector:
    """Reassemble the dense state sum_j alpha_j |psi_j>."""
    B = np.stack([s.amplitudes for s in basis])
    return StateVector(basis[0].n_qubits, alpha @ B)


# ---------------------------------------------------------------------------
# Diagnostics.


@dataclass
class LinIndependenceReport:
    """Overlap-spectrum diagnostic for a chosen set of basis times."""

    eigenvalues: np.ndarray
    determinant: float
    condition_number: float
    cutoff: float
    passed: bool
    basis_times: tuple[float, ...] | None
    forbidden_times: list[tuple[float, list[float]]]


def lin_independence_report(
    overlap: np.ndarray,
    eigengaps=None,
    basis_times=None,
    horizon: float | None = None,
    cutoff_ratio: float = PINV_CUTOFF_RATIO,
) -> LinIndependenceReport:
    """Diagnose linear independence of the basis from its overlap matrix.

    The basis passes when the smallest overlap eigenvalue clears the same
    relative cutoff used by the integrator's pseudo-inverse.  When spectral
    gaps of the prepared superposition are supplied, the exactly degenerate
    choices s = 2 pi k / gap (which collapse a two-state basis) are listed
    up to ``horizon``.
    """
    w = np.linalg.eigvalsh(overlap)
    cutoff = cutoff_ratio * max(float(w[-1]), 0.0)
    passed = bool(w[0] > cutoff) and w[-1] > 0.0
    cond = float(w[-1] / w[0]) if w[0] > 0 else float("inf")
    forbidden: list[tuple[float, list[float]]] = []
    if eigengaps is not None and horizon is not None:
        for gap in np.atleast_1d(np.asarray(eigengaps, dtype=float)):
            if gap <= 0:
                continue
            times = []
            k = 1
            while 2.0 * np.pi * k / gap <= horizon + 1e-12:
                times.append(2.0 * np.pi * k / gap)
                k += 1
            forbidden.append((float(gap), times))
    return LinIndependenceReport(
        eigenvalues=w,
        determinant=float(np.prod(w)),
        condition_number=cond,
        cutoff=cutoff,
        passed=passed,
        basis_times=tuple(basis_times) if basis_times is not None else None,
        forbidden_times=forbidden,
    )


def dominant_frequency(values: np.ndarray, dt: float, pad_factor: int = 16) -> float:
    """Peak frequency of a real series in cycles per unit time.

    Zero-padded periodogram with parabolic refinement of the peak bin; the
    mean is removed first so the DC bin never wins.
    """
    y = np.asarray(values, dtype=float)
    y = y - y.mean()
    n = y.size
    if n < 4:
        raise ValueError("series too short for frequency extraction")
    nfft = 1 << int(np.ceil(np.log2(n * pad_factor)))
    spec = np.abs(np.fft.rfft(y, nfft))
    k = int(np.argmax(spec[1:])) + 1
    delta = 0.0
    if 1 <= k < spec.size - 1 and spec[k - 1] > 0 and spec[k + 1] > 0:
        la, lb, lc = np.log(spec[k - 1 : k + 2])
        denom = la - 2.0 * lb + lc
        if denom != 0.0:
            delta = float(np.clip(0.5 * (la - lc) / denom, -0.5, 0.5))
    return (k + delta) / (nfft * dt)
