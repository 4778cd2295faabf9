"""Dense statevector backend: Pauli application and time propagation.

States live on the full 2^n-dimensional register with qubit 0 as the
least-significant index bit.  Propagation is either exact (eigendecomposition
of the dense Hamiltonian) or first-order Trotter over the Pauli terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .paulis import PauliSum, _check_dense_size, pauli_action


@dataclass
class StateVector:
    """A dense complex amplitude vector over computational basis states."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude length does not match n_qubits")

    @classmethod
    def computational_basis(cls, n_qubits: int, index: int) -> "StateVector":
        dim = 1 << n_qubits
        if not 0 <= index < dim:
            raise ValueError("basis index out of range")
        amp = np.zeros(dim, dtype=complex)
        amp[index] = 1.0
        return cls(n_qubits, amp)

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray) -> "StateVector":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        dim = amplitudes.shape[0]
        if dim & (dim - 1) or amplitudes.ndim != 1:
            raise ValueError("amplitude length must be a power of two")
        return cls(dim.bit_length() - 1, amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.n_qubits, self.amplitudes / n)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def inner(bra: StateVector, ket: StateVector) -> complex:
    """Hermitian inner product <bra|ket>."""
    if bra.n_qubits != ket.n_qubits:
        raise ValueError("qubit-count mismatch in inner product")
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def apply_pauli_sum(operator: PauliSum, state: StateVector) -> StateVector:
    """Apply a PauliSum to a state; the result is generally unnormalized."""
    if operator.n_qubits != state.n_qubits:
        raise ValueError("qubit-count mismatch in apply")
    out = np.zeros_like(state.amplitudes)
    for string, coeff in operator.items():
        perm, vals = pauli_action(
            state.n_qubits, string.x_mask, string.z_mask, string.phase_power
        )
        out += coeff * vals * state.amplitudes[perm]
    return StateVector(state.n_qubits, out)


def expectation(operator: PauliSum, state: StateVector) -> complex:
    return inner(state, apply_pauli_sum(operator, state))


class ExactPropagator:
    """Exact evolution exp(-i H t) via dense eigendecomposition.

    The Hamiltonian must be Hermitian as a PauliSum (real coefficients on
    canonical strings); the dense matrix is diagonalized once and arbitrary
    evolution times are then O(4^n) matrix-vector work each.
    """

    def __init__(self, hamiltonian: PauliSum) -> None:
        if not hamiltonian.is_hermitian():
            raise ValueError("propagator requires a Hermitian PauliSum")
        _check_dense_size(hamiltonian.n_qubits)
        self.n_qubits = hamiltonian.n_qubits
        matrix = hamiltonian.dense()
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(matrix)

    def evolve(self, t: float, state: StateVector) -> StateVector:
        if state.n_qubits != self.n_qubits:
            raise ValueError("qubit-count mismatch in evolve")
        coeffs = self.eigenvectors.conj().T @ state.amplitudes
        coeffs = coeffs * np.exp(-1j * self.eigenvalues * t)
        return StateVector(self.n_qubits, self.eigenvectors @ coeffs)

    def evolve_grid(self, times: np.ndarray, state: StateVector) -> np.ndarray:
        """Amplitudes at many times at once; returns shape (len(times), 2^n)."""
        if state.n_qubits != self.n_qubits:
            raise ValueError("qubit-count mismatch in evolve")
        times = np.asarray(times, dtype=float)
        coeffs = self.eigenvectors.conj().T @ state.amplitudes
        phases = np.exp(-1j * np.outer(times, self.eigenvalues))
        return (phases * coeffs) @ self.eigenvectors.T


def trotter_term_order(hamiltonian: PauliSum) -> list[tuple[PauliString, float]]:
    """Deterministic term ordering for product formulas.

    Terms are sorted by descending coefficient magnitude; ties break on the
    (x_mask, z_mask) pair ascending.
    """
    items = []
    for string, coeff in hamiltonian.items():
        items.append((string, coeff))
    items.sort(key=lambda it: (-abs(it[1]), it[0].x_mask, it[0].z_mask))
    return [(s, c.real) for s, c in items]


def trotter1_evolve(
    hamiltonian: PauliSum, t: float, steps: int, state: StateVector
) -> StateVector:
    """First-order Trotter approximation of exp(-i H t).

    Each step applies exp(-i c_l (t/steps) P_l) for every term, in the order
    given by :func:`trotter_term_order`.  Each factor is evaluated exactly as
    cos(theta) I - i sin(theta) P_l, so the result stays exactly unitary and
    the only error is the operator splitting itself.
    """
    if not hamiltonian.is_hermitian():
        raise ValueError("trotter evolution requires a Hermitian PauliSum")
    if hamiltonian.n_qubits != state.n_qubits:
        raise ValueError("qubit-count mismatch in trotter evolve")
    if steps < 1:
        raise ValueError("steps must be at least 1")
    dt = t / steps
    actions = []
    global_phase = 1.0 + 0j
    for string, coeff in trotter_term_order(hamiltonian):
        theta = coeff * dt
        if string.is_identity():
            global_phase *= np.exp(-1j * theta)
            continue
        perm, vals = pauli_action(
            state.n_qubits, string.x_mask, string.z_mask, string.phase_power
        )
        actions.append((np.cos(theta), np.sin(theta), perm, vals))
    vec = state.amplitudes.copy()
    for _ in range(steps):
        for c, s, perm, vals in actions:
            vec = c * vec - 1j * s * (vals * vec[perm])
    vec *= global_phase**steps
    return StateVector(state.n_qubits, vec)
