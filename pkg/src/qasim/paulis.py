"""Bit-mask Pauli-string algebra and the Jordan-Wigner fermion mapping.

An n-qubit Pauli string is stored as two integer masks plus a phase.  Bit j
of ``x_mask`` / ``z_mask`` records an X / Z factor on qubit j, and a qubit
where both bits are set carries Y.  The operator represented is

    i**phase_power * M(x_mask, z_mask),
    M(x, z) = i**popcount(x & z) * X^x * Z^z,

so ``M`` is exactly the tensor product of literal I, X, Y, Z factors.  With
this convention products of strings reduce to mask XORs plus an integer
phase-power update, which keeps group operations exact (no floating point in
the phase bookkeeping).

Qubit 0 is the least-significant bit of a computational-basis index, and the
first character of a text label like ``"XIZ"`` acts on qubit 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)
_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_MASK_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

# Largest qubit count for which dense 2^n x 2^n materialization is allowed.
DENSE_QUBIT_LIMIT = 12

# Coefficients with magnitude at or below this are dropped when sums are merged.
COEFF_DROP_TOLERANCE = 1e-12


def _check_dense_size(n_qubits: int) -> None:
    if n_qubits > DENSE_QUBIT_LIMIT:
        raise ValueError(
            f"dense materialization refused for n_qubits={n_qubits} "
            f"(limit {DENSE_QUBIT_LIMIT})"
        )


@dataclass(frozen=True)
class PauliString:
    """A single Pauli string with an attached unit phase.

    Parameters
    ----------
    n_qubits : int
        Number of qubits the string acts on.
    x_mask, z_mask : int
        Bit masks of X and Z factors; overlapping bits are Y factors.
    phase_power : int
        Power of i multiplying the canonical string; kept in {0, 1, 2, 3}.
    """

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0
    phase_power: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if not 0 <= self.x_mask <= full or not 0 <= self.z_mask <= full:
            raise ValueError("mask out of range for n_qubits")
        object.__setattr__(self, "phase_power", self.phase_power % 4)

    @classmethod
    def from_label(cls, label: str, phase_power: int = 0) -> "PauliString":
        """Build from a letter string; character j acts on qubit j."""
        x = z = 0
        for j, ch in enumerate(label):
            try:
                xb, zb = _MASK_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}") from None
            x |= xb << j
            z |= zb << j
        return cls(len(label), x, z, phase_power)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    @property
    def phase(self) -> complex:
        """The attached phase as a complex number in {1, i, -1, -i}."""
        return _PHASES[self.phase_power]

    @property
    def label(self) -> str:
        return "".join(
            _LETTERS[((self.x_mask >> j) & 1, (self.z_mask >> j) & 1)]
            for j in range(self.n_qubits)
        )

    def weight(self) -> int:
        """Number of qubits acted on non-trivially."""
        return (self.x_mask | self.z_mask).bit_count()

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def canonical(self) -> "PauliString":
        """The same string with the attached phase stripped."""
        return PauliString(self.n_qubits, self.x_mask, self.z_mask, 0)

    def adjoint(self) -> "PauliString":
        """Hermitian adjoint; equals the group inverse for a Pauli string."""
        return PauliString(self.n_qubits, self.x_mask, self.z_mask, -self.phase_power)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch in Pauli product")
        x = self.x_mask ^ other.x_mask
        z = self.z_mask ^ other.z_mask
        k = (
            self.phase_power
            + other.phase_power
            + (self.x_mask & self.z_mask).bit_count()
            + (other.x_mask & other.z_mask).bit_count()
            + 2 * (self.z_mask & other.x_mask).bit_count()
            - (x & z).bit_count()
        )
        return PauliString(self.n_qubits, x, z, k)

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch")
        anti = (self.x_mask & other.z_mask).bit_count() + (
            self.z_mask & other.x_mask
        ).bit_count()
        return anti % 2 == 0

    def dense(self) -> np.ndarray:
        _check_dense_size(self.n_qubits)
        perm, vals = pauli_action(self.n_qubits, self.x_mask, self.z_mask, self.phase_power)
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        mat[np.arange(dim), perm] = vals
        return mat

    def __str__(self) -> str:
        pre = {0: "", 1: "i*", 2: "-", 3: "-i*"}[self.phase_power]
        return pre + self.label


def pauli_action(
    n_qubits: int, x_mask: int, z_mask: int, phase_power: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Permutation form of a Pauli string on computational-basis indices.

    Returns ``(perm, vals)`` with ``(P v)[i] = vals[i] * v[perm[i]]``; the
    matrix of P has entries ``P[i, perm[i]] = vals[i]``.
    """
    dim = 1 << n_qubits
    idx = np.arange(dim, dtype=np.int64)
    perm = idx ^ x_mask
    parity = np.bitwise_count(perm & z_mask).astype(np.int64) & 1
    phase = _PHASES[(phase_power + (x_mask & z_mask).bit_count()) % 4]
    vals = phase * (1.0 - 2.0 * parity)
    return perm, vals


class PauliSum:
    """A complex linear combination of Pauli strings on a fixed register.

    Terms are held in a dict keyed by ``(x_mask, z_mask)``; attached string
    phases are folded into the coefficients on insertion, so each canonical
    string appears at most once.  Merging drops coefficients with magnitude
    at or below ``COEFF_DROP_TOLERANCE``.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(
        self,
        n_qubits: int,
        terms: Iterable[tuple[PauliString, complex]] = (),
    ) -> None:
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        self.n_qubits = n_qubits
        self._terms: dict[tuple[int, int], complex] = {}
        for string, coeff in terms:
            self.add_term(string, coeff)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [(PauliString.identity(n_qubits), coeff)])

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def from_labels(cls, pairs: Mapping[str, complex]) -> "PauliSum":
        labels = list(pairs)
        if not labels:
            raise ValueError("need at least one label")
        n = len(labels[0])
        return cls(n, [(PauliString.from_label(lb), c) for lb, c in pairs.items()])

    def add_term(self, string: PauliString, coeff: complex) -> None:
        if string.n_qubits != self.n_qubits:
            raise ValueError("qubit-count mismatch in PauliSum term")
        key = (string.x_mask, string.z_mask)
        value = self._terms.get(key, 0j) + coeff * string.phase
        if abs(value) <= COEFF_DROP_TOLERANCE:
            self._terms.pop(key, None)
        else:
            self._terms[key] = value

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), coeff in self._terms.items():
            yield PauliString(self.n_qubits, x, z), coeff

    def coefficient(self, string: PauliString) -> complex:
        base = self._terms.get((string.x_mask, string.z_mask), 0j)
        return base * _PHASES[(-string.phase_power) % 4]

    def __len__(self) -> int:
        return len(self._terms)

    def copy(self) -> "PauliSum":
        out = PauliSum(self.n_qubits)
        out._terms = dict(self._terms)
        return out

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch in PauliSum addition")
        out = self.copy()
        for string, coeff in other.items():
            out.add_term(string, coeff)
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "PauliSum":
        if isinstance(scalar, PauliSum):
            raise TypeError("use @ for operator products")
        out = PauliSum(self.n_qubits)
        for key, coeff in self._terms.items():
            value = coeff * scalar
            if abs(value) > COEFF_DROP_TOLERANCE:
                out._terms[key] = value
        return out

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, expanded term by term and re-merged."""
        if not isinstance(other, PauliSum):
            return NotImplemented
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch in PauliSum product")
        out = PauliSum(self.n_qubits)
        for (xa, za), ca in self._terms.items():
            for (xb, zb), cb in other._terms.items():
                x = xa ^ xb
                z = za ^ zb
                k = (
                    (xa & za).bit_count()
                    + (xb & zb).bit_count()
                    + 2 * (za & xb).bit_count()
                    - (x & z).bit_count()
                ) % 4
                key = (x, z)
                value = out._terms.get(key, 0j) + ca * cb * _PHASES[k]
                if abs(value) <= COEFF_DROP_TOLERANCE:
                    out._terms.pop(key, None)
                else:
                    out._terms[key] = value
        return out

    def adjoint(self) -> "PauliSum":
        out = PauliSum(self.n_qubits)
        out._terms = {key: coeff.conjugate() for key, coeff in self._terms.items()}
        return out

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        """True when every canonical-string coefficient is real within tol."""
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def coefficient_one_norm(self) -> float:
        """Sum of coefficient magnitudes (the LCU normalization lambda)."""
        return float(sum(abs(c) for c in self._terms.values()))

    def dense(self) -> np.ndarray:
        _check_dense_size(self.n_qubits)
        dim = 1 << self.n_qubits
        rows = np.arange(dim)
        mat = np.zeros((dim, dim), dtype=complex)
        for (x, z), coeff in self._terms.items():
            perm, vals = pauli_action(self.n_qubits, x, z)
            mat[rows, perm] += coeff * vals
        return mat

    @classmethod
    def from_dense(cls, matrix: np.ndarray, tol: float = 1e-12) -> "PauliSum":
        """Expand a matrix in the Pauli-string basis (inverse of dense()).

        Coefficients are Tr(P^dag M) / 2^n; magnitudes at or below ``tol``
        are discarded.
        """
        matrix = np.asarray(matrix, dtype=complex)
        dim = matrix.shape[0]
        if matrix.shape != (dim, dim) or dim & (dim - 1):
            raise ValueError("matrix must be square with power-of-two size")
        n = dim.bit_length() - 1
        _check_dense_size(n)
        single = np.array(
            [
                [[1, 0], [0, 1]],
                [[0, 1], [1, 0]],
                [[0, -1j], [1j, 0]],
                [[1, 0], [0, -1]],
            ],
            dtype=complex,
        )
        # Reshape to one (row-bit, col-bit) axis pair per qubit, then contract
        # each pair against the conjugated single-qubit basis.  Axis pairs are
        # consumed from the trailing end, which walks qubit 0 upward.
        tensor = matrix.reshape((2,) * (2 * n))
        order: list[int] = []
        for axis in range(n):
            order += [axis, n + axis]
        tensor = tensor.transpose(order)
        for _ in range(n):
            nd = tensor.ndim
            tensor = np.tensordot(single.conj(), tensor, axes=([1, 2], [nd - 2, nd - 1]))
        tensor = tensor / dim
        letters = "IXYZ"
        out = cls(n)
        for multi in np.argwhere(np.abs(tensor) > tol):
            x = z = 0
            # multi[axis] indexes qubit (n - 1 - axis)
            for axis, p in enumerate(multi):
                xb, zb = _MASK_BITS[letters[p]]
                q = n - 1 - axis
                x |= xb << q
                z |= zb << q
            out._terms[(x, z)] = complex(tensor[tuple(multi)])
        return out

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for string, coeff in self.items():
            parts.append(f"({coeff:+.6g})*{string.label}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, terms={len(self)})"


@dataclass(frozen=True)
class FermionOp:
    """A single fermionic ladder operator acting on spin-orbital ``mode``."""

    mode: int
    dagger: bool

    def __post_init__(self) -> None:
        if self.mode < 0:
            raise ValueError("mode must be non-negative")

    def __str__(self) -> str:
        return f"a{'+' if self.dagger else ''}({self.mode})"


def jordan_wigner(op: FermionOp, n_modes: int) -> PauliSum:
    """Jordan-Wigner image of one ladder operator on ``n_modes`` qubits.

    Mode p maps to qubit p with a Z parity string on modes below p:

        a_p      -> Z_0 ... Z_{p-1} (X_p + i Y_p) / 2
        a_p^dag  -> Z_0 ... Z_{p-1} (X_p - i Y_p) / 2
    """
    if op.mode >= n_modes:
        raise ValueError(f"mode {op.mode} out of range for {n_modes} modes")
    zs = (1 << op.mode) - 1
    xbit = 1 << op.mode
    sign = -1j if op.dagger else 1j
    return PauliSum(
        n_modes,
        [
            (PauliString(n_modes, xbit, zs), 0.5),
            (PauliString(n_modes, xbit, zs | xbit), 0.5 * sign),
        ],
    )


def jordan_wigner_product(ops: Sequence[FermionOp], n_modes: int) -> PauliSum:
    """Image of an ordered product of ladder operators (left to right)."""
    if not ops:
        return PauliSum.identity(n_modes)
    out = jordan_wigner(ops[0], n_modes)
    for op in ops[1:]:
        out = out @ jordan_wigner(op, n_modes)
    return out


def number_operator(mode: int, n_modes: int) -> PauliSum:
    """Occupation-number operator (I - Z_mode) / 2."""
    if mode >= n_modes:
        raise ValueError(f"mode {mode} out of range for {n_modes} modes")
    return PauliSum(
        n_modes,
        [
            (PauliString.identity(n_modes), 0.5),
            (PauliString(n_modes, 0, 1 << mode), -0.5),
        ],
    )
