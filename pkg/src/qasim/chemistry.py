"""Electronic-structure inputs: FCIDUMP parsing, qubit Hamiltonians,
observables, and sector-resolved initial states.

Spin-orbitals are interleaved, mode = 2 * orbital + spin with spin 0 the
up/alpha channel, and mode p sits on qubit p.  All energies are in hartree.

The FCIDUMP is the molecule-independent exchange format for MO-basis
integrals: a namelist header (NORB, NELEC, MS2), two-electron records in
chemists' notation with 8-fold symmetry, one-electron records flagged by
trailing zero indices, and a core-energy record with all indices zero.  A
plain-text sidecar with ``&KINETIC`` / ``&POTENTIAL`` sections splits the
one-electron matrix so kinetic/potential energy decompositions stay exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .paulis import FermionOp, PauliSum, jordan_wigner_product, number_operator
from .statevector import StateVector

SYMMETRY_TOL = 1e-10


@dataclass
class IntegralSet:
    """MO-basis integrals for one molecular system.

    ``h_core`` is the full one-electron matrix; ``kinetic``/``potential``
    are its optional split (must add back up to ``h_core`` exactly).  ``eri``
    holds (ij|kl) in chemists' notation with full 8-fold symmetry.
    """

    n_orbitals: int
    h_core: np.ndarray
    eri: np.ndarray
    e_nuc: float
    n_electrons: int
    ms2: int
    kinetic: np.ndarray | None = None
    potential: np.ndarray | None = None

    def __post_init__(self) -> None:
        n = self.n_orbitals
        if self.h_core.shape != (n, n):
            raise ValueError("h_core shape mismatch")
        if self.eri.shape != (n, n, n, n):
            raise ValueError("eri shape mismatch")
        if not np.allclose(self.h_core, self.h_core.T, atol=SYMMETRY_TOL):
            raise ValueError("one-electron matrix is not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(self.eri, self.eri.transpose(perm), atol=SYMMETRY_TOL):
                raise ValueError("two-electron integrals break 8-fold symmetry")
        if (self.kinetic is None) != (self.potential is None):
            raise ValueError("kinetic and potential must be given together")
        if self.kinetic is not None:
            for name, mat in (("kinetic", self.kinetic), ("potential", self.potential)):
                if mat.shape != (n, n):
                    raise ValueError(f"{name} shape mismatch")
                if not np.allclose(mat, mat.T, atol=SYMMETRY_TOL):
                    raise ValueError(f"{name} matrix is not symmetric")
            if not np.allclose(
                self.kinetic + self.potential, self.h_core, atol=SYMMETRY_TOL
            ):
                raise ValueError("kinetic + potential does not reproduce h_core")

    @property
    def has_split(self) -> bool:
        return self.kinetic is not None

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_orbitals


class FcidumpError(ValueError):
    pass


def _header_int(header: str, key: str, path_hint: str) -> int:
    m = re.search(rf"{key}\s*=\s*(-?\d+)", header, re.IGNORECASE)
    if not m:
        raise FcidumpError(f"missing {key} in FCIDUMP header ({path_hint})")
    return int(m.group(1))


def parse_fcidump(text: str, path_hint: str = "<string>"):
    """Parse FCIDUMP text into (n_orbitals, n_electrons, ms2, h, eri, e_nuc).

    Unknown header keys are ignored.  Two-electron records are expanded to
    all eight index permutations; one-electron records are symmetrized.
    """
    lines = text.splitlines()
    if not lines or "&FCI" not in lines[0].upper():
        raise FcidumpError(f"missing &FCI header ({path_hint})")
    header_lines = []
    body_start = None
    for ln, line in enumerate(lines):
        header_lines.append(line)
        stripped = line.strip().upper()
        if stripped.endswith("&END") or stripped == "/" or stripped.endswith("/"):
            body_start = ln + 1
            break
    if body_start is None:
        raise FcidumpError(f"unterminated FCIDUMP header ({path_hint})")
    header = " ".join(header_lines)
    n = _header_int(header, "NORB", path_hint)
    n_elec = _header_int(header, "NELEC", path_hint)
    ms2 = _header_int(header, "MS2", path_hint)
    if n < 1:
        raise FcidumpError(f"NORB must be positive ({path_hint})")

    h = np.zeros((n, n))
    eri = np.zeros((n, n, n, n))
    e_nuc = 0.0
    for ln in range(body_start, len(lines)):
        tokens = lines[ln].split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise FcidumpError(f"malformed record at line {ln + 1} ({path_hint})")
        try:
            value = float(tokens[0])
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError:
            raise FcidumpError(
                f"malformed record at line {ln + 1} ({path_hint})"
            ) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n:
                raise FcidumpError(
                    f"orbital index {idx} out of range at line {ln + 1} ({path_hint})"
                )
        if i == j == k == l == 0:
            e_nuc = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(
                    f"malformed one-electron record at line {ln + 1} ({path_hint})"
                )
            h[i - 1, j - 1] = value
            h[j - 1, i - 1] = value
        else:
            if 0 in (i, j, k, l):
                raise FcidumpError(
                    f"malformed two-electron record at line {ln + 1} ({path_hint})"
                )
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            for p, q, r, s in (
                (a, b, c, d), (b, a, c, d), (a, b, d, c), (b, a, d, c),
                (c, d, a, b), (d, c, a, b), (c, d, b, a), (d, c, b, a),
            ):
                eri[p, q, r, s] = value
    return n, n_elec, ms2, h, eri, e_nuc


def parse_splits(text: str, n_orbitals: int, path_hint: str = "<string>"):
    """Parse a kinetic/potential sidecar into two symmetric matrices."""
    sections = {"&KINETIC": np.zeros((n_orbitals, n_orbitals)),
                "&POTENTIAL": np.zeros((n_orbitals, n_orbitals))}
    seen = set()
    current = None
    for ln, line in enumerate(text.splitlines()):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        upper = stripped.upper()
        if upper in sections:
            current = sections[upper]
            seen.add(upper)
            continue
        if upper == "&END":
            current = None
            continue
        if current is None:
            raise FcidumpError(f"record outside a section at line {ln + 1} ({path_hint})")
        tokens = stripped.split()
        if len(tokens) != 3:
            raise FcidumpError(f"malformed split record at line {ln + 1} ({path_hint})")
        try:
            value = float(tokens[0])
            i, j = int(tokens[1]), int(tokens[2])
        except ValueError:
            raise FcidumpError(
                f"malformed split record at line {ln + 1} ({path_hint})"
            ) from None
        if not (1 <= i <= n_orbitals and 1 <= j <= n_orbitals):
            raise FcidumpError(
                f"orbital index out of range at line {ln + 1} ({path_hint})"
            )
        current[i - 1, j - 1] = value
        current[j - 1, i - 1] = value
    missing = {"&KINETIC", "&POTENTIAL"} - seen
    if missing:
        raise FcidumpError(f"missing sections {sorted(missing)} ({path_hint})")
    return sections["&KINETIC"], sections["&POTENTIAL"]


def load_integrals(fcidump_path, splits_path=None) -> IntegralSet:
    fcidump_path = Path(fcidump_path)
    n, n_elec, ms2, h, eri, e_nuc = parse_fcidump(
        fcidump_path.read_text(), str(fcidump_path)
    )
    kinetic = potential = None
    if splits_path is not None:
        splits_path = Path(splits_path)
        kinetic, potential = parse_splits(splits_path.read_text(), n, str(splits_path))
    return IntegralSet(
        n_orbitals=n,
        h_core=h,
        eri=eri,
        e_nuc=e_nuc,
        n_electrons=n_elec,
        ms2=ms2,
        kinetic=kinetic,
        potential=potential,
    )


# ---------------------------------------------------------------------------
# Qubit operators.


def _one_body(matrix: np.ndarray, n_so: int) -> PauliSum:
    out = PauliSum.zero(n_so)
    n = matrix.shape[0]
    for i in range(n):
        for j in range(n):
            if abs(matrix[i, j]) < 1e-14:
                continue
            for spin in (0, 1):
                image = jordan_wigner_product(
                    [FermionOp(2 * i + spin, True), FermionOp(2 * j + spin, False)],
                    n_so,
                )
                for string, coeff in image.items():
                    out.add_term(string, matrix[i, j] * coeff)
    return out


def _two_body(eri: np.ndarray, n_so: int) -> PauliSum:
    # 1/2 sum_{ijkl, s t} (ij|kl) a+_{is} a+_{kt} a_{lt} a_{js}
    out = PauliSum.zero(n_so)
    n = eri.shape[0]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    g = eri[i, j, k, l]
                    if abs(g) < 1e-14:
                        continue
                    for s in (0, 1):
                        for t in (0, 1):
                            image = jordan_wigner_product(
                                [
                                    FermionOp(2 * i + s, True),
                                    FermionOp(2 * k + t, True),
                                    FermionOp(2 * l + t, False),
                                    FermionOp(2 * j + s, False),
                                ],
                                n_so,
                            )
                            for string, coeff in image.items():
                                out.add_term(string, 0.5 * g * coeff)
    return out


def build_hamiltonian(integrals: IntegralSet) -> PauliSum:
    """Second-quantized Hamiltonian mapped to qubits.

    Includes the constant nuclear-repulsion offset, so eigenvalues are total
    energies in hartree.
    """
    n_so = integrals.n_spin_orbitals
    out = _one_body(integrals.h_core, n_so) + _two_body(integrals.eri, n_so)
    if integrals.e_nuc != 0.0:
        out = out + PauliSum.identity(n_so, integrals.e_nuc)
    return out


def orbital_population(orbital: int, n_so: int) -> PauliSum:
    """Total occupation of one spatial orbital (both spin channels)."""
    return number_operator(2 * orbital, n_so) + number_operator(2 * orbital + 1, n_so)


def build_observables(
    integrals: IntegralSet,
    orbital_labels=None,
    populations: bool = True,
    energies: bool = True,
) -> dict[str, PauliSum]:
    """Named observable map: orbital populations and energy components.

    Energy components require the kinetic/potential split; ``E_total`` is
    assembled from the components plus nuclear repulsion and equals the
    Hamiltonian operator exactly.
    """
    n_so = integrals.n_spin_orbitals
    if orbital_labels is None:
        orbital_labels = [f"orb{p}" for p in range(integrals.n_orbitals)]
    if len(orbital_labels) != integrals.n_orbitals:
        raise ValueError("orbital_labels length must match n_orbitals")
    out: dict[str, PauliSum] = {}
    if populations:
        for p, label in enumerate(orbital_labels):
            out[f"pop_{label}"] = orbital_population(p, n_so)
    if energies:
        if not integrals.has_split:
            raise ValueError(
                "split kinetic/potential integrals are required for the energy "
                "decomposition; provide the sidecar file"
            )
        e_kin = _one_body(integrals.kinetic, n_so)
        e_pot = _one_body(integrals.potential, n_so)
        e_cou = _two_body(integrals.eri, n_so)
        e_tot = e_kin + e_pot + e_cou
        if integrals.e_nuc != 0.0:
            e_tot = e_tot + PauliSum.identity(n_so, integrals.e_nuc)
        out["E_total"] = e_tot
        out["E_coulomb"] = e_cou
        out["E_kinetic"] = e_kin
        out["E_potential"] = e_pot
    return out


# ---------------------------------------------------------------------------
# Sector eigenstates and initial-state preparation.


def sector_indices(n_orbitals: int, n_electrons: int, ms2: int) -> list[int]:
    """Basis indices with fixed electron count and spin projection.

    ms2 is twice the Sz eigenvalue (number of up minus down electrons).
    """
    out = []
    for b in range(1 << (2 * n_orbitals)):
        n_up = sum((b >> (2 * p)) & 1 for p in range(n_orbitals))
        n_dn = sum((b >> (2 * p + 1)) & 1 for p in range(n_orbitals))
        if n_up + n_dn == n_electrons and n_up - n_dn == ms2:
            out.append(b)
    return out


def sector_spectrum(hamiltonian: PauliSum, n_electrons: int, ms2: int):
    """Eigenvalues and full-register eigenvectors within one symmetry sector.

    Returns (eigenvalues ascending, column matrix of embedded eigenvectors).
    Eigenvector phases are fixed by making the largest-magnitude amplitude
    real and positive.
    """
    n_so = hamiltonian.n_qubits
    if n_so % 2:
        raise ValueError("spin-orbital register must have even qubit count")
    idx = sector_indices(n_so // 2, n_electrons, ms2)
    if not idx:
        raise ValueError(
            f"empty sector: {n_electrons} electrons with ms2={ms2} "
            f"on {n_so // 2} orbitals"
        )
    dense = hamiltonian.dense()
    block = dense[np.ix_(idx, idx)]
    vals, vecs = np.linalg.eigh(block)
    full = np.zeros((1 << n_so, len(idx)), dtype=complex)
    for col in range(len(idx)):
        v = vecs[:, col]
        pivot = np.argmax(np.abs(v))
        phase = v[pivot] / abs(v[pivot])
        full[idx, col] = v / phase
    return vals, full


@dataclass
class PreparedState:
    """An initial state assembled from sector eigenstates."""

    state: StateVector
    eigenvalues: np.ndarray
    amplitudes: np.ndarray


def build_initial_state(
    hamiltonian: PauliSum,
    n_electrons: int,
    ms2: int,
    eigenstate_indices,
    amplitudes=None,
) -> PreparedState:
    """Superpose selected sector eigenstates with fixed amplitudes.

    Indices follow numpy semantics (negative counts from the top of the
    sector spectrum).  Default amplitudes are a uniform superposition.
    Degenerate selections are refused: the requested states would not be
    individually well defined.
    """
    vals, vecs = sector_spectrum(hamiltonian, n_electrons, ms2)
    m = len(vals)
    resolved = []
    for raw in eigenstate_indices:
        idx = int(raw)
        if idx < 0:
            idx += m
        if not 0 <= idx < m:
            raise ValueError(f"eigenstate index {raw} out of range for sector size {m}")
        resolved.append(idx)
    if len(set(resolved)) != len(resolved):
        raise ValueError("duplicate eigenstate indices")
    chosen = np.array([vals[i] for i in resolved])
    for a in range(len(resolved)):
        for b in range(a + 1, len(resolved)):
            if abs(chosen[a] - chosen[b]) < 1e-9:
                raise ValueError(
                    "selected eigenvalues are degenerate; the superposition is "
                    "not well defined"
                )
    if amplitudes is None:
        amplitudes = np.full(len(resolved), 1.0 / np.sqrt(len(resolved)), dtype=complex)
    else:
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (len(resolved),):
            raise ValueError("amplitudes length must match eigenstate count")
        if abs(np.sum(np.abs(amplitudes) ** 2) - 1.0) > 1e-8:
            raise ValueError("amplitudes must be normalized")
    psi = vecs[:, resolved] @ amplitudes
    return PreparedState(
        state=StateVector(hamiltonian.n_qubits, psi),
        eigenvalues=chosen,
        amplitudes=amplitudes,
    )
