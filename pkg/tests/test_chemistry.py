"""Integral parsing, operator construction, and state preparation.

The Hamiltonian built through the Pauli route is cross-checked against a
dense oracle assembled directly in the occupation-number basis, with signs
from explicit fermionic reordering and no Pauli algebra anywhere.
"""

import numpy as np
import pytest

from qasim.chemistry import (
    FcidumpError,
    IntegralSet,
    build_hamiltonian,
    build_initial_state,
    build_observables,
    load_integrals,
    orbital_population,
    parse_fcidump,
    parse_splits,
    sector_indices,
    sector_spectrum,
)
from qasim.paulis import PauliSum
from qasim.statevector import expectation

HE_SECTOR_EDGES = (-2.87016214, 0.60863701)
H2_SECTOR_EDGES = (-1.15167903, 1.92554394)


def ladder_dense(mode: int, n_modes: int, dagger: bool) -> np.ndarray:
    """Fermionic ladder operator in the occupation basis, parity done by hand."""
    dim = 1 << n_modes
    m = np.zeros((dim, dim))
    below = (1 << mode) - 1
    for b in range(dim):
        sign = -1.0 if bin(b & below).count("1") % 2 else 1.0
        if dagger and not (b >> mode) & 1:
            m[b | (1 << mode), b] = sign
        elif not dagger and (b >> mode) & 1:
            m[b & ~(1 << mode), b] = sign
    return m


def hamiltonian_oracle(integrals: IntegralSet) -> np.ndarray:
    n = integrals.n_orbitals
    n_so = 2 * n
    dim = 1 << n_so
    a = [ladder_dense(p, n_so, False) for p in range(n_so)]
    ad = [m.T for m in a]
    h = integrals.e_nuc * np.eye(dim)
    for i in range(n):
        for j in range(n):
            if integrals.h_core[i, j] == 0.0:
                continue
            for s in (0, 1):
                h = h + integrals.h_core[i, j] * (ad[2 * i + s] @ a[2 * j + s])
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    g = integrals.eri[i, j, k, l]
                    if g == 0.0:
                        continue
                    for s in (0, 1):
                        for t in (0, 1):
                            h = h + 0.5 * g * (
                                ad[2 * i + s]
                                @ ad[2 * k + t]
                                @ a[2 * l + t]
                                @ a[2 * j + s]
                            )
    return h


SAMPLE_FCIDUMP = """\
&FCI NORB=2,NELEC=2,MS2=0,
  ORBSYM=1,1,
  ISYM=1,
&END
  0.5                    1   1   1   1
  0.25                   2   1   2   1
  0.125                  2   2   2   1
 -1.0                    1   1   0   0
  0.75                   2   1   0   0
  0.3                    0   0   0   0
"""


class TestParseFcidump:
    def test_sample_round_trip(self):
        n, nelec, ms2, h, eri, e_nuc = parse_fcidump(SAMPLE_FCIDUMP)
        assert (n, nelec, ms2) == (2, 2, 0)
        assert e_nuc == pytest.approx(0.3)
        np.testing.assert_allclose(h, [[-1.0, 0.75], [0.75, 0.0]])
        assert eri[0, 0, 0, 0] == pytest.approx(0.5)
        # all eight permutations of a chemists'-notation record must be set
        for perm in (
            (1, 0, 1, 0), (0, 1, 1, 0), (1, 0, 0, 1), (0, 1, 0, 1),
        ):
            assert eri[perm] == pytest.approx(0.25)
        for perm in (
            (1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1), (0, 1, 1, 1),
        ):
            assert eri[perm] == pytest.approx(0.125)

    def test_missing_header(self):
        with pytest.raises(FcidumpError, match="&FCI"):
            parse_fcidump("NORB=2\n")

    def test_missing_norb(self):
        with pytest.raises(FcidumpError, match="NORB"):
            parse_fcidump("&FCI NELEC=2,MS2=0,\n&END\n")

    def test_unterminated_header(self):
        with pytest.raises(FcidumpError, match="unterminated"):
            parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n")

    def test_malformed_record(self):
        with pytest.raises(FcidumpError, match="malformed record"):
            parse_fcidump("&FCI NORB=1,NELEC=1,MS2=1,\n&END\n0.5 1 1\n")

    def test_index_out_of_range(self):
        with pytest.raises(FcidumpError, match="out of range"):
            parse_fcidump("&FCI NORB=1,NELEC=1,MS2=1,\n&END\n0.5 2 1 0 0\n")

    def test_half_one_electron_record(self):
        with pytest.raises(FcidumpError, match="one-electron"):
            parse_fcidump("&FCI NORB=1,NELEC=1,MS2=1,\n&END\n0.5 1 0 0 0\n")


SAMPLE_SPLITS = """\
# comment line
&KINETIC
 1.5  1 1
 0.2  2 1
&END
&POTENTIAL
-2.5  1 1
 0.55 2 1
 0.0  2 2
&END
"""


class TestParseSplits:
    def test_sample(self):
        kin, pot = parse_splits(SAMPLE_SPLITS, 2)
        np.testing.assert_allclose(kin, [[1.5, 0.2], [0.2, 0.0]])
        np.testing.assert_allclose(pot, [[-2.5, 0.55], [0.55, 0.0]])

    def test_missing_section(self):
        with pytest.raises(FcidumpError, match="missing sections"):
            parse_splits("&KINETIC\n1.0 1 1\n&END\n", 1)

    def test_record_outside_section(self):
        with pytest.raises(FcidumpError, match="outside a section"):
            parse_splits("1.0 1 1\n", 1)

    def test_malformed(self):
        with pytest.raises(FcidumpError, match="malformed split record"):
            parse_splits("&KINETIC\n1.0 1\n&END\n&POTENTIAL\n&END\n", 1)

    def test_out_of_range(self):
        with pytest.raises(FcidumpError, match="out of range"):
            parse_splits("&KINETIC\n1.0 3 1\n&END\n&POTENTIAL\n&END\n", 2)


class TestIntegralSet:
    def test_fixture_consistency(self, he_bundle, h2_bundle):
        he = he_bundle.integrals
        assert (he.n_orbitals, he.n_electrons, he.ms2) == (2, 2, 0)
        assert he.e_nuc == 0.0
        assert he.has_split
        h2 = h2_bundle.integrals
        assert (h2.n_orbitals, h2.n_electrons, h2.ms2) == (4, 2, 0)
        assert h2.e_nuc == pytest.approx(1.0 / 1.4, abs=1e-10)
        np.testing.assert_allclose(
            h2.kinetic + h2.potential, h2.h_core, atol=1e-10
        )

    def test_asymmetric_h_rejected(self):
        with pytest.raises(ValueError, match="not symmetric"):
            IntegralSet(
                n_orbitals=2,
                h_core=np.array([[1.0, 0.5], [0.0, 1.0]]),
                eri=np.zeros((2, 2, 2, 2)),
                e_nuc=0.0,
                n_electrons=2,
                ms2=0,
            )

    def test_inconsistent_split_rejected(self):
        with pytest.raises(ValueError, match="kinetic"):
            IntegralSet(
                n_orbitals=1,
                h_core=np.array([[1.0]]),
                eri=np.zeros((1, 1, 1, 1)),
                e_nuc=0.0,
                n_electrons=1,
                ms2=1,
                kinetic=np.array([[2.0]]),
                potential=np.array([[3.0]]),
            )

    def test_broken_eri_symmetry_rejected(self):
        eri = np.zeros((2, 2, 2, 2))
        eri[0, 1, 0, 0] = 0.5
        with pytest.raises(ValueError, match="8-fold"):
            IntegralSet(
                n_orbitals=2,
                h_core=np.eye(2),
                eri=eri,
                e_nuc=0.0,
                n_electrons=2,
                ms2=0,
            )

    def test_optional_split(self, tmp_path):
        path = tmp_path / "min.fcidump"
        path.write_text(SAMPLE_FCIDUMP)
        integrals = load_integrals(path)
        assert not integrals.has_split
        with pytest.raises(ValueError, match="split"):
            build_observables(integrals, energies=True)


class TestHamiltonian:
    def test_term_counts(self, he_bundle, h2_bundle):
        assert len(he_bundle.hamiltonian) == 27
        assert len(h2_bundle.hamiltonian) == 185

    def test_hermitian(self, he_bundle, h2_bundle):
        assert he_bundle.hamiltonian.is_hermitian()
        assert h2_bundle.hamiltonian.is_hermitian()

    def test_matches_occupation_basis_oracle(self, he_bundle, h2_bundle):
        for bundle in (he_bundle, h2_bundle):
            np.testing.assert_allclose(
                bundle.hamiltonian.dense(),
                hamiltonian_oracle(bundle.integrals),
                atol=1e-12,
            )

    def test_total_energy_observable_equals_hamiltonian(self, he_bundle, h2_bundle):
        for bundle in (he_bundle, h2_bundle):
            diff = bundle.observables["E_total"] - bundle.hamiltonian
            assert diff.coefficient_one_norm() < 1e-10

    def test_energy_components_sum(self, he_bundle):
        obs = he_bundle.observables
        total = obs["E_kinetic"] + obs["E_potential"] + obs["E_coulomb"]
        e_nuc = he_bundle.integrals.e_nuc
        if e_nuc:
            total = total + PauliSum.identity(total.n_qubits, e_nuc)
        assert (total - obs["E_total"]).coefficient_one_norm() < 1e-10


class TestSectorSpectrum:
    def test_sector_indices_explicit(self):
        # 2 orbitals, one up + one down electron: up parks on bit 0 or 2,
        # down on bit 1 or 3
        assert sector_indices(2, 2, 0) == [3, 6, 9, 12]
        assert sector_indices(2, 1, 1) == [1, 4]
        assert sector_indices(2, 1, -1) == [2, 8]

    def test_empty_sector_rejected(self, he_bundle):
        with pytest.raises(ValueError, match="empty sector"):
            sector_spectrum(he_bundle.hamiltonian, 5, 0)

    def test_reference_spectra(self, he_bundle, h2_bundle):
        for bundle, edges in (
            (he_bundle, HE_SECTOR_EDGES),
            (h2_bundle, H2_SECTOR_EDGES),
        ):
            integrals = bundle.integrals
            vals, vecs = sector_spectrum(
                bundle.hamiltonian, integrals.n_electrons, integrals.ms2
            )
            assert vals[0] == pytest.approx(edges[0], abs=1e-6)
            assert vals[-1] == pytest.approx(edges[1], abs=1e-6)
            assert np.all(np.diff(vals) >= -1e-12)

    def test_eigenvectors_live_in_sector(self, he_bundle):
        integrals = he_bundle.integrals
        vals, vecs = sector_spectrum(he_bundle.hamiltonian, 2, 0)
        idx = sector_indices(integrals.n_orbitals, 2, 0)
        outside = np.delete(np.arange(vecs.shape[0]), idx)
        assert np.abs(vecs[outside]).max() == 0.0
        np.testing.assert_allclose(
            np.linalg.norm(vecs, axis=0), np.ones(len(vals)), atol=1e-12
        )
        h = he_bundle.hamiltonian.dense()
        for col in range(vecs.shape[1]):
            np.testing.assert_allclose(
                h @ vecs[:, col], vals[col] * vecs[:, col], atol=1e-10
            )

    def test_phase_pivot_real_positive(self, he_bundle):
        _, vecs = sector_spectrum(he_bundle.hamiltonian, 2, 0)
        for col in range(vecs.shape[1]):
            pivot = vecs[np.argmax(np.abs(vecs[:, col])), col]
            assert pivot.imag == pytest.approx(0.0, abs=1e-12)
            assert pivot.real > 0


class TestPopulations:
    def test_population_spectrum(self):
        pop = orbital_population(0, 4)
        evals = np.linalg.eigvalsh(pop.dense())
        assert set(np.round(evals).astype(int)) <= {0, 1, 2}
        np.testing.assert_allclose(evals, np.round(evals), atol=1e-12)

    def test_populations_sum_to_electron_count(self, he_bundle):
        total = None
        for label in ("pop_1s", "pop_2s"):
            op = he_bundle.observables[label]
            total = op if total is None else total + op
        assert expectation(total, he_bundle.psi0) == pytest.approx(2.0, abs=1e-10)

    def test_label_mismatch_rejected(self, he_bundle):
        with pytest.raises(ValueError, match="orbital_labels"):
            build_observables(he_bundle.integrals, orbital_labels=["a"])


class TestInitialState:
    def test_uniform_superposition_default(self, he_bundle):
        prepared = build_initial_state(he_bundle.hamiltonian, 2, 0, (0, -1))
        np.testing.assert_allclose(
            prepared.amplitudes, [1 / np.sqrt(2)] * 2, atol=1e-12
        )
        assert prepared.state.norm() == pytest.approx(1.0, abs=1e-12)
        assert prepared.eigenvalues[0] == pytest.approx(HE_SECTOR_EDGES[0], abs=1e-6)
        assert prepared.eigenvalues[1] == pytest.approx(HE_SECTOR_EDGES[1], abs=1e-6)

    def test_pure_eigenstate_energy(self, he_bundle):
        prepared = build_initial_state(
            he_bundle.hamiltonian, 2, 0, (0,), amplitudes=[1.0]
        )
        energy = expectation(he_bundle.hamiltonian, prepared.state)
        assert energy.real == pytest.approx(prepared.eigenvalues[0], abs=1e-10)

    def test_index_out_of_range(self, he_bundle):
        with pytest.raises(ValueError, match="out of range"):
            build_initial_state(he_bundle.hamiltonian, 2, 0, (17,))

    def test_duplicate_indices(self, he_bundle):
        # -1 aliases the top of a four-state sector
        with pytest.raises(ValueError, match="duplicate"):
            build_initial_state(he_bundle.hamiltonian, 2, 0, (3, -1))

    def test_degenerate_selection_rejected(self):
        flat = PauliSum.zero(4)  # every sector eigenvalue is 0
        with pytest.raises(ValueError, match="degenerate"):
            build_initial_state(flat, 2, 0, (0, 1))

    def test_amplitude_validation(self, he_bundle):
        with pytest.raises(ValueError, match="length"):
            build_initial_state(he_bundle.hamiltonian, 2, 0, (0, -1), amplitudes=[1.0])
        with pytest.raises(ValueError, match="normalized"):
            build_initial_state(
                he_bundle.hamiltonian, 2, 0, (0, -1), amplitudes=[1.0, 1.0]
            )
