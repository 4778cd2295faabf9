"""Pauli algebra against an explicit dense-matrix oracle.

Every symbolic identity used downstream (products, phases, commutation,
Jordan-Wigner images) is checked here against literal 2x2 matrices and
their Kronecker products, computed independently of the bit-mask code.
"""

import functools

import numpy as np
import pytest

from qasim.paulis import (
    FermionOp,
    PauliString,
    PauliSum,
    jordan_wigner,
    jordan_wigner_product,
    number_operator,
    pauli_action,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
MATS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def dense_oracle(label: str) -> np.ndarray:
    # qubit j = bit j of the basis index, so qubit 0 is the LAST kron factor
    return functools.reduce(np.kron, [MATS[ch] for ch in reversed(label)])


def random_string(rng, n_qubits: int) -> PauliString:
    full = (1 << n_qubits) - 1
    return PauliString(
        n_qubits,
        int(rng.integers(0, full + 1)),
        int(rng.integers(0, full + 1)),
        int(rng.integers(0, 4)),
    )


class TestPauliString:
    def test_label_round_trip(self):
        for label in ("I", "X", "Y", "Z", "XYZI", "ZZXY"):
            s = PauliString.from_label(label)
            assert s.label == label
            assert s.n_qubits == len(label)

    def test_invalid_label_rejected(self):
        with pytest.raises(ValueError, match="invalid Pauli letter"):
            PauliString.from_label("XQ")

    def test_mask_validation(self):
        with pytest.raises(ValueError):
            PauliString(1, x_mask=2)
        with pytest.raises(ValueError):
            PauliString(0)

    def test_dense_matches_oracle(self, rng):
        for n in (1, 2, 3):
            for _ in range(20):
                s = random_string(rng, n)
                expect = s.phase * dense_oracle(s.label)
                np.testing.assert_allclose(s.dense(), expect, atol=1e-14)

    def test_single_qubit_products(self):
        # the sign conventions that bit the most: XZ = -iY and ZX = +iY
        x = PauliString.from_label("X")
        y = PauliString.from_label("Y")
        z = PauliString.from_label("Z")
        np.testing.assert_allclose((x * z).dense(), X @ Z, atol=1e-15)
        np.testing.assert_allclose((z * x).dense(), Z @ X, atol=1e-15)
        assert (x * z).label == "Y" and (x * z).phase == -1j
        assert (z * x).label == "Y" and (z * x).phase == 1j
        assert (x * y).phase == 1j and (x * y).label == "Z"
        assert (y * x).phase == -1j

    def test_product_matches_dense_oracle(self, rng):
        for n in (1, 2, 3, 4):
            for _ in range(30):
                a = random_string(rng, n)
                b = random_string(rng, n)
                got = (a * b).dense()
                np.testing.assert_allclose(got, a.dense() @ b.dense(), atol=1e-13)

    def test_group_closure_and_unit_phase(self, rng):
        for _ in range(50):
            a = random_string(rng, 3)
            b = random_string(rng, 3)
            c = a * b
            assert isinstance(c, PauliString)
            assert abs(abs(c.phase) - 1.0) < 1e-15
            assert c.phase_power in (0, 1, 2, 3)

    def test_adjoint_is_inverse(self, rng):
        ident = np.eye(8)
        for _ in range(30):
            a = random_string(rng, 3)
            np.testing.assert_allclose(
                (a.adjoint() * a).dense(), ident, atol=1e-14
            )

    def test_canonical_strips_phase(self):
        s = PauliString.from_label("XY", phase_power=3)
        assert s.canonical().phase == 1
        assert s.canonical().label == "XY"

    def test_commutes_with_matches_dense(self, rng):
        for _ in range(40):
            a = random_string(rng, 3)
            b = random_string(rng, 3)
            comm = a.dense() @ b.dense() - b.dense() @ a.dense()
            assert a.commutes_with(b) == (np.abs(comm).max() < 1e-12)

    def test_weight(self):
        assert PauliString.from_label("IXYZ").weight() == 3
        assert PauliString.identity(5).weight() == 0

    def test_pauli_action_matches_matvec(self, rng):
        for n in (1, 3):
            for _ in range(15):
                s = random_string(rng, n)
                perm, vals = pauli_action(n, s.x_mask, s.z_mask, s.phase_power)
                v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
                np.testing.assert_allclose(vals * v[perm], s.dense() @ v, atol=1e-13)


class TestPauliSum:
    def test_dense_round_trip(self, rng):
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        op = PauliSum.from_dense(a)
        np.testing.assert_allclose(op.dense(), a, atol=1e-12)
        # 3 qubits span 64 strings; a generic matrix uses all of them
        assert len(op) == 64

    def test_from_dense_requires_square_power_of_two(self):
        with pytest.raises(ValueError):
            PauliSum.from_dense(np.zeros((3, 3)))

    def test_algebra_against_dense(self, rng):
        a = PauliSum.from_labels({"XI": 1.0, "ZZ": 2.0 - 1j})
        b = PauliSum.from_labels({"XI": -1.0, "YX": 0.5j})
        np.testing.assert_allclose((a + b).dense(), a.dense() + b.dense(), atol=1e-14)
        np.testing.assert_allclose((a - b).dense(), a.dense() - b.dense(), atol=1e-14)
        np.testing.assert_allclose((2.5 * a).dense(), 2.5 * a.dense(), atol=1e-14)
        np.testing.assert_allclose((a @ b).dense(), a.dense() @ b.dense(), atol=1e-14)
        np.testing.assert_allclose((-a).dense(), -a.dense(), atol=1e-14)

    def test_product_random(self, rng):
        for _ in range(10):
            pairs_a = {
                random_string(rng, 2).canonical(): complex(*rng.normal(size=2))
                for _ in range(4)
            }
            pairs_b = {
                random_string(rng, 2).canonical(): complex(*rng.normal(size=2))
                for _ in range(4)
            }
            a = PauliSum(2, list(pairs_a.items()))
            b = PauliSum(2, list(pairs_b.items()))
            np.testing.assert_allclose(
                (a @ b).dense(), a.dense() @ b.dense(), atol=1e-12
            )

    def test_cancellation_drops_terms(self):
        a = PauliSum.from_labels({"X": 1.0})
        b = PauliSum.from_labels({"X": -1.0})
        assert len(a + b) == 0
        np.testing.assert_allclose((a + b).dense(), np.zeros((2, 2)), atol=0)

    def test_adjoint_and_hermiticity(self):
        op = PauliSum.from_labels({"XY": 1j, "ZI": 2.0})
        np.testing.assert_allclose(op.adjoint().dense(), op.dense().conj().T, atol=1e-14)
        assert not op.is_hermitian()
        herm = op + op.adjoint()
        assert herm.is_hermitian()

    def test_phase_folded_into_coefficient(self):
        # adding i*(iX) must land on the canonical X slot with coefficient -1
        s = PauliString.from_label("X", phase_power=1)
        op = PauliSum(1, [(s, 1j)])
        assert op.coefficient(PauliString.from_label("X")) == pytest.approx(-1.0)

    def test_one_norm(self):
        op = PauliSum.from_labels({"X": 3.0, "Z": -4.0})
        assert op.coefficient_one_norm() == pytest.approx(7.0)

    def test_mismatched_qubit_counts_rejected(self):
        with pytest.raises(ValueError):
            PauliSum.from_labels({"X": 1.0}) + PauliSum.from_labels({"XX": 1.0})


class TestJordanWigner:
    def test_creation_operator_matrix(self):
        # a^dag on one mode is (X - iY)/2 = |1><0|
        op = jordan_wigner(FermionOp(0, dagger=True), 1)
        np.testing.assert_allclose(op.dense(), [[0, 0], [1, 0]], atol=1e-15)
        ann = jordan_wigner(FermionOp(0, dagger=False), 1)
        np.testing.assert_allclose(ann.dense(), [[0, 1], [0, 0]], atol=1e-15)

    def test_mode_out_of_range(self):
        with pytest.raises(ValueError):
            jordan_wigner(FermionOp(2, dagger=False), 2)

    def test_canonical_anticommutation(self):
        n = 4
        dim = 1 << n
        a = [jordan_wigner(FermionOp(p, dagger=False), n).dense() for p in range(n)]
        ad = [m.conj().T for m in a]
        for p in range(n):
            for q in range(n):
                anti = a[p] @ ad[q] + ad[q] @ a[p]
                np.testing.assert_allclose(
                    anti, np.eye(dim) if p == q else 0 * anti, atol=1e-13
                )
                np.testing.assert_allclose(
                    a[p] @ a[q] + a[q] @ a[p], np.zeros((dim, dim)), atol=1e-13
                )

    def test_parity_string_present(self):
        op = jordan_wigner(FermionOp(2, dagger=False), 3)
        labels = {s.label for s, _ in op.items()}
        assert labels == {"ZZX", "ZZY"}

    def test_number_operator(self):
        n = 3
        for p in range(n):
            direct = number_operator(p, n).dense()
            composed = jordan_wigner_product(
                [FermionOp(p, True), FermionOp(p, False)], n
            ).dense()
            np.testing.assert_allclose(direct, composed, atol=1e-14)
            evals = np.linalg.eigvalsh(direct)
            np.testing.assert_allclose(np.sort(evals), [0] * 4 + [1] * 4, atol=1e-14)

    def test_product_associates(self):
        ops = [FermionOp(0, True), FermionOp(1, False), FermionOp(1, True)]
        left = jordan_wigner_product(ops, 2)
        manual = (
            jordan_wigner(ops[0], 2)
            @ jordan_wigner(ops[1], 2)
            @ jordan_wigner(ops[2], 2)
        )
        np.testing.assert_allclose(left.dense(), manual.dense(), atol=1e-14)

    def test_empty_product_is_identity(self):
        np.testing.assert_allclose(
            jordan_wigner_product([], 2).dense(), np.eye(4), atol=0
        )
