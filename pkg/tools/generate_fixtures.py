#!/usr/bin/env python3
"""Regenerate the packaged integral fixtures (FCIDUMP + split sidecars).

Both packaged systems use the 6-31G basis, which is s-type only for H and
He, so every integral has a closed form built on the lowest Boys function.
The pipeline is: primitive integrals -> contracted AO matrices -> RHF ->
MO transform -> files.  Nuclear repulsion goes into the FCIDUMP core-energy
record; the sidecar carries the kinetic/potential split of the one-electron
matrix so energy decompositions can be reconstructed downstream.

The script verifies the physics before writing anything: it rebuilds the
second-quantized Hamiltonian with dense ladder matrices (a code path the
package itself never uses), checks two-electron sector spectra and
Pauli-term counts, and asserts pinned reference values.  Committed fixtures
under src/qasim/data should never change when this is rerun.

Usage:  python3 tools/generate_fixtures.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np
from scipy.linalg import eigh
from scipy.special import erf

# 6-31G exponents/contractions (EMSL tabulation).
H_CORE_EXPS = [18.7311370, 2.8253937, 0.6401217]
H_CORE_COEFS = [0.03349460, 0.23472695, 0.81375733]
H_OUTER_EXP = 0.1612778
HE_CORE_EXPS = [38.4216340, 5.7780300, 1.2417740]
HE_CORE_COEFS = [0.0237660, 0.1546790, 0.4696300]
HE_OUTER_EXP = 0.2979640

H2_BOND_BOHR = 1.4


def boys0(x):
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    m = x > 1e-14
    out[m] = 0.5 * np.sqrt(np.pi / x[m]) * erf(np.sqrt(x[m]))
    return out


class ContractedS:
    """A normalized contraction of s-type primitive Gaussians."""

    def __init__(self, exps, coefs, center):
        self.exps = np.asarray(exps, float)
        self.coefs = np.asarray(coefs, float) * (2.0 * self.exps / np.pi) ** 0.75
        self.center = np.asarray(center, float)
        s = 0.0
        for a, ca in zip(self.exps, self.coefs):
            for b, cb in zip(self.exps, self.coefs):
                s += ca * cb * (np.pi / (a + b)) ** 1.5
        self.coefs /= np.sqrt(s)


def s_overlap_prim(a, A, b, B):
    p = a + b
    ab2 = np.dot(A - B, A - B)
    return (np.pi / p) ** 1.5 * np.exp(-a * b / p * ab2)


def s_kinetic_prim(a, A, b, B):
    p = a + b
    ab2 = np.dot(A - B, A - B)
    mu = a * b / p
    return mu * (3.0 - 2.0 * mu * ab2) * s_overlap_prim(a, A, b, B)


def s_nuclear_prim(a, A, b, B, C, Z):
    p = a + b
    ab2 = np.dot(A - B, A - B)
    P = (a * A + b * B) / p
    pc2 = np.dot(P - C, P - C)
    return -Z * 2.0 * np.pi / p * np.exp(-a * b / p * ab2) * boys0(p * pc2)


def s_eri_prim(a, A, b, B, c, C, d, D):
    p = a + b
    q = c + d
    P = (a * A + b * B) / p
    Q = (c * C + d * D) / q
    pref = 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))
    expo = np.exp(-a * b / p * np.dot(A - B, A - B) - c * d / q * np.dot(C - D, C - D))
    return pref * expo * boys0(p * q / (p + q) * np.dot(P - Q, P - Q))


def ao_integrals(shells, charges):
    n = len(shells)
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i, si in enumerate(shells):
        for j, sj in enumerate(shells):
            for a, ca in zip(si.exps, si.coefs):
                for b, cb in zip(sj.exps, sj.coefs):
                    S[i, j] += ca * cb * s_overlap_prim(a, si.center, b, sj.center)
                    T[i, j] += ca * cb * s_kinetic_prim(a, si.center, b, sj.center)
                    for Z, pos in charges:
                        V[i, j] += ca * cb * s_nuclear_prim(
                            a, si.center, b, sj.center, np.asarray(pos, float), Z
                        )
    eri = np.zeros((n, n, n, n))
    for i, si in enumerate(shells):
        for j, sj in enumerate(shells):
            for k, sk in enumerate(shells):
                for l, sl in enumerate(shells):
                    v = 0.0
                    for a, ca in zip(si.exps, si.coefs):
                        for b, cb in zip(sj.exps, sj.coefs):
                            for c, cc in zip(sk.exps, sk.coefs):
                                for d, cd in zip(sl.exps, sl.coefs):
                                    v += ca * cb * cc * cd * s_eri_prim(
                                        a, si.center, b, sj.center,
                                        c, sk.center, d, sl.center,
                                    )
                    eri[i, j, k, l] = v  # chemists' notation (ij|kl)
    return S, T, V, eri


def rhf(S, Hcore, eri, n_elec, e_nuc, iters=200, tol=1e-12):
    nocc = n_elec // 2
    e, C = eigh(Hcore, S)
    D = 2.0 * C[:, :nocc] @ C[:, :nocc].T
    E_old = 0.0
    for _ in range(iters):
        J = np.einsum("ijkl,kl->ij", eri, D)
        K = np.einsum("ikjl,kl->ij", eri, D)
        F = Hcore + J - 0.5 * K
        E = 0.5 * np.sum(D * (Hcore + F)) + e_nuc
        e, C = eigh(F, S)
        D = 2.0 * C[:, :nocc] @ C[:, :nocc].T
        if abs(E - E_old) < tol:
            break
        E_old = E
    # deterministic column signs: largest-magnitude component positive
    for k in range(C.shape[1]):
        if C[np.argmax(np.abs(C[:, k])), k] < 0:
            C[:, k] = -C[:, k]
    return E, e, C


def mo_transform(C, T, V, eri):
    t = C.T @ T @ C
    v = C.T @ V @ C
    g = np.einsum("ijkl,ip,jq,kr,ls->pqrs", eri, C, C, C, C, optimize=True)
    return t, v, g


# ---------------------------------------------------------------------------
# Dense-ladder-matrix verification (independent of the package's Pauli path).


def ladder_ops(n_so):
    I2 = np.eye(2)
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    Y = np.array([[0, -1j], [1j, 0]])
    Z = np.diag([1.0, -1.0])
    lower = (X + 1j * Y) / 2  # |0><1|
    ops = []
    for p in range(n_so):
        mats = []
        for q in range(n_so - 1, -1, -1):  # most-significant qubit first
            mats.append(I2 if q > p else lower if q == p else Z)
        M = mats[0]
        for m in mats[1:]:
            M = np.kron(M, m)
        ops.append(M)
    return ops


def build_dense_h(t, v, g, e_nuc):
    n_orb = t.shape[0]
    n_so = 2 * n_orb
    a = ladder_ops(n_so)
    ad = [m.conj().T for m in a]
    dim = 2**n_so
    H = np.zeros((dim, dim), complex)
    h1 = t + v
    for i in range(n_orb):
        for j in range(n_orb):
            if abs(h1[i, j]) < 1e-14:
                continue
            for s in (0, 1):
                H += h1[i, j] * ad[2 * i + s] @ a[2 * j + s]
    for i in range(n_orb):
        for j in range(n_orb):
            for k in range(n_orb):
                for l in range(n_orb):
                    if abs(g[i, j, k, l]) < 1e-14:
                        continue
                    for s in (0, 1):
                        for tau in (0, 1):
                            H += (
                                0.5
                                * g[i, j, k, l]
                                * ad[2 * i + s]
                                @ ad[2 * k + tau]
                                @ a[2 * l + tau]
                                @ a[2 * j + s]
                            )
    return H + e_nuc * np.eye(dim)


def sector_eigs(H, n_so, n_elec, ms2):
    idx = []
    for b in range(2**n_so):
        n_up = sum((b >> (2 * o)) & 1 for o in range(n_so // 2))
        n_dn = sum((b >> (2 * o + 1)) & 1 for o in range(n_so // 2))
        if n_up + n_dn == n_elec and n_up - n_dn == ms2:
            idx.append(b)
    return np.linalg.eigvalsh(H[np.ix_(idx, idx)])


def pauli_term_count(H, n_q, tol=1e-12):
    P = np.array(
        [np.eye(2), [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]],
        dtype=complex,
    )
    M = H.reshape((2,) * n_q + (2,) * n_q)
    perm = []
    for i in range(n_q):
        perm += [i, n_q + i]
    M = np.transpose(M, perm)
    for _ in range(n_q):
        nd = M.ndim
        M = np.tensordot(P.conj(), M, axes=([1, 2], [nd - 2, nd - 1]))
    return int(np.sum(np.abs(M / 2**n_q) > tol))


# ---------------------------------------------------------------------------
# File writers.


def write_fcidump(path, h, eri, e_nuc, n_elec, ms2):
    n = h.shape[0]
    lines = [
        f" &FCI NORB={n},NELEC={n_elec},MS2={ms2},",
        "  ORBSYM=" + ",".join(["1"] * n) + ",",
        "  ISYM=1,",
        " &END",
    ]

    def rec(value, i, j, k, l):
        lines.append(f" {value:23.17g} {i:3d} {j:3d} {k:3d} {l:3d}")

    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    if abs(eri[i, j, k, l]) > 1e-14:
                        rec(eri[i, j, k, l], i + 1, j + 1, k + 1, l + 1)
    for i in range(n):
        for j in range(i + 1):
            rec(h[i, j], i + 1, j + 1, 0, 0)
    rec(e_nuc, 0, 0, 0, 0)
    Path(path).write_text("\n".join(lines) + "\n")


def write_splits(path, t, v):
    n = t.shape[0]
    lines = []
    for tag, mat in (("&KINETIC", t), ("&POTENTIAL", v)):
        lines.append(tag)
        for i in range(n):
            for j in range(i + 1):
                lines.append(f" {mat[i, j]:23.17g} {i + 1:3d} {j + 1:3d}")
    lines.append("&END")
    Path(path).write_text("\n".join(lines) + "\n")


def build_system(shells, charges, n_elec, e_nuc, name, checks):
    S, T, V, eri = ao_integrals(shells, charges)
    E, orbe, C = rhf(S, T + V, eri, n_elec, e_nuc)
    print(f"{name}: RHF energy {E:.12f}, orbital energies {np.round(orbe, 6)}")
    assert abs(E - checks["rhf"]) < 1e-9, f"{name} RHF drifted: {E}"
    t, v, g = mo_transform(C, T, V, eri)

    H = build_dense_h(t, v, g, e_nuc)
    assert np.max(np.abs(H - H.conj().T)) < 1e-10
    ev = sector_eigs(H, 2 * t.shape[0], n_elec, 0)
    print(f"{name}: two-electron Sz=0 sector range [{ev[0]:.8f}, {ev[-1]:.8f}]")
    assert abs(ev[0] - checks["sector_lo"]) < 1e-6
    assert abs(ev[-1] - checks["sector_hi"]) < 1e-6
    count = pauli_term_count(H, 2 * t.shape[0])
    print(f"{name}: Pauli terms in the qubit Hamiltonian: {count}")
    assert count == checks["terms"], f"{name} term count {count}"
    return t, v, g


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "src" / "qasim" / "data"
    )
    outdir.mkdir(parents=True, exist_ok=True)

    origin = [0.0, 0.0, 0.0]
    he_shells = [
        ContractedS(HE_CORE_EXPS, HE_CORE_COEFS, origin),
        ContractedS([HE_OUTER_EXP], [1.0], origin),
    ]
    t, v, g = build_system(
        he_shells,
        [(2.0, origin)],
        n_elec=2,
        e_nuc=0.0,
        name="He/6-31G",
        checks={
            "rhf": -2.855160426154,
            "sector_lo": -2.87016214,
            "sector_hi": 0.60863701,
            "terms": 27,
        },
    )
    write_fcidump(outdir / "he_631g.fcidump", t + v, g, 0.0, 2, 0)
    write_splits(outdir / "he_631g.splits", t, v)

    site_a = origin
    site_b = [0.0, 0.0, H2_BOND_BOHR]
    h2_shells = [
        ContractedS(H_CORE_EXPS, H_CORE_COEFS, site_a),
        ContractedS([H_OUTER_EXP], [1.0], site_a),
        ContractedS(H_CORE_EXPS, H_CORE_COEFS, site_b),
        ContractedS([H_OUTER_EXP], [1.0], site_b),
    ]
    e_nuc = 1.0 / H2_BOND_BOHR
    t, v, g = build_system(
        h2_shells,
        [(1.0, site_a), (1.0, site_b)],
        n_elec=2,
        e_nuc=e_nuc,
        name="H2/6-31G @ 1.4 bohr",
        checks={
            "rhf": -1.126742704452,
            "sector_lo": -1.15167903,
            "sector_hi": 1.92554394,
            "terms": 185,
        },
    )
    write_fcidump(outdir / "h2_631g_1p4.fcidump", t + v, g, e_nuc, 2, 0)
    write_splits(outdir / "h2_631g_1p4.splits", t, v)

    print(f"fixtures written to {outdir}")


if __name__ == "__main__":
    main()
