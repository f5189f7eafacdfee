"""Independent brute-force references built from raw tensor-product operators."""

import math

import numpy as np


def boson_ops(cutoff):
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1).astype(complex)
    return a, a.conj().T


def collective_spin(n_atoms):
    """S₊, S₋, S₃ of n_atoms two-level atoms on the 2^N product space (bit 1 = up)."""
    dim = 2 ** n_atoms
    sp = np.zeros((dim, dim), dtype=complex)
    s3 = np.zeros(dim)
    for state in range(dim):
        ups = bin(state).count("1")
        s3[state] = ups - n_atoms / 2
        for k in range(n_atoms):
            if not state >> k & 1:
                sp[state | 1 << k, state] = 1.0
    return sp, sp.conj().T, np.diag(s3).astype(complex)


def full_hamiltonian(n_atoms, cutoff, omega_p, delta, k1, k2):
    """ω_p(a†a + S₃ + 𝒩/2) + ΔS₃ + k₁(aS₊ + a†S₋) + k₂(a a†a S₊ + a†a a† S₋)."""
    a, ad = boson_ops(cutoff)
    sp, sm, s3 = collective_spin(n_atoms)
    Ib, Is = np.eye(cutoff + 1), np.eye(2 ** n_atoms)
    num = ad @ a
    H = omega_p * (np.kron(num, Is) + np.kron(Ib, s3) + n_atoms / 2 * np.eye(len(Ib) * len(Is)))
    H = H + delta * np.kron(Ib, s3)
    H = H + k1 * (np.kron(a, sp) + np.kron(ad, sm))
    H = H + k2 * (np.kron(a @ num, sp) + np.kron(num @ ad, sm))
    return H


def dicke_copies(n_atoms):
    """{r: [columns |r, m⟩ for m = -r … r, one matrix per copy of the irrep]}."""
    sp, sm, s3 = collective_spin(n_atoms)
    casimir = s3 @ s3 + 0.5 * (sp @ sm + sm @ sp)
    m_diag = np.real(np.diag(s3))
    out = {}
    for two_r in range(n_atoms % 2, n_atoms + 1, 2):
        r = two_r / 2
        idx = np.flatnonzero(np.isclose(m_diag, r))
        sub = casimir[np.ix_(idx, idx)]
        w, v = np.linalg.eigh(sub)
        tops = v[:, np.isclose(w, r * (r + 1))]
        copies = []
        for j in range(tops.shape[1]):
            vec = np.zeros(2 ** n_atoms, dtype=complex)
            vec[idx] = tops[:, j]
            ladder = [vec]
            for _ in range(two_r):
                nxt = sm @ ladder[-1]
                ladder.append(nxt / np.linalg.norm(nxt))
            copies.append(np.stack(ladder[::-1], axis=1))  # m ascending
        out[r] = copies
    return out


def sector_basis(M, r, dicke, cutoff):
    """Columns |n = M - r - m⟩ ⊗ |r, m⟩, m ascending, for one Dicke copy."""
    dim = int(min(2 * r, M)) + 1
    cols = []
    for i in range(dim):
        m = -r + i
        n = int(round(M - r - m))
        fock = np.zeros(cutoff + 1)
        fock[n] = 1.0
        cols.append(np.kron(fock, dicke[:, int(round(m + r))]))
    return np.stack(cols, axis=1)


def coherent_unexcited(n0, n_atoms, cutoff):
    """Truncated, renormalized coherent state (real amplitude) ⊗ all atoms down."""
    n = np.arange(cutoff + 1)
    logp = -n0 + n * math.log(n0) - np.array([math.lgamma(k + 1) for k in n])
    amp = np.sqrt(np.exp(logp))
    amp /= np.linalg.norm(amp)
    down = np.zeros(2 ** n_atoms)
    down[0] = 1.0
    return np.kron(amp, down).astype(complex)


def evolve_moments(H, psi0, number_op, times):
    w, v = np.linalg.eigh(H)
    c = v.conj().T @ psi0
    psi = v @ (c[:, None] * np.exp(-1j * np.outer(w, times)))
    nd = np.real(np.diag(number_op))
    prob = np.abs(psi) ** 2
    return nd @ prob, (nd ** 2) @ prob


def photon_number(n_atoms, cutoff):
    a, ad = boson_ops(cutoff)
    return np.kron(ad @ a, np.eye(2 ** n_atoms))
