"""Sector Hamiltonians, exact and perturbative spectra, dressing transforms.

Energies are reported relative to the free-field energy ω_p(M + 𝒩/2 - r) of
the sector, which is a constant on the whole block and is carried separately
as ``free_energy``.  That keeps splittings of order k₁√r from being swamped
by an optical-frequency offset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, DegenerateError, DomainError
from .pae import BOUNDARY, IrrepSector, classify_sector, require_valid, spin_matrices, zone_of


@dataclass(frozen=True)
class SectorHamiltonian:
    M: int
    r: float
    matrix: np.ndarray
    free_energy: float
    delta: float
    m: np.ndarray  # S₃ eigenvalue of each basis state
    n: np.ndarray  # photon number of each basis state
    sector: IrrepSector | None = None

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def constant_term(self):
        """C₀ = ω_p(M + 𝒩/2 - r) + Δ(r̃ - r); defined for non-boundary sectors."""
        if self.sector is None:
            return None
        return self.free_energy + self.delta * (self.sector.r_tilde - self.r)


@dataclass(frozen=True)
class SectorSpectrum:
    exact: np.ndarray
    eigenvectors: np.ndarray
    perturbative: dict | None = None
    mean_splitting: float = float("nan")


@dataclass(frozen=True)
class DressingTransform:
    u0: np.ndarray
    u1: np.ndarray | None = None
    u2: np.ndarray | None = None
    order: int = 0

    @property
    def total(self):
        u = self.u0
        if self.u1 is not None:
            u = self.u1 @ u
        if self.u2 is not None:
            u = self.u2 @ u
        return u


def block_hamiltonian(M, r, delta, k1, k2, omega_p=0.0, n_atoms=None):
    """Tavis–Cummings block with the Kerr-type coupling, any zone.

    Basis |n, m⟩ with n + m + r = M, ordered by m ascending.  The hopping
    ⟨n-1, m+1|H|n, m⟩ = (k₁ + k₂n)√n √(r(r+1) - m(m+1)) comes from
    (k₁ + k₂a†a)a acting on |n⟩.
    """
    if M < 0 or int(M) != M:
        raise DomainError(f"M must be a nonnegative integer, got {M}")
    two_r = 2.0 * r
    if two_r < 0 or abs(two_r - round(two_r)) > 1e-9:
        raise DomainError(f"r must be a nonnegative half-integer, got {r}")
    dim = int(min(round(two_r), M)) + 1
    m = -r + np.arange(dim)
    n = M - r - m
    H = np.diag(delta * m).astype(complex)
    idx = np.arange(dim - 1)
    ni, mi = n[:-1], m[:-1]
    hop = (k1 + k2 * ni) * np.sqrt(ni) * np.sqrt(r * (r + 1) - mi * (mi + 1))
    H[idx + 1, idx] = hop
    H[idx, idx + 1] = hop
    if n_atoms is None:
        n_atoms = 2 * r
    free = omega_p * (M + n_atoms / 2.0 - r)
    return H, free, m, np.rint(n).astype(int)


def sector_hamiltonian(M, r, delta, k1, k2, omega_p=0.0, n_atoms=None):
    """Exact block for (M, r); attaches the algebraic sector when one exists."""
    H, free, m, n = block_hamiltonian(M, r, delta, k1, k2, omega_p, n_atoms)
    sector = None
    if zone_of(M, r) != BOUNDARY and k1 > 0:
        sector = classify_sector(M, r, k1, k2)
    return SectorHamiltonian(M=int(M), r=float(r), matrix=H, free_energy=free,
                             delta=float(delta), m=m, n=n, sector=sector)


def build_sector_hamiltonian(sector: IrrepSector, omega_p, delta, k1=None, k2=None,
                             n_atoms=None):
    require_valid(sector)
    k1 = sector.k1 if k1 is None else k1
    k2 = sector.k2 if k2 is None else k2
    H, free, m, n = block_hamiltonian(sector.M, sector.r, delta, k1, k2, omega_p, n_atoms)
    return SectorHamiltonian(M=sector.M, r=sector.r, matrix=H, free_energy=free,
                             delta=float(delta), m=m, n=n, sector=sector)


def exact_spectrum(h: SectorHamiltonian):
    try:
        w, v = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(h.matrix)
        raise ConditioningError(f"eigensolver failed for M = {h.M}: {exc}", condition=cond)
    split = (w[-1] - w[0]) / (len(w) - 1) if len(w) > 1 else float("nan")
    return SectorSpectrum(exact=w, eigenvectors=v, mean_splitting=split)


def perturbative_energies(sector: IrrepSector, delta, order):
    """Diagonal energies per m̃ (ascending) to order 0, 1 or 2 in α.

    Includes the Δ(r̃ - r) part of C₀ but not the free-field energy.
    """
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    D, k = float(delta), sector.k_eff
    O = np.hypot(D, k)
    if O == 0.0:
        raise DegenerateError("Omega_R = 0")
    mt = sector.m_tilde
    rt = sector.r_tilde
    R = rt * (rt + 1)
    E = D * (rt - sector.r) + O * mt
    if order >= 1:
        E = E - (sector.beta1 / 4) * (k * k * D / O ** 2) * (3 * mt ** 2 - R)
    if order >= 2:
        D2, k2_ = D * D, k * k
        b1 = (sector.beta1 / 4) ** 2 * (k2_ / O) * mt * (
            (4 * D2 ** 2 - 9 * D2 * k2_ + 4 * k2_ ** 2) / O ** 4 * mt ** 2
            - (2 * D2 ** 2 - 5 * D2 * k2_ + 2 * k2_ ** 2) / O ** 4 * R
            + 0.5 * (D2 ** 2 + D2 * k2_ + k2_ ** 2) / O ** 4)
        b2 = (sector.beta2 / 2) * (k2_ / O) * mt * (
            (4 * D2 - k2_) / O ** 2 * mt ** 2
            - (2 * D2 - k2_) / O ** 2 * R
            + 0.5 * (D2 - k2_) / O ** 2)
        E = E + b1 - b2
    return E


def perturbative_spectrum(sector: IrrepSector, delta, order):
    return perturbative_energies(sector, delta, order)


def truncated_hamiltonian(sector: IrrepSector, delta):
    """Second-order expansion of the block in the effective spin, minus free energy."""
    S = spin_matrices(sector.r_tilde)
    s3, sx = S.s3, S.sx
    k, b1, b2 = sector.k_eff, sector.beta1, sector.beta2
    I = np.eye(sector.dim)
    return (delta * (sector.r_tilde - sector.r) * I + delta * s3
            + k * (sx - (b1 / 4) * (s3 @ sx + sx @ s3) - b2 * (s3 @ sx @ s3 + sx / 4)))


def exp_i_hermitian(G):
    """exp(iG) for Hermitian G by spectral decomposition."""
    G = 0.5 * (G + G.conj().T)
    w, v = np.linalg.eigh(G)
    return (v * np.exp(1j * w)) @ v.conj().T


def dressing_generators(sector: IrrepSector, delta):
    """Hermitian generators G₀, G₁, G₂ with U_j = exp(iG_j)."""
    S = spin_matrices(sector.r_tilde)
    s3, sx, sy = S.s3, S.sx, S.sy
    I = np.eye(sector.dim)
    rt = sector.r_tilde
    R = rt * (rt + 1)
    psi = np.arctan2(sector.k_eff, delta)
    s, c = np.sin(psi), np.cos(psi)
    b1, b2 = sector.beta1, sector.beta2
    G0 = psi * sy
    G1 = -(b1 / 4) * s * ((s3 @ sy + sy @ s3) * np.cos(2 * psi)
                          - 0.25 * (sx @ sy + sy @ sx) * np.sin(2 * psi))
    # β₁² part: the angular prefactor is sin²(2ψ₀) and the S̃y constant is 59/24;
    # with those the order-α² off-diagonal terms cancel (see the residual tests)
    G2 = ((b1 / 4) * s) ** 2 * (
        0.75 * np.sin(2 * psi) ** 2 * (sx @ s3 @ sy + sy @ s3 @ sx)
        + np.sin(4 * psi) / 2 * (sy @ sy @ sy / 3 - 8 * s3 @ sy @ s3
                                 + (R / 2) * sy - (59 / 24) * sy))
    G2 = G2 - (b2 / 2) * s * (
        2 * np.cos(3 * psi) * s3 @ sy @ s3 + 0.5 * c * sy
        + 0.5 * s * c * c * (sy @ s3 @ sx + sx @ s3 @ sy)
        - np.sin(3 * psi) / 2 * (sy @ s3 @ sx + sx @ s3 @ sy)
        - c * s * s * sy @ ((2 / 3) * sy @ sy - 2 * R * I + (10 / 3) * I))
    return G0, G1, G2


def dressing_transform(sector: IrrepSector, delta, order=0):
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    if delta == 0.0 and sector.k_eff == 0.0:
        raise DegenerateError("Omega_R = 0")
    G0, G1, G2 = dressing_generators(sector, delta)
    u0 = exp_i_hermitian(G0)
    u1 = exp_i_hermitian(G1) if order >= 1 else None
    u2 = exp_i_hermitian(G2) if order >= 2 else None
    return DressingTransform(u0=u0, u1=u1, u2=u2, order=order)


def offdiagonal_residual(sector: IrrepSector, delta, order):
    """‖off-diagonal part of U H⁽²⁾ U†‖_F / |k| after the order-n dressing."""
    U = dressing_transform(sector, delta, order).total
    Hd = U @ truncated_hamiltonian(sector, delta) @ U.conj().T
    off = Hd - np.diag(np.diag(Hd))
    return float(np.linalg.norm(off) / abs(sector.k_eff))


def relative_error(exact, approx, splitting):
    """max |E - E⁽ⁿ⁾| / ΔE with both lists sorted ascending."""
    if not np.isfinite(splitting) or splitting == 0:
        return float("nan")
    e = np.sort(np.asarray(exact, dtype=float))
    a = np.sort(np.asarray(approx, dtype=float))
    return float(np.max(np.abs(e - a)) / abs(splitting))


@dataclass(frozen=True)
class ErrorStudy:
    M: np.ndarray
    errors: np.ndarray  # shape (len(M), 3): orders 0, 1, 2


def error_study(M_values, r, delta, k1, k2):
    """Relative error of each perturbative order against exact diagonalization."""
    Ms = np.asarray(list(M_values), dtype=int)
    out = np.empty((len(Ms), 3))
    for i, M in enumerate(Ms):
        sec = classify_sector(M, r, k1, k2)
        h = build_sector_hamiltonian(sec, 0.0, delta)
        spec = exact_spectrum(h)
        for order in (0, 1, 2):
            out[i, order] = relative_error(spec.exact, perturbative_energies(sec, delta, order),
                                           spec.mean_splitting)
    return ErrorStudy(M=Ms, errors=out)
