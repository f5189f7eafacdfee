"""Photon statistics of a coherent probe interacting with the condensate.

a†a commutes with the excitation number M, so every sector evolves on its
own and the moments are Poisson-weighted sums over sectors.  Inside a
sector the state is propagated in a basis V with energies E:
ψ(t) = V e^{-iEt} V†ψ(0).  For the perturbative path V = U₀† and E are the
order-n energies; for the exact path V, E come from diagonalization.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

from .errors import (DomainError, InvalidSectorError, MissingSectorError, TruncationError,
                     UnsupportedStateError)
from .pae import classify_sector
from .spectral import (block_hamiltonian, dressing_transform, exact_spectrum,
                       perturbative_energies, sector_hamiltonian)

UNDEFINED_Q_BELOW = 1e-12


@dataclass(frozen=True)
class QuantumState:
    sectors: dict  # M -> amplitudes over the sector basis (m ascending)
    n0: float
    m_cutoff: int
    r: float
    n_atoms: int
    truncated_mass: float = 0.0
    warning: str | None = None

    @property
    def weights(self):
        return {M: float(np.vdot(a, a).real) for M, a in self.sectors.items()}

    def norm(self):
        return math.fsum(self.weights[M] for M in sorted(self.sectors))


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray  # s
    n_mean: np.ndarray
    n2_mean: np.ndarray

    @property
    def q(self):
        return mandel_q(self.n_mean, self.n2_mean)

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class Timescales:
    t_rabi: float
    t_col_small_k2: float
    t_col_large_k2: float | None  # None when k₂ = 0
    t_revival: float  # inf when neighbouring Rabi frequencies coincide
    applicable: str  # which collapse estimate is the smaller one

    @property
    def t_collapse(self):
        vals = [t for t in (self.t_col_small_k2, self.t_col_large_k2)
                if t is not None and not math.isnan(t)]
        return min(vals) if vals else float("nan")


def mandel_q(n_mean, n2_mean):
    """Q = (⟨n²⟩ - ⟨n⟩²)/⟨n⟩ - 1; NaN where ⟨n⟩ ≤ 1e-12."""
    n = np.asarray(n_mean, dtype=float)
    n2 = np.asarray(n2_mean, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(n > UNDEFINED_Q_BELOW, (n2 - n * n) / np.where(n > 0, n, 1.0) - 1.0,
                     np.nan)
    return float(q) if q.ndim == 0 else q


def default_cutoff(n0, k1=None, k2=None, cap=60):
    cut = min(cap, int(math.ceil(n0 + 10.0 * math.sqrt(n0))))
    if k1 is not None and k2:
        cut = min(cut, int(math.floor(abs(k1 / k2))) - 2)
    return max(cut, 0)


def initial_state(n0, n_atoms, m_cutoff=None, k1=None, k2=None,
                  warn_mass=1e-3, max_mass=0.05):
    """Coherent probe with mean n0 times all atoms in the lower level.

    Sector M holds amplitude √P(M) on its n = M, m = -𝒩/2 state; the Poisson
    tail above ``m_cutoff`` is dropped and the rest renormalized.
    """
    if not n0 > 0:
        raise DomainError(f"n0 must be positive, got {n0}")
    if m_cutoff is None:
        m_cutoff = default_cutoff(n0, k1, k2)
    m_cutoff = int(m_cutoff)
    if m_cutoff < 0:
        raise DomainError("m_cutoff must be >= 0")
    if k1 is not None and k2 and m_cutoff + 1 >= abs(k1 / k2):
        raise InvalidSectorError(
            f"m_cutoff = {m_cutoff} violates M + 1 < |k1/k2| = {abs(k1 / k2):.6g}")
    r = n_atoms / 2.0
    Ms = np.arange(m_cutoff + 1)
    p = poisson.pmf(Ms, n0)
    tail = float(poisson.sf(m_cutoff, n0))
    if tail > max_mass:
        raise TruncationError(f"cutoff {m_cutoff} drops Poisson mass {tail:.3g} > {max_mass}")
    note = None
    if tail > warn_mass:
        note = f"cutoff {m_cutoff} drops Poisson mass {tail:.3g}"
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    p = p / math.fsum(p)
    sectors = {}
    for M in Ms:
        dim = int(min(round(2 * r), M)) + 1
        a = np.zeros(dim, dtype=complex)
        a[0] = math.sqrt(p[M])
        sectors[int(M)] = a
    return QuantumState(sectors=sectors, n0=float(n0), m_cutoff=m_cutoff, r=r,
                        n_atoms=int(n_atoms), truncated_mass=tail, warning=note)


@dataclass(frozen=True)
class SectorPropagator:
    M: int
    energies: np.ndarray
    basis: np.ndarray  # columns are the propagation eigenbasis in bare coordinates
    photons: np.ndarray  # a†a on the bare basis (diagonal)


def sector_propagator(M, r, delta, k1, k2, order):
    """Energies and basis for one sector; ``order`` is 0, 1, 2 or 'exact'."""
    if order == "exact":
        h = sector_hamiltonian(M, r, delta, k1, k2)
        spec = exact_spectrum(h)
        return SectorPropagator(M=M, energies=spec.exact, basis=spec.eigenvectors,
                                photons=h.n.astype(float))
    _, _, _, n = block_hamiltonian(M, r, delta, k1, k2)
    sec = classify_sector(M, r, k1, k2)
    E = perturbative_energies(sec, delta, order)
    u0 = dressing_transform(sec, delta, 0).u0
    return SectorPropagator(M=M, energies=E, basis=u0.conj().T, photons=n.astype(float))


def propagators(state: QuantumState, delta, k1, k2, order):
    return {M: sector_propagator(M, state.r, delta, k1, k2, order) for M in sorted(state.sectors)}


def evolve_expectations(state: QuantumState, times, delta=None, k1=None, k2=None, order=2,
                        sectors=None):
    """⟨a†a⟩(t) and ⟨(a†a)²⟩(t).

    Either pass (delta, k1, k2) or a prebuilt ``sectors`` mapping from
    :func:`propagators`.
    """
    times = np.asarray(times, dtype=float)
    if sectors is None:
        sectors = propagators(state, delta, k1, k2, order)
    missing = set(state.sectors) - set(sectors)
    if missing:
        raise MissingSectorError(missing)
    n1 = np.zeros_like(times)
    n2 = np.zeros_like(times)
    for M in sorted(state.sectors):
        psi0 = state.sectors[M]
        if not np.any(psi0):
            continue
        P = sectors[M]
        c = P.basis.conj().T @ psi0
        amp = P.basis @ (c[:, None] * np.exp(-1j * np.outer(P.energies, times)))
        prob = np.abs(amp) ** 2
        n1 += P.photons @ prob
        n2 += (P.photons ** 2) @ prob
    return TimeSeries(times=times, n_mean=n1, n2_mean=n2)


def energy_expectation(state: QuantumState, times, delta, k1, k2):
    """⟨H⟩(t) under exact evolution, free-field energies excluded."""
    times = np.asarray(times, dtype=float)
    out = np.zeros_like(times)
    for M in sorted(state.sectors):
        P = sector_propagator(M, state.r, delta, k1, k2, "exact")
        H, *_ = block_hamiltonian(M, state.r, delta, k1, k2)
        c = P.basis.conj().T @ state.sectors[M]
        amp = P.basis @ (c[:, None] * np.exp(-1j * np.outer(P.energies, times)))
        out += np.real(np.einsum("it,ij,jt->t", amp.conj(), H, amp))
    return out


def _check_unexcited(state: QuantumState):
    for M, a in state.sectors.items():
        if np.any(np.abs(a[1:]) > 1e-12):
            raise UnsupportedStateError(f"sector M = {M} has excited-atom components")
        if M >= 2 * state.r and abs(a[0]) > 0:
            raise UnsupportedStateError(f"sector M = {M} is not a nearby zone")


def zero_order_expectations(state: QuantumState, times, delta, k1, k2):
    """Closed-form zero-order moments for an unexcited-atom input.

    Each sector starts in S̃₃ = -r̃ (r̃ = M/2) and precesses at Ω_R(M) about
    an axis tilted by ψ₀(M).  With u = cos²ψ₀ + sin²ψ₀ cos Ω_R t,
    ⟨S̃₃⟩ = m̃₀u and ⟨S̃₃²⟩ = u²m̃₀² + (1 - u²)(r̃(r̃+1) - m̃₀²)/2, and a†a = M - r̃ - S̃₃.
    """
    _check_unexcited(state)
    times = np.asarray(times, dtype=float)
    n1 = np.zeros_like(times)
    n2 = np.zeros_like(times)
    w = state.weights
    for M in sorted(state.sectors):
        if M == 0 or w[M] == 0.0:
            continue
        sec = classify_sector(M, state.r, k1, k2, delta=delta)
        s, c = math.sin(sec.psi0), math.cos(sec.psi0)
        u = c * c + s * s * np.cos(sec.omega_R * times)
        rt = sec.r_tilde
        m0 = -rt
        base = M - rt
        n1 += w[M] * (base - m0 * u)
        n2 += w[M] * (base ** 2 - 2 * base * m0 * u + u * u * m0 * m0
                      + (1 - u * u) * (rt * (rt + 1) - m0 * m0) / 2)
    return TimeSeries(times=times, n_mean=n1, n2_mean=n2)


def k_n(n, k1, k2, r):
    """Rabi coupling of the n-photon, unexcited-atom sector."""
    n = np.asarray(n, dtype=float)
    return (k1 + k2 * (n + 1) / 2) * np.sqrt(2 * (4 * r - n + 1))


def _direct_sum_terms(n0, delta, k1, k2, r, n_max):
    if n_max is None:
        n_max = int(math.ceil(n0 + 12 * math.sqrt(n0) + 10))
    n_max = int(min(n_max, 4 * r))
    n = np.arange(n_max + 1)
    P = poisson.pmf(n, n0)
    K = k_n(n, k1, k2, r)
    Om = np.hypot(K, delta)
    return n, P, K, Om


def poisson_direct_sum(n0, times, delta, k1, k2, r, n_max=None):
    """n̄(t) = Σ P(n) n (k_n² + 2Δ² + k_n² cos Ω_n t) / (2Ω_n²)."""
    times = np.asarray(times, dtype=float)
    n, P, K, Om = _direct_sum_terms(n0, delta, k1, k2, r, n_max)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(Om > 0, n * P / (2 * Om ** 2), 0.0)
    const = math.fsum(a * (K ** 2 + 2 * delta ** 2))
    return const + (a * K ** 2) @ np.cos(np.outer(Om, times))


def oscillation_envelope(n0, times, delta, k1, k2, r, n_max=None):
    """Normalized envelope |Σ a_n e^{iΩ_n t}| of the oscillating part of n̄(t)."""
    times = np.asarray(times, dtype=float)
    n, P, K, Om = _direct_sum_terms(n0, delta, k1, k2, r, n_max)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(Om > 0, n * P * K ** 2 / (2 * Om ** 2), 0.0)
    env = np.zeros_like(times)
    # chunk over time to bound memory on long windows
    for s in range(0, len(times), 8192):
        t = times[s:s + 8192]
        env[s:s + 8192] = np.abs(a @ np.exp(1j * np.outer(Om - Om[0], t)))
    return env / math.fsum(a)


def collapse_time(times, envelope, threshold):
    """First time the envelope drops below ``threshold`` (NaN if never)."""
    idx = np.flatnonzero(np.asarray(envelope) < threshold)
    return float(times[idx[0]]) if idx.size else float("nan")


def revival_time(times, envelope, after):
    """Time and height of the largest envelope value after time ``after``."""
    times = np.asarray(times)
    mask = times > after
    if not np.any(mask):
        return float("nan"), float("nan")
    i = np.argmax(np.where(mask, envelope, -np.inf))
    return float(times[i]), float(envelope[i])


def timescales(n0, r, m0, k1, k2, delta, full=False):
    """Rabi period, collapse and revival times from the sector frequencies.

    ``full`` adds the next-order corrections to both collapse estimates; a
    negative radicand there yields NaN.
    """
    if not (n0 > 0 and r > 0):
        raise DomainError("n0 and r must be positive")
    Om0 = math.hypot(float(k_n(n0, k1, k2, r)), delta)
    Om1 = math.hypot(float(k_n(n0 + 1, k1, k2, r)), delta)
    t_rabi = 2 * math.pi / Om0
    t_rev = math.inf if Om1 == Om0 else abs(2 * math.pi / (Om1 - Om0))
    sq = math.sqrt(n0)
    rad1 = (4 * (3 * r - m0 + 1) * k1 ** 2 + delta ** 2) / (k1 ** 4 * sq)
    if full:
        rad1 += 4 * k2 * (k1 ** 2 * (8 * r - n0 + 1) * (4 * r + 1)
                          - (2 * r - n0) * delta ** 2) / (k1 ** 5 * sq)
    t_col1 = math.sqrt(rad1) if rad1 >= 0 else float("nan")
    if k2 == 0:
        t_col2 = None
    else:
        t_col2 = 1.0 / (abs(k2) * math.sqrt(sq * r))
        if full:
            D2 = delta ** 2
            num = (8 * k1 ** 4 + 6 * k1 ** 2 * k2 ** 2 * (2 * n0 + 1)
                   + 4 * k1 ** 3 * k2 * (2 * n0 + 3)
                   + k1 * k2 ** 3 * (D2 / k2 ** 2 + 6 * n0 + 1)
                   + k2 ** 4 * (n0 - D2 / k2 ** 2 * (n0 - 0.5)))
            fac = 1 + num / (2 * r * k2 * (2 * k1 + k2) ** 3)
            t_col2 = t_col2 * math.sqrt(fac) if fac >= 0 else float("nan")
    if t_col2 is None or math.isnan(t_col2):
        applicable = "small_k2"
    elif math.isnan(t_col1) or t_col2 < t_col1:
        applicable = "large_k2"
    else:
        applicable = "small_k2"
    return Timescales(t_rabi=t_rabi, t_col_small_k2=t_col1, t_col_large_k2=t_col2,
                      t_revival=t_rev, applicable=applicable)
