"""Fifth-order polynomial algebra of excitations and its su(2) realizations.

A sector is fixed by the excitation number M = a†a + S₃ + r and the Dicke
index r.  Matrices in a sector are indexed by m̃ ascending from -r̃; in the
physical basis this is S₃ = m ascending, so the all-atoms-down state with
n = M photons (nearby zone) is index 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateError, DomainError, InvalidSectorError, UnsupportedZoneError

REMOTE, NEARBY, BOUNDARY = "remote", "nearby", "boundary"


def _half_integer(x, name):
    two = 2.0 * x
    if not np.isfinite(two) or abs(two - round(two)) > 1e-9 or two < 0:
        raise DomainError(f"{name} must be a nonnegative half-integer, got {x}")
    return round(two) / 2.0


def zone_of(M, r):
    if M > 2 * r:
        return REMOTE
    if M < 2 * r:
        return NEARBY
    return BOUNDARY


@dataclass(frozen=True)
class IrrepSector:
    M: int
    r: float
    zone: str
    r_tilde: float
    dim: int
    alpha: float
    gamma: float
    k_eff: float
    beta1: float
    beta2: float
    valid: bool
    k1: float
    k2: float
    delta: float | None = None

    @property
    def kappa(self):
        return self.k2 / self.k1

    @property
    def psi0(self):
        if self.delta is None:
            return None
        return math.atan2(self.k_eff, self.delta)

    @property
    def omega_R(self):
        if self.delta is None:
            return None
        return math.hypot(self.delta, self.k_eff)

    @property
    def m_tilde(self):
        return -self.r_tilde + np.arange(self.dim)

    def with_detuning(self, delta):
        if delta == 0.0 and self.k_eff == 0.0:
            raise DegenerateError("Omega_R = 0: delta and k_eff both vanish")
        return replace(self, delta=float(delta))


def classify_sector(M, r, k1, k2=0.0, n_atoms=None, delta=None):
    """Zone, effective spin and expansion parameters of the (M, r) block."""
    if M < 0 or int(M) != M:
        raise DomainError(f"M must be a nonnegative integer, got {M}")
    M = int(M)
    r = _half_integer(r, "r")
    if n_atoms is not None:
        lo = 0.5 if n_atoms % 2 else 0.0
        if r < lo or r > n_atoms / 2 or (r - n_atoms / 2) % 1:
            raise DomainError(f"r = {r} not allowed for {n_atoms} atoms")
    if not k1 > 0:
        raise DomainError(f"k1 must be positive, got {k1}")
    zone = zone_of(M, r)
    if zone == BOUNDARY:
        raise UnsupportedZoneError(f"boundary zone M = 2r = {M} has no realization")
    kappa = k2 / k1
    if zone == REMOTE:
        r_tilde = r
        alpha = 1.0 / (M - r + 0.5)
        gamma = 1.0 + kappa * (M - r + 0.5)
    else:
        r_tilde = M / 2.0
        alpha = 2.0 / (4.0 * r - M + 1.0)
        gamma = 1.0 + kappa * (M + 1) / 2.0
    valid = k2 == 0.0 or M + 1 < abs(k1 / k2)
    k_eff = k1 * gamma * 2.0 / math.sqrt(alpha)
    if gamma != 0.0:
        beta1 = alpha * (1.0 + kappa * 2.0 / (gamma * alpha))
        beta2 = alpha ** 2 * (0.125 - kappa / (2.0 * gamma * alpha))
    else:
        beta1 = beta2 = math.inf
    sec = IrrepSector(M=M, r=r, zone=zone, r_tilde=r_tilde, dim=int(round(2 * r_tilde)) + 1,
                      alpha=alpha, gamma=gamma, k_eff=k_eff, beta1=beta1, beta2=beta2,
                      valid=valid, k1=k1, k2=k2)
    return sec.with_detuning(delta) if delta is not None else sec


def require_valid(sector: IrrepSector):
    if not sector.valid:
        raise InvalidSectorError(
            f"sector M = {sector.M} violates M + 1 < |k1/k2| = {abs(sector.k1 / sector.k2):.6g}")


@dataclass(frozen=True)
class StructurePolynomial:
    """p₅(x) = -(x - q1)(1 + κ(x - q1))²(x - q2)(x - q3), with κ = k₂/k₁."""

    M: int
    r: float
    kappa: float

    @property
    def c0(self):
        return -self.kappa ** 2

    @property
    def q0(self):
        if self.kappa == 0.0:
            return math.inf
        return -(1.0 / self.kappa + (self.M - self.r) / 2.0)

    @property
    def q1(self):
        return -(self.M - self.r) / 2.0

    @property
    def q2(self):
        return (self.M - self.r) / 2.0 - self.r

    @property
    def q3(self):
        return (self.M - self.r) / 2.0 + self.r + 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        q1 = self.q1
        return -(x - q1) * (1.0 + self.kappa * (x - q1)) ** 2 * (x - self.q2) * (x - self.q3)

    def physical_interval(self):
        if self.M > 2 * self.r:
            return self.q2, self.q3
        return self.q1, self.q3


def structure_polynomial(M, r, k1, k2):
    return StructurePolynomial(M=int(M), r=float(r), kappa=k2 / k1)


@dataclass(frozen=True)
class SpinMatrices:
    r_tilde: float
    s3: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray

    @property
    def sx(self):
        return 0.5 * (self.s_plus + self.s_minus)

    @property
    def sy(self):
        return (self.s_plus - self.s_minus) / 2j

    @property
    def m(self):
        return np.real(np.diag(self.s3))


def spin_matrices(r_tilde):
    """Spin-r̃ matrices in the |m⟩ basis, m = -r̃ … r̃."""
    rt = _half_integer(r_tilde, "r_tilde")
    dim = int(round(2 * rt)) + 1
    m = -rt + np.arange(dim)
    sp = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim - 1)
    sp[idx + 1, idx] = np.sqrt(rt * (rt + 1) - m[:-1] * (m[:-1] + 1))
    return SpinMatrices(r_tilde=rt, s3=np.diag(m).astype(complex), s_plus=sp,
                        s_minus=sp.conj().T)


@dataclass(frozen=True)
class PaeGenerators:
    m0: np.ndarray
    m_plus: np.ndarray
    m_minus: np.ndarray


def pae_generators(sector: IrrepSector, k1=None, k2=None):
    """M₀, M± realized on the sector through the effective spin r̃."""
    if sector.zone == BOUNDARY:
        raise UnsupportedZoneError("boundary zone has no realization")
    require_valid(sector)
    k1 = sector.k1 if k1 is None else k1
    k2 = sector.k2 if k2 is None else k2
    kappa = k2 / k1
    S = spin_matrices(sector.r_tilde)
    mt = S.m
    M, r = sector.M, sector.r
    if sector.zone == REMOTE:
        arg = M - r + 1 - mt
        m0 = (M - r) / 2.0 - mt
    else:
        arg = (4 * r - M) / 2.0 + 1 - mt
        m0 = r / 2.0 - mt
        # photons on the shifted level: the nonlinear factor uses n = M/2 + 1 - m̃
        arg_nl = M / 2.0 + 1 - mt
    if np.any(arg < -1e-12):
        raise AssertionError(f"negative square-root argument in {sector.zone} zone")
    shift = arg if sector.zone == REMOTE else arg_nl
    f = np.sqrt(np.clip(arg, 0.0, None)) * (1.0 + kappa * shift)
    m_plus = S.s_minus @ np.diag(f).astype(complex)
    return PaeGenerators(m0=np.diag(m0).astype(complex), m_plus=m_plus,
                         m_minus=m_plus.conj().T)
