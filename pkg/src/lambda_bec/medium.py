"""Semiclassical response of a Λ-scheme condensate to a weak probe.

Rates and detunings are angular frequencies (rad/s).  SI conversions keep
ħ explicit: a field amplitude A maps onto the Rabi frequency μA/ħ, and the
susceptibilities carry the matching powers of ħ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import constants as sc
from scipy.optimize import brentq, minimize_scalar

from .errors import ConditioningError, DomainError, SingularityError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = sc.c
    epsilon0: float = sc.epsilon_0
    hbar: float = sc.hbar
    # energies inside the quantum model are angular frequencies
    hbar_convention: bool = field(default=True, init=False)

    def __post_init__(self):
        if not (self.c > 0 and self.epsilon0 > 0 and self.hbar > 0):
            raise DomainError("physical constants must be positive")


SI = PhysicalConstants()


@dataclass(frozen=True)
class MediumParams:
    """Atomic constants of the Λ-scheme.  Defaults describe sodium."""

    gamma31: float = TWO_PI * 5e6
    gamma32: float = TWO_PI * 5e6
    gamma12: float = TWO_PI * 38e3
    mu32: float = 22e-30
    mu31: float = 22e-30
    omega12: float = TWO_PI * 1772e6
    omega: float = TWO_PI * 5.1e14
    density: float = 3.3e18
    n_atoms: int = 1000
    volume: float | None = None

    def __post_init__(self):
        for name in ("gamma31", "gamma32", "gamma12", "mu32", "mu31",
                     "omega12", "omega", "density"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive, got {v}")
        if self.n_atoms < 1:
            raise DomainError(f"n_atoms must be >= 1, got {self.n_atoms}")
        if self.volume is not None and not self.volume > 0:
            raise DomainError(f"volume must be positive, got {self.volume}")

    @property
    def gamma_opt(self):
        return 0.5 * (self.gamma32 + self.gamma31)

    @property
    def gamma_mag(self):
        return self.gamma12

    @property
    def quantization_volume(self):
        if self.volume is not None:
            return self.volume
        return self.n_atoms / self.density


@dataclass(frozen=True)
class DriveParams:
    """Classical coupling field and probe settings.

    Exactly one of ``g1`` / ``coupling_intensity`` must be given.  The probe
    is optional: give at most one of ``probe_intensity`` / ``probe_amplitude``;
    with neither the probe enters only linearly (|A_p|² terms vanish).
    """

    g1: float | None = None
    coupling_intensity: float | None = None
    delta_p: float = 0.0
    delta_c: float = 0.0
    probe_intensity: float | None = None
    probe_amplitude: float | None = None

    def __post_init__(self):
        if (self.g1 is None) == (self.coupling_intensity is None):
            raise DomainError("give exactly one of g1 or coupling_intensity")
        if self.probe_intensity is not None and self.probe_amplitude is not None:
            raise DomainError("give at most one of probe_intensity or probe_amplitude")
        if self.coupling_intensity is not None and self.coupling_intensity < 0:
            raise DomainError("coupling_intensity must be >= 0")
        if self.probe_intensity is not None and self.probe_intensity < 0:
            raise DomainError("probe_intensity must be >= 0")

    def coupling_rabi(self, medium: MediumParams, constants: PhysicalConstants = SI):
        if self.g1 is not None:
            return self.g1
        return rabi_from_intensity(self.coupling_intensity, medium.mu31, constants)

    def probe_field(self, constants: PhysicalConstants = SI):
        """Probe amplitude A_p in V/m (0 when no probe is set)."""
        if self.probe_amplitude is not None:
            return abs(self.probe_amplitude)
        if self.probe_intensity is not None:
            return field_amplitude(self.probe_intensity, constants)
        return 0.0

    def with_detuning(self, delta_p):
        return replace(self, delta_p=float(delta_p))


@dataclass(frozen=True)
class SusceptibilityResult:
    chi1: complex
    chi3: complex  # m²/V²
    gamma_factor: complex


@dataclass(frozen=True)
class OpticalResponse:
    n_p0: float
    n_p2: float  # m²/V²
    eta_p0: float  # 1/m
    eta_p2: float  # m/V²
    n_g: float
    v_g: float | None  # None marks n_g ≈ 0 (group velocity undefined)
    probe_amplitude: float = 0.0

    @property
    def n_p(self):
        return self.n_p0 + self.n_p2 * self.probe_amplitude ** 2

    @property
    def eta_p(self):
        return self.eta_p0 + self.eta_p2 * self.probe_amplitude ** 2


@dataclass(frozen=True)
class CouplingConstants:
    k0: float | None
    k1: float
    k2: float
    L_l: complex | None = None
    L_nl: complex | None = None
    phase: float = 0.0
    k2_imag: float = 0.0  # dropped by the phase convention, kept for diagnostics

    @classmethod
    def from_ratios(cls, k1_over_omega, k2_over_omega, omega):
        """Override path: couplings quoted as fractions of the probe frequency."""
        k1 = k1_over_omega * omega
        if k1 < 0:
            raise DomainError("k1 must be >= 0")
        return cls(k0=None, k1=k1, k2=k2_over_omega * omega)


@dataclass(frozen=True)
class SteadyState:
    rho: np.ndarray

    @property
    def rho32(self):
        return self.rho[2, 1]


@dataclass(frozen=True)
class OracleFit:
    """Least-squares fit ρ̄₃₂(g₂) ≈ c₁g₂ + c₂g₂² + c₃g₂³ on a real g₂ grid."""

    rho1: complex
    rho2: complex
    rho3: complex
    g2: np.ndarray
    samples: np.ndarray


def field_amplitude(intensity, constants: PhysicalConstants = SI):
    if intensity < 0:
        raise DomainError(f"intensity must be >= 0, got {intensity}")
    return math.sqrt(2.0 * intensity / (constants.c * constants.epsilon0))


def rabi_from_intensity(intensity, dipole, constants: PhysicalConstants = SI):
    """Rabi frequency |μ|A/ħ (rad/s) of a field with the given intensity (W/m²)."""
    if not dipole > 0:
        raise DomainError(f"dipole must be positive, got {dipole}")
    return abs(dipole) * field_amplitude(intensity, constants) / constants.hbar


def gamma_factor(medium: MediumParams, drive: DriveParams, constants=SI):
    """Γ of the linear response.

    With a detuned coupling field the dark-state denominator picks up the
    two-photon detuning δ - Δ; for δ = 0 this is Δ - 2iγ_opt + |g₁|²/(iγ_mag - Δ).
    """
    g1 = drive.coupling_rabi(medium, constants)
    d = drive.delta_p
    return (d - 2j * medium.gamma_opt
            + abs(g1) ** 2 / (1j * medium.gamma_mag + drive.delta_c - d))


def rho32_coefficients(medium: MediumParams, drive: DriveParams, constants=SI):
    """Linear and cubic coefficients of ρ̄₃₂ in g₂, plus Γ."""
    G = gamma_factor(medium, drive, constants)
    if abs(G) < 1e-6 * medium.gamma_opt:
        raise SingularityError(f"|Gamma| vanishes at delta = {drive.delta_p}",
                               delta=drive.delta_p)
    absG2 = abs(G) ** 2
    rate = 1.0 / (2.0 * medium.gamma_opt) + 1.0 / medium.gamma_mag
    rho1 = 1.0 / G
    rho3 = (1j / G) * (G.conjugate() - G) / (2.0 * absG2) * rate
    return rho1, rho3, G


def liouville_rhs(rho, medium: MediumParams, drive: DriveParams, g2, constants=SI):
    """Time derivative of the phase-averaged density matrix (levels 1, 2, 3)."""
    g1 = drive.coupling_rabi(medium, constants)
    D, d = drive.delta_p, drive.delta_c
    g12, g31, g32 = medium.gamma12, medium.gamma31, medium.gamma32

    def lower(r):
        R = lambda i, j: r[i - 1, j - 1]
        c = np.conj
        out = np.zeros((3, 3), dtype=complex)
        out[0, 0] = (-1j * g1 * R(1, 3) + 1j * c(g1) * R(3, 1)
                     - 2 * g12 * R(1, 1) + 2 * g31 * R(3, 3))
        out[1, 1] = (-1j * g2 * R(2, 3) + 1j * c(g2) * R(3, 2)
                     + 2 * g12 * R(1, 1) + 2 * g32 * R(3, 3))
        out[2, 2] = (1j * g1 * R(1, 3) - 1j * c(g1) * R(3, 1)
                     + 1j * g2 * R(2, 3) - 1j * c(g2) * R(3, 2)
                     - 2 * (g32 + g31) * R(3, 3))
        out[1, 0] = (-1j * (d - D) * R(2, 1) - 1j * g1 * R(2, 3)
                     + 1j * c(g2) * R(3, 1) - g12 * R(2, 1))
        out[2, 0] = (-1j * d * R(3, 1) + 1j * g1 * (R(1, 1) - R(3, 3))
                     + 1j * g2 * R(2, 1) - (g12 + g32 + g31) * R(3, 1))
        out[2, 1] = (-1j * D * R(3, 2) + 1j * g2 * (R(2, 2) - R(3, 3))
                     + 1j * g1 * R(1, 2) - (g32 + g31) * R(3, 2))
        return out

    rho = np.asarray(rho, dtype=complex)
    out = lower(rho)
    # upper triangle from d/dt ρ_ij = conj(d/dt ρ_ji), kept complex-linear in ρ
    up = np.conj(lower(rho.conj().T)).T
    for i, j in ((0, 1), (0, 2), (1, 2)):
        out[i, j] = up[i, j]
    return out


def _liouvillian(medium, drive, g2, constants):
    A = np.zeros((9, 9), dtype=complex)
    for a in range(9):
        e = np.zeros(9, dtype=complex)
        e[a] = 1.0
        A[:, a] = liouville_rhs(e.reshape(3, 3), medium, drive, g2, constants).reshape(9)
    return A


def steady_state_oracle(medium: MediumParams, drive: DriveParams, g2, constants=SI):
    """Stationary ρ̄ from the full averaged Liouville system (no perturbation theory)."""
    A = _liouvillian(medium, drive, g2, constants)
    b = np.zeros(9, dtype=complex)
    # the ρ11 equation is redundant with the others; replace it by tr ρ = 1
    A[0] = np.eye(3).reshape(9)
    b[0] = 1.0
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e14:
        raise ConditioningError(f"steady-state system singular (cond = {cond:.3e})",
                                condition=cond)
    rho = np.linalg.solve(A, b).reshape(3, 3)
    return SteadyState(rho=rho)


def fit_oracle_expansion(medium: MediumParams, drive: DriveParams, points=8,
                         span=(1e-3, 1e-2), constants=SI):
    """Fit the oracle's ρ̄₃₂ on a geometric g₂ grid (in units of γ_opt)."""
    g2 = medium.gamma_opt * np.geomspace(span[0], span[1], points)
    y = np.array([steady_state_oracle(medium, drive, g, constants).rho32 for g in g2])
    # scale columns so the least-squares problem is well conditioned
    s = g2[-1]
    X = np.stack([g2 / s, (g2 / s) ** 2, (g2 / s) ** 3], axis=1)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return OracleFit(rho1=coef[0] / s, rho2=coef[1] / s ** 2, rho3=coef[2] / s ** 3,
                     g2=g2, samples=y)


def susceptibilities(medium: MediumParams, drive: DriveParams, constants=SI):
    rho1, rho3, G = rho32_coefficients(medium, drive, constants)
    mu, hb, eps0 = medium.mu32, constants.hbar, constants.epsilon0
    chi1 = medium.density * mu ** 2 * rho1 / (eps0 * hb)
    # P = (N/V) μ ρ̄₃₂ with g₂ = μA/ħ, and ε_p carries (3/4)χ⁽³⁾|A|²
    chi3 = (4.0 / 3.0) * medium.density * mu ** 4 * rho3 / (eps0 * hb ** 3)
    return SusceptibilityResult(chi1=complex(chi1), chi3=complex(chi3), gamma_factor=G)


def _index_parts(medium, drive, constants):
    s = susceptibilities(medium, drive, constants)
    omega_p = medium.omega - drive.delta_p
    n0 = 1.0 + 0.5 * s.chi1.real
    n2 = 0.375 * s.chi3.real
    eta0 = omega_p / constants.c * s.chi1.imag
    eta2 = 0.75 * omega_p / constants.c * s.chi3.imag
    return n0, n2, eta0, eta2


def _refractive_index(medium, drive, constants):
    n0, n2, _, _ = _index_parts(medium, drive, constants)
    return n0 + n2 * drive.probe_field(constants) ** 2


def optical_response(medium: MediumParams, drive: DriveParams, constants=SI,
                     step=TWO_PI * 10e3, vg_tol=1e-6):
    """Refraction, absorption and group index at the drive's detuning.

    dn_p/dω_p is a central difference in the probe frequency; since
    ω_p = ω - Δ a step +h in ω_p is a step -h in Δ.
    """
    n0, n2, eta0, eta2 = _index_parts(medium, drive, constants)
    A = drive.probe_field(constants)
    n_p = n0 + n2 * A ** 2
    omega_p = medium.omega - drive.delta_p
    n_hi = _refractive_index(medium, drive.with_detuning(drive.delta_p - step), constants)
    n_lo = _refractive_index(medium, drive.with_detuning(drive.delta_p + step), constants)
    dn = (n_hi - n_lo) / (2.0 * step)
    n_g = n_p + omega_p * dn
    v_g = constants.c / n_g if abs(n_g) > vg_tol else None
    return OpticalResponse(n_p0=n0, n_p2=n2, eta_p0=eta0, eta_p2=eta2,
                           n_g=n_g, v_g=v_g, probe_amplitude=A)


def total_absorption(medium, drive, constants=SI):
    n0, n2, eta0, eta2 = _index_parts(medium, drive, constants)
    return eta0 + eta2 * drive.probe_field(constants) ** 2


def find_transparency_points(medium: MediumParams, drive: DriveParams, delta_range,
                             grid_points=2001, constants=SI):
    """Detunings where the total absorption η_p changes sign, ascending."""
    if grid_points < 2:
        raise DomainError("grid_points must be >= 2")
    lo, hi = delta_range
    grid = np.linspace(lo, hi, int(grid_points))

    def eta(d):
        return total_absorption(medium, drive.with_detuning(d), constants)

    vals = np.array([eta(d) for d in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(grid[i])
        elif a * b < 0:
            roots.append(brentq(eta, grid[i], grid[i + 1], xtol=1e-9))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    return sorted(roots)


def absorption_minimum(medium: MediumParams, drive: DriveParams, window, constants=SI):
    """Detuning of smallest linear absorption inside ``window`` (the EIT point)."""
    lo, hi = window

    def eta0(d):
        return _index_parts(medium, drive.with_detuning(d), constants)[2]

    res = minimize_scalar(eta0, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6 * (hi - lo)})
    return float(res.x), float(res.fun)


def coupling_constants(medium: MediumParams, drive: DriveParams, constants=SI):
    """Effective linear and Kerr couplings of the probe photon to the atoms."""
    rho1, rho3, _ = rho32_coefficients(medium, drive, constants)
    bare = replace(drive, g1=0.0, coupling_intensity=None)
    rho1_bare, _, _ = rho32_coefficients(medium, bare, constants)
    if abs(rho1_bare) == 0.0:
        raise SingularityError("bare linear response vanishes", delta=drive.delta_p)
    V = medium.quantization_volume
    k0 = medium.mu32 * math.sqrt(medium.omega / (2.0 * constants.hbar * constants.epsilon0 * V))
    L_l = rho1 / rho1_bare
    L_nl = rho3 / rho1_bare
    phase = float(np.angle(L_l))
    k2c = k0 ** 3 * np.exp(-1j * phase) * L_nl
    return CouplingConstants(k0=k0, k1=k0 * abs(L_l), k2=float(k2c.real),
                             L_l=complex(L_l), L_nl=complex(L_nl), phase=phase,
                             k2_imag=float(k2c.imag))
