"""Flat ``key = value`` run configuration with unit-suffixed keys.

Frequencies are entered either as f/2π in Hz (``*_over_2pi_hz``) or as a
fraction of the optical frequency ω (``*_over_omega``) and converted to
rad/s only when the model objects are built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .medium import TWO_PI, CouplingConstants, DriveParams, MediumParams, coupling_constants

SCENARIOS = ("fig2", "fig3", "fig4", "fig5", "fig6", "table1",
             "susceptibility", "spectrum", "dynamics", "timescales")

ORDERS = ("0", "1", "2", "exact")


def _positive(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _any(v):
    return True


# key -> (type, default, check, description)
SCHEMA = {
    "medium.gamma_31_over_2pi_hz": (float, 5e6, _positive, "decay 3→1"),
    "medium.gamma_32_over_2pi_hz": (float, 5e6, _positive, "decay 3→2"),
    "medium.gamma_12_over_2pi_hz": (float, 38e3, _positive, "decay 1→2"),
    "medium.mu_32_c_m": (float, 22e-30, _positive, "dipole 3-2"),
    "medium.mu_31_c_m": (float, 22e-30, _positive, "dipole 3-1"),
    "medium.omega_12_over_2pi_hz": (float, 1772e6, _positive, "hyperfine splitting"),
    "medium.omega_over_2pi_hz": (float, 5.1e14, _positive, "optical transition"),
    "medium.density_per_cm3": (float, 3.3e12, _positive, "atom density"),
    "medium.n_atoms": (int, 1000, lambda v: v >= 1, "atoms in the quantum model"),
    "medium.volume_m3": (float, None, _positive, "quantization volume"),
    "drive.g1_over_2pi_hz": (float, None, _nonneg, "coupling Rabi frequency"),
    "drive.coupling_intensity_mw_per_cm2": (float, 55.0, _nonneg, "coupling intensity"),
    "drive.delta_over_2pi_hz": (float, 0.0, _any, "probe detuning"),
    "drive.delta_c_over_2pi_hz": (float, 0.0, _any, "coupling detuning"),
    "drive.probe_intensity_uw_per_cm2": (float, None, _nonneg, "probe intensity"),
    "drive.probe_amplitude_v_per_m": (float, None, _nonneg, "probe amplitude"),
    "drive.sweep_min_over_2pi_hz": (float, -2e6, _any, "sweep start"),
    "drive.sweep_max_over_2pi_hz": (float, 2e6, _any, "sweep stop"),
    "drive.sweep_points": (int, 401, lambda v: v >= 2, "sweep grid size"),
    "quantum.couplings": (str, "override", lambda v: v in ("override", "derive"),
                          "override: use k ratios; derive: from the medium"),
    "quantum.k1_over_omega": (float, 3.04e-7, _positive, "linear coupling"),
    "quantum.k2_over_omega": (float, -3.01e-9, _any, "Kerr coupling"),
    "quantum.delta_over_omega": (float, 2.4e-8, _any, "probe detuning"),
    "quantum.n0": (float, 25.0, _positive, "mean photon number"),
    "quantum.order": (str, "2", lambda v: v in ORDERS, "0, 1, 2 or exact"),
    "quantum.m_cutoff": (int, None, _nonneg, "largest excitation number kept"),
    "quantum.m_sector": (int, 25, _nonneg, "sector for the spectrum scenario"),
    "quantum.m_min": (int, 2, _nonneg, "first M of the error study"),
    "quantum.m_max": (int, 60, _nonneg, "last M of the error study"),
    "quantum.t_start_ns": (float, 0.0, _nonneg, "first sample"),
    "quantum.t_stop_ns": (float, 1.0, _positive, "last sample"),
    "quantum.samples": (int, 4096, lambda v: v >= 1, "time samples"),
    "output.directory": (str, None, _any, "output directory"),
    "output.prefix": (str, "", _any, "file name prefix"),
}

EXCLUSIVE = (
    ("drive.g1_over_2pi_hz", "drive.coupling_intensity_mw_per_cm2"),
    ("drive.probe_intensity_uw_per_cm2", "drive.probe_amplitude_v_per_m"),
)

UNIT_SUFFIXES = ("_over_2pi_hz", "_over_omega", "_c_m", "_per_cm3", "_m3",
                 "_mw_per_cm2", "_uw_per_cm2", "_v_per_m", "_ns")

_FIG6_WINDOW = {"quantum.t_stop_ns": 200.0, "quantum.samples": 40001}

_WIDE_SWEEP = {"drive.probe_intensity_uw_per_cm2": 80.0,
               "drive.sweep_min_over_2pi_hz": -40e6, "drive.sweep_max_over_2pi_hz": 40e6,
               "drive.sweep_points": 801}

PRESETS = {
    "fig2": _WIDE_SWEEP,
    "fig3": {"drive.probe_intensity_uw_per_cm2": 80.0},
    "fig4": {},
    "fig5": {"quantum.t_stop_ns": 1.0, "quantum.samples": 4001},
    "fig6": _FIG6_WINDOW,
    "table1": {},
    "susceptibility": _WIDE_SWEEP,
    "spectrum": {},
    "dynamics": {},
    "timescales": {},
}


@dataclass
class RunConfig:
    scenario: str
    values: dict
    provenance: dict = field(default_factory=dict)  # key -> default | preset | user

    def __getitem__(self, key):
        return self.values[key]

    def user_keys(self):
        return sorted(k for k, p in self.provenance.items() if p == "user")

    # model objects ---------------------------------------------------------

    def medium(self):
        v = self.values
        vol = v["medium.volume_m3"]
        return MediumParams(
            gamma31=TWO_PI * v["medium.gamma_31_over_2pi_hz"],
            gamma32=TWO_PI * v["medium.gamma_32_over_2pi_hz"],
            gamma12=TWO_PI * v["medium.gamma_12_over_2pi_hz"],
            mu32=v["medium.mu_32_c_m"], mu31=v["medium.mu_31_c_m"],
            omega12=TWO_PI * v["medium.omega_12_over_2pi_hz"],
            omega=TWO_PI * v["medium.omega_over_2pi_hz"],
            density=v["medium.density_per_cm3"] * 1e6,
            n_atoms=v["medium.n_atoms"], volume=vol)

    def drive(self):
        v = self.values
        g1 = v["drive.g1_over_2pi_hz"]
        ic = v["drive.coupling_intensity_mw_per_cm2"]
        ip = v["drive.probe_intensity_uw_per_cm2"]
        return DriveParams(
            g1=None if g1 is None else TWO_PI * g1,
            coupling_intensity=None if ic is None else ic * 10.0,  # mW/cm² -> W/m²
            delta_p=TWO_PI * v["drive.delta_over_2pi_hz"],
            delta_c=TWO_PI * v["drive.delta_c_over_2pi_hz"],
            probe_intensity=None if ip is None else ip * 1e-2,  # μW/cm² -> W/m²
            probe_amplitude=v["drive.probe_amplitude_v_per_m"])

    def sweep(self):
        v = self.values
        return (TWO_PI * v["drive.sweep_min_over_2pi_hz"],
                TWO_PI * v["drive.sweep_max_over_2pi_hz"], v["drive.sweep_points"])

    @property
    def omega(self):
        return TWO_PI * self.values["medium.omega_over_2pi_hz"]

    @property
    def quantum_delta(self):
        return self.values["quantum.delta_over_omega"] * self.omega

    def couplings(self):
        if self.values["quantum.couplings"] == "derive":
            med = self.medium()
            drv = self.drive().with_detuning(self.quantum_delta)
            return coupling_constants(med, drv)
        return CouplingConstants.from_ratios(self.values["quantum.k1_over_omega"],
                                             self.values["quantum.k2_over_omega"], self.omega)

    def order(self):
        o = self.values["quantum.order"]
        return o if o == "exact" else int(o)

    def times(self):
        import numpy as np
        v = self.values
        return 1e-9 * np.linspace(v["quantum.t_start_ns"], v["quantum.t_stop_ns"],
                                  v["quantum.samples"])


def _coerce(key, raw, line):
    typ = SCHEMA[key][0]
    text = raw.strip()
    if text.lower() in ("none", ""):
        return None
    try:
        if typ is int:
            f = float(text)
            if not f.is_integer():
                raise ValueError
            return int(f)
        if typ is float:
            val = float(text)
            if not math.isfinite(val):
                raise ValueError
            return val
        return text
    except ValueError:
        raise ConfigError(f"{key}: expected {typ.__name__}, got {text!r}", line) from None


def _unknown_key_message(key):
    for known in SCHEMA:
        bare = known.split(".", 1)[1]
        for suf in UNIT_SUFFIXES:
            if not known.endswith(suf):
                continue
            stem = known[: -len(suf)]
            # a truncated suffix ("_over_2pi") or a missing section prefix
            if key in (stem, stem.split(".", 1)[1]) or (
                    key != known and (known.startswith(key) or bare.startswith(key))
                    and len(key) > len(stem.split(".", 1)[1])):
                return f"unknown key {key!r}: unit suffix or section missing (did you mean {known!r}?)"
        if key == bare:
            return f"unknown key {key!r}: section missing (did you mean {known!r}?)"
    return f"unknown key {key!r}"


def parse_config(text, scenario=None):
    """Parse a config document; ``scenario`` fills in when the text has none."""
    entries = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno)
        key, val = (s.strip() for s in body.split("=", 1))
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        entries[key] = val
        lines[key] = lineno
    scen = entries.pop("scenario", None) or scenario
    if scen is None:
        raise ConfigError("scenario not given")
    if scen not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scen!r}", lines.get("scenario"))
    user = {}
    for key, raw in entries.items():
        if key not in SCHEMA:
            raise ConfigError(_unknown_key_message(key), lines[key])
        val = _coerce(key, raw, lines[key])
        check = SCHEMA[key][2]
        if val is not None and not check(val):
            raise ConfigError(f"{key}: value {val!r} out of range ({SCHEMA[key][3]})", lines[key])
        user[key] = val
    return build_config(scen, user, lines)


def build_config(scenario, user, lines=None):
    lines = lines or {}
    values = {k: spec[1] for k, spec in SCHEMA.items()}
    prov = {k: "default" for k in SCHEMA}
    for k, v in PRESETS[scenario].items():
        values[k] = v
        prov[k] = "preset"
    for a, b in EXCLUSIVE:
        if a in user and b in user and user[a] is not None and user[b] is not None:
            raise ConfigError(f"give only one of {a} and {b}", lines.get(b))
        # a user value for one member silences the other's default
        if a in user and user[a] is not None:
            values[b], prov[b] = None, "user"
        if b in user and user[b] is not None:
            values[a], prov[a] = None, "user"
    for k, v in user.items():
        values[k] = v
        prov[k] = "user"
    if values["drive.g1_over_2pi_hz"] is None and values["drive.coupling_intensity_mw_per_cm2"] is None:
        raise ConfigError("coupling field missing: set drive.g1_over_2pi_hz or "
                          "drive.coupling_intensity_mw_per_cm2")
    if values["quantum.t_stop_ns"] < values["quantum.t_start_ns"]:
        raise ConfigError("quantum.t_stop_ns must not precede quantum.t_start_ns",
                          lines.get("quantum.t_stop_ns"))
    return RunConfig(scenario=scenario, values=values, provenance=prov)


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize(cfg: RunConfig):
    """Document that reparses to ``cfg``: scenario plus every user-set key."""
    out = [f"scenario = {cfg.scenario}"]
    for k in cfg.user_keys():
        v = cfg.values[k]
        # keys nulled by an exclusive partner are implied by that partner
        partner_set = any(k in pair and cfg.values[pair[1 - pair.index(k)]] is not None
                          and v is None for pair in EXCLUSIVE)
        if partner_set:
            continue
        out.append(f"{k} = {_fmt(v)}")
    return "\n".join(out) + "\n"


def resolved(cfg: RunConfig):
    """Plain dict of every value with its provenance, for manifests."""
    return {k: {"value": cfg.values[k], "source": cfg.provenance[k]} for k in sorted(cfg.values)}
