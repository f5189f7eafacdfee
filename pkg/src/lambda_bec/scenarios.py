"""Scenario runners: each writes deterministic CSV files plus a manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, resolved
from .dynamics import (evolve_expectations, initial_state, oscillation_envelope,
                       poisson_direct_sum, timescales, zero_order_expectations)
from .medium import (TWO_PI, find_transparency_points, optical_response, susceptibilities)
from .pae import classify_sector
from .spectral import build_sector_hamiltonian, error_study, exact_spectrum, perturbative_energies

OUT_ENV = "LAMBDA_BEC_OUT"

TABLE1_ROWS = (("a", 3e-7, -3e-9), ("b", 3e-7, -3e-10), ("c", 3e-6, -3e-10))


class ScenarioError(RuntimeError):
    def __init__(self, scenario, exc):
        super().__init__(f"{scenario}: {type(exc).__name__}: {exc}")
        self.scenario = scenario
        self.cause = exc


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return ""
    if v == 0.0:
        return "0"  # also folds -0
    return format(v, ".12g")


def write_csv(path, header, rows):
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(x) for x in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def write_series(series, path):
    """CSV with t_ns, n_mean, n2_mean, q; undefined Q is an empty field."""
    rows = zip(np.asarray(series.times) * 1e9, series.n_mean, series.n2_mean,
               np.atleast_1d(series.q))
    return write_csv(path, ["t_ns", "n_mean", "n2_mean", "q"], rows)


def _sweep_grid(cfg):
    lo, hi, n = cfg.sweep()
    return np.linspace(lo, hi, n)


def _run_fig2(cfg, out):
    med, drv = cfg.medium(), cfg.drive()
    rows = []
    for d in _sweep_grid(cfg):
        resp = optical_response(med, drv.with_detuning(d))
        chi = susceptibilities(med, drv.with_detuning(d))
        rows.append((d / TWO_PI, resp.n_p2, resp.eta_p2, chi.chi3.real, chi.chi3.imag))
    return [write_csv(out("fig2.csv"), ["delta_over_2pi_hz", "n_p2_m2_per_v2",
                                        "eta_p2_m_per_v2", "re_chi3_m2_per_v2",
                                        "im_chi3_m2_per_v2"], rows)]


def _run_fig3(cfg, out):
    med, drv = cfg.medium(), cfg.drive()
    rows = []
    for d in _sweep_grid(cfg):
        resp = optical_response(med, drv.with_detuning(d))
        rows.append((d / TWO_PI, resp.n_g, resp.v_g, resp.eta_p))
    return [write_csv(out("fig3.csv"), ["delta_over_2pi_hz", "n_g", "v_g_m_per_s",
                                        "eta_p_per_m"], rows)]


def _run_susceptibility(cfg, out):
    med, drv = cfg.medium(), cfg.drive()
    rows = []
    for d in _sweep_grid(cfg):
        dd = drv.with_detuning(d)
        chi = susceptibilities(med, dd)
        resp = optical_response(med, dd)
        rows.append((d / TWO_PI, chi.chi1.real, chi.chi1.imag, chi.chi3.real, chi.chi3.imag,
                     resp.n_p0, resp.n_p2, resp.eta_p0, resp.eta_p2))
    files = [write_csv(out("susceptibility.csv"),
                       ["delta_over_2pi_hz", "re_chi1", "im_chi1", "re_chi3_m2_per_v2",
                        "im_chi3_m2_per_v2", "n_p0", "n_p2_m2_per_v2", "eta_p0_per_m",
                        "eta_p2_m_per_v2"], rows)]
    lo, hi, n = cfg.sweep()
    roots = find_transparency_points(med, drv, (lo, hi), n)
    files.append(write_csv(out("transparency_points.csv"), ["delta_over_2pi_hz"],
                           [(x / TWO_PI,) for x in roots]))
    return files


def _quantum(cfg):
    k = cfg.couplings()
    return k.k1, k.k2, cfg.quantum_delta, cfg.values["medium.n_atoms"] / 2.0


def _run_fig4(cfg, out):
    k1, k2, delta, r = _quantum(cfg)
    Ms = [M for M in range(cfg["quantum.m_min"], cfg["quantum.m_max"] + 1) if M != 2 * r]
    st = error_study(Ms, r, delta, k1, k2)
    rows = [(int(M), *e) for M, e in zip(st.M, st.errors)]
    return [write_csv(out("fig4.csv"), ["M", "deltaE_order0", "deltaE_order1",
                                        "deltaE_order2"], rows)]


def _run_spectrum(cfg, out):
    k1, k2, delta, r = _quantum(cfg)
    sec = classify_sector(cfg["quantum.m_sector"], r, k1, k2)
    spec = exact_spectrum(build_sector_hamiltonian(sec, 0.0, delta))
    pert = [np.sort(perturbative_energies(sec, delta, o)) for o in (0, 1, 2)]
    rows = [(i, spec.exact[i], pert[0][i], pert[1][i], pert[2][i]) for i in range(sec.dim)]
    return [write_csv(out("spectrum.csv"), ["level", "exact_rad_per_s", "order0_rad_per_s",
                                            "order1_rad_per_s", "order2_rad_per_s"], rows)]


def _state(cfg, k1, k2):
    return initial_state(cfg["quantum.n0"], cfg["medium.n_atoms"], cfg["quantum.m_cutoff"],
                         k1=k1, k2=k2)


def _run_dynamics(cfg, out, name="dynamics"):
    k1, k2, delta, r = _quantum(cfg)
    st = _state(cfg, k1, k2)
    series = evolve_expectations(st, cfg.times(), delta, k1, k2, cfg.order())
    return [write_series(series, out(f"{name}.csv"))]


def _run_fig5(cfg, out):
    k1, k2, delta, r = _quantum(cfg)
    st = _state(cfg, k1, k2)
    t = cfg.times()
    files = [write_series(evolve_expectations(st, t, delta, k1, k2, cfg.order()),
                          out(f"fig5_order{cfg.order()}.csv"))]
    files.append(write_series(zero_order_expectations(st, t, delta, k1, k2),
                              out("fig5_zero_order.csv")))
    return files


def _table_rows(cfg):
    n0 = cfg["quantum.n0"]
    r = cfg["medium.n_atoms"] / 2.0
    w = cfg.omega
    delta = cfg.quantum_delta
    for name, a, b in TABLE1_ROWS:
        yield name, a, b, timescales(n0, r, -r, a * w, b * w, delta)


def _run_table1(cfg, out):
    rows = []
    for name, a, b, ts in _table_rows(cfg):
        rows.append((name, a, b, ts.t_rabi * 1e9, ts.t_col_small_k2 * 1e9,
                     None if ts.t_col_large_k2 is None else ts.t_col_large_k2 * 1e9,
                     ts.t_revival * 1e9))
    return [write_csv(out("table1.csv"), ["row", "k1_over_omega", "k2_over_omega", "T_R_ns",
                                          "tau_col1_ns", "tau_col2_ns", "tau_rev_ns"], rows)]


def _run_timescales(cfg, out):
    k1, k2, delta, r = _quantum(cfg)
    ts = timescales(cfg["quantum.n0"], r, -r, k1, k2, delta)
    full = timescales(cfg["quantum.n0"], r, -r, k1, k2, delta, full=True)
    rows = [("leading", ts.t_rabi * 1e9, ts.t_col_small_k2 * 1e9,
             None if ts.t_col_large_k2 is None else ts.t_col_large_k2 * 1e9,
             ts.t_revival * 1e9, ts.applicable),
            ("full", full.t_rabi * 1e9, full.t_col_small_k2 * 1e9,
             None if full.t_col_large_k2 is None else full.t_col_large_k2 * 1e9,
             full.t_revival * 1e9, full.applicable)]
    return [write_csv(out("timescales.csv"), ["variant", "T_R_ns", "tau_col1_ns", "tau_col2_ns",
                                              "tau_rev_ns", "applicable"], rows)]


def _run_fig6(cfg, out):
    n0 = cfg["quantum.n0"]
    r = cfg["medium.n_atoms"] / 2.0
    w, delta = cfg.omega, cfg.quantum_delta
    t = cfg.times()
    files = []
    for name, a, b in TABLE1_ROWS:
        nbar = poisson_direct_sum(n0, t, delta, a * w, b * w, r)
        env = oscillation_envelope(n0, t, delta, a * w, b * w, r)
        files.append(write_csv(out(f"fig6_{name}.csv"), ["t_ns", "n_mean", "envelope"],
                               zip(t * 1e9, nbar, env)))
    return files


RUNNERS = {
    "fig2": _run_fig2, "fig3": _run_fig3, "fig4": _run_fig4, "fig5": _run_fig5,
    "fig6": _run_fig6, "table1": _run_table1, "susceptibility": _run_susceptibility,
    "spectrum": _run_spectrum, "dynamics": _run_dynamics, "timescales": _run_timescales,
}


def output_directory(cfg: RunConfig, override=None):
    d = override or cfg.values["output.directory"] or os.environ.get(OUT_ENV) or "."
    return Path(d)


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_scenario(scenario, cfg: RunConfig, out_dir=None):
    """Run one scenario; returns the list of written paths (manifest last).

    On any error every file written by this run is removed and a
    ScenarioError carrying the cause is raised.
    """
    if scenario not in RUNNERS:
        raise KeyError(f"unknown scenario {scenario!r}")
    directory = output_directory(cfg, out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    prefix = cfg.values["output.prefix"] or ""
    written = []

    def out(name):
        p = directory / f"{prefix}{name}"
        written.append(p)
        return p

    try:
        files = RUNNERS[scenario](cfg, out)
        manifest = {
            "scenario": scenario,
            "library": "lambda_bec",
            "version": __version__,
            "config": resolved(cfg),
            "files": {p.name: _sha256(p) for p in files},
        }
        mpath = out(f"{scenario}_manifest.json")
        mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except Exception as exc:
        for p in written:
            if p.exists():
                p.unlink()
        raise ScenarioError(scenario, exc) from exc
    return files + [mpath]
