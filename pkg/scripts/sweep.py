"""Resonant slow light versus coupling-beam intensity.

Writes coupling_intensity_mw_per_cm2, g1_over_2pi_hz, v_g_m_per_s, eta_p_per_m
and the transmitted fraction exp(-eta_p L) through a sample of length L.

Usage: python3 scripts/sweep.py [--min 1] [--max 200] [--points 40] [--length-um 50]
"""
import argparse
import csv
import sys

import numpy as np

from lambda_bec.medium import TWO_PI, DriveParams, MediumParams, optical_response


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--min", type=float, default=1.0, help="mW/cm^2")
    p.add_argument("--max", type=float, default=200.0, help="mW/cm^2")
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--length-um", type=float, default=50.0)
    p.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = p.parse_args()
    med = MediumParams()
    w = csv.writer(args.out, lineterminator="\n")
    w.writerow(["coupling_intensity_mw_per_cm2", "g1_over_2pi_hz", "v_g_m_per_s",
                "eta_p_per_m", "transmission"])
    for I in np.geomspace(args.min, args.max, args.points):
        drv = DriveParams(coupling_intensity=I * 10.0)  # mW/cm² -> W/m²
        resp = optical_response(med, drv)
        v_g = "" if resp.v_g is None else f"{resp.v_g:.6g}"
        w.writerow([f"{I:.6g}", f"{drv.coupling_rabi(med) / TWO_PI:.6g}", v_g,
                    f"{resp.eta_p:.6g}", f"{np.exp(-resp.eta_p * args.length_um * 1e-6):.6g}"])


if __name__ == "__main__":
    main()
