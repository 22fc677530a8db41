#!/usr/bin/env python3
"""Writes the synthetic stripe-mode dispersion table used by the fixtures.

1/v_g(omega) = 1/vg0 + D (omega - omega0) + q (omega - omega0)^2, sampled on a
uniform grid centred on omega0 = 2 pi c / lambda0.
"""

import argparse
import math

C = 2.998e8


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/dispersion_stripe_810nm.csv")
    ap.add_argument("--lambda0-nm", type=float, default=810.0)
    ap.add_argument("--vg", type=float, default=2.958e8)
    ap.add_argument("--gvd", type=float, default=5.81e-25)
    ap.add_argument("--curvature", type=float, default=1.0e-39)
    ap.add_argument("--step", type=float, default=2.5e12)
    ap.add_argument("--points", type=int, default=41)
    args = ap.parse_args()

    omega0 = 2.0 * math.pi * C / (args.lambda0_nm * 1e-9)
    half = args.points // 2
    with open(args.out, "w", newline="\n") as f:
        f.write("omega_rad_s,vg_m_s\n")
        for k in range(-half, half + 1):
            dw = k * args.step
            inv = 1.0 / args.vg + args.gvd * dw + args.curvature * dw * dw
            f.write(f"{omega0 + dw:.17g},{1.0 / inv:.17g}\n")


if __name__ == "__main__":
    main()
