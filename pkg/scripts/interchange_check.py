"""Radial spectrum of a pixel-wise mean versus the mean of individual spectra.

For independent realizations the normalized spectrum of the averaged field
equals the averaged normalized spectrum in expectation.  Prints the share
of annuli in the valid band where the two agree within three standard
errors of the per-repetition difference.

    python3 scripts/interchange_check.py --reps 30 --fields 10
"""

import argparse
import math

import numpy as np

from cloudscope.simulate import PRESETS, simulate_preset
from cloudscope.spectrum import FrequencyBand, WindowSpec, power_spectrum_2d, radial_mean, valid_band
from cloudscope.weight import normalize_relative_weight, pixelwise_mean


def density(f, window):
    return radial_mean(power_spectrum_2d(normalize_relative_weight(f)[0], window))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", choices=sorted(PRESETS), default="sim2")
    ap.add_argument("--reps", type=int, default=30)
    ap.add_argument("--fields", type=int, default=10)
    ap.add_argument("--size", type=int, default=None, help="square size in pixels")
    args = ap.parse_args()

    window = WindowSpec()
    size = (args.size, args.size) if args.size else None
    diffs, rs = [], None
    for rep in range(args.reps):
        fields = [simulate_preset(args.preset, 1000 + args.fields * rep + k, size=size)
                  for k in range(args.fields)]
        rs = density(pixelwise_mean(fields), window)
        diffs.append(rs.density - np.mean([density(f, window).density for f in fields], axis=0))
    d = np.array(diffs)
    pre = PRESETS[args.preset]
    w, h = size or (pre.width, pre.height)
    lim = valid_band(FrequencyBand(1.0, 2.0), w, h, pre.pixel_size)
    sel = (rs.rho >= lim.rho_min_valid) & (rs.rho <= lim.rho_max_valid)
    err = d[:, sel].std(axis=0, ddof=1) / math.sqrt(len(d))
    ok = np.abs(d[:, sel].mean(axis=0)) <= 3 * err
    print(f"{ok.mean() * 100:.1f}% of {sel.sum()} annuli agree within 3 SE")


if __name__ == "__main__":
    main()
