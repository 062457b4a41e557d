"""Mean CLI of the SIM-1..SIM-4 presets on a wide and a narrow band.

The wide band ranks the large-wavelength GRF mixes by fluctuation energy;
the narrow band excludes the 875 um ring and reverses the ranking.

    python3 scripts/sim_band_ranking.py --seeds 20 --json ranking.json
"""

import argparse
import json
import math

import numpy as np

from cloudscope.simulate import PRESETS, simulate_preset
from cloudscope.spectrum import FrequencyBand, WindowSpec, cloudiness_index, power_spectrum_2d
from cloudscope.weight import normalize_relative_weight

BANDS = {"wide": FrequencyBand(0.002, 0.010), "narrow": FrequencyBand(0.002, 0.006)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--n-waves", type=int, default=256)
    ap.add_argument("--window", choices=("hann", "none"), default="hann")
    ap.add_argument("--json", help="write per-seed values here")
    args = ap.parse_args()

    window = WindowSpec(args.window)
    seeds = range(args.first_seed, args.first_seed + args.seeds)
    clis = {name: {band: [] for band in BANDS} for name in PRESETS}
    for seed in seeds:
        for name in PRESETS:
            f = normalize_relative_weight(simulate_preset(name, seed, n_waves=args.n_waves))[0]
            ps = power_spectrum_2d(f, window)
            for band, rng in BANDS.items():
                clis[name][band].append(cloudiness_index(ps, rng))

    print(f"{'preset':8s}" + "".join(f"{b:>22s}" for b in BANDS))
    for name in PRESETS:
        cells = []
        for band in BANDS:
            v = np.array(clis[name][band])
            se = v.std(ddof=1) / math.sqrt(len(v)) if len(v) > 1 else float("nan")
            cells.append(f"{100 * v.mean():10.2f}% +- {100 * se:5.2f}")
        print(f"{name:8s}" + "".join(f"{c:>22s}" for c in cells))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"seeds": list(seeds), "window": args.window, "cli": clis}, fh, indent=2)


if __name__ == "__main__":
    main()
