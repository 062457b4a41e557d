"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error (zero pixels, constant
field, geometry mismatch, band outside the measurable range, unreadable
input).  Every failure prints a single diagnostic line to stderr.
"""

from __future__ import annotations

import argparse
import glob
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .batch import CliReport, analyze_set, summary_stats
from .errors import DataError
from .field_io import ScalarField, load_image, save_image
from .report import read_radial_csv, report_json, write_per_image_csv, write_radial_csv, write_report_json
from .simulate import PRESETS, simulate_preset, to_transmission_image
from .spectrum import FrequencyBand, RadialSpectrum, WindowSpec, power_spectrum_2d, radial_mean
from .svg import emit_svg_plot
from .weight import TransformOptions, log_attenuation, normalize_relative_weight, pixelwise_mean

DEFAULT_BAND = "0.02:0.10"
MODES = {"per-image": "per_image", "mean": "pixelwise_mean", "both": "both"}
ZERO_POLICIES = {"error": "error", "clamp": "clamp_to_min_positive"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    pixel_size: float | None = None
    band: FrequencyBand | None = None
    window: WindowSpec = field(default_factory=WindowSpec)
    transform: TransformOptions = field(default_factory=TransformOptions)
    mode: str = "both"
    average_after_log: bool = False
    preset: str | None = None
    seed: int = 0
    out: str | None = None
    csv: str | None = None
    svg: str | None = None
    extra: dict = field(default_factory=dict)


def _pair(text: str, what: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"{what} must look like LO:HI, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError(f"{what} bounds must be finite")
    return lo, hi


def _band(args) -> FrequencyBand:
    if args.wavelengths is not None:
        lo, hi = _pair(args.wavelengths, "--wavelengths")
        if lo <= 0 or hi <= 0:
            raise UsageError("--wavelengths must be positive")
        return FrequencyBand.from_wavelengths(lo, hi)
    return FrequencyBand(*_pair(args.band or DEFAULT_BAND, "--band"))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cloudscope", description="Cloudiness index of nonwoven transmission images.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pipeline_flags(sp, band=True):
        sp.add_argument("--pixel-size", type=float, required=True, help="pixel size in um")
        if band:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--band", help=f"angular frequency band lo:hi in 1/um (default {DEFAULT_BAND})")
            g.add_argument("--wavelengths", help="band given as wavelengths lo:hi in um")
        sp.add_argument("--window", choices=("hann", "none"), default="hann")
        sp.add_argument("--no-log", action="store_true", help="inputs are weights already; skip -ln(g/g0)")
        sp.add_argument("--g0", type=float, help="incident intensity (default: image maximum)")
        sp.add_argument("--zero-policy", choices=tuple(ZERO_POLICIES), default="error")

    a = sub.add_parser("analyze", help="CLI of each image and of their pixel-wise mean")
    a.add_argument("inputs", nargs="+", help="image files or glob patterns")
    pipeline_flags(a)
    a.add_argument("--mode", choices=tuple(MODES), default="both")
    a.add_argument("--average-after-log", action="store_true")
    a.add_argument("--out", help="report JSON (default: stdout)")
    a.add_argument("--csv", help="per-image CSV id,cli")
    a.add_argument("--svg", help="box plot of the per-image CLIs")

    r = sub.add_parser("radial", help="rotation mean of the power spectrum")
    r.add_argument("inputs", nargs="+")
    pipeline_flags(r, band=False)
    r.add_argument("--csv", help="radial spectrum CSV (default: stdout)")
    r.add_argument("--svg", help="log-log plot")
    r.add_argument("--out", help="alias for --csv")

    s = sub.add_parser("simulate", help="synthetic image from a SIM preset")
    s.add_argument("--preset", choices=sorted(PRESETS), required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="output .png or .pgm")
    s.add_argument("--depth", type=int, choices=(8, 16), default=16)
    s.add_argument("--size", help="WIDTHxHEIGHT in pixels (default: preset size)")
    s.add_argument("--n-waves", type=int, default=256)
    s.add_argument("--weights", action="store_true",
                   help="write the weight field (min-max scaled) instead of a transmission image")

    b = sub.add_parser("batch", help="per-group CLI statistics, e.g. one group per sample")
    b.add_argument("groups", nargs="+", metavar="NAME=GLOB")
    pipeline_flags(b)
    b.add_argument("--mode", choices=tuple(MODES), default="both")
    b.add_argument("--average-after-log", action="store_true")
    b.add_argument("--out", help="combined JSON (default: stdout)")
    b.add_argument("--csv", help="CSV group,id,cli")
    b.add_argument("--svg", help="box plot, one box per group")

    pl = sub.add_parser("plot", help="SVG from radial CSV or report JSON files")
    pl.add_argument("inputs", nargs="+")
    pl.add_argument("--svg", "--out", dest="svg", required=True)
    return p


def _config(args) -> RunConfig:
    cfg = RunConfig(args.command)
    cfg.inputs = list(getattr(args, "inputs", None) or getattr(args, "groups", None) or [])
    for name in ("pixel_size", "preset", "seed", "out", "csv", "svg", "average_after_log"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    if cfg.pixel_size is not None and not cfg.pixel_size > 0:
        raise UsageError("--pixel-size must be positive")
    if hasattr(args, "window"):
        cfg.window = WindowSpec(args.window)
        if args.g0 is not None and not args.g0 > 0:
            raise UsageError("--g0 must be positive")
        cfg.transform = TransformOptions("linear" if args.no_log else "beer_lambert",
                                         args.g0, ZERO_POLICIES[args.zero_policy])
    if hasattr(args, "band") or hasattr(args, "wavelengths"):
        cfg.band = _band(args)
    if hasattr(args, "mode"):
        cfg.mode = MODES[args.mode]
    if args.command == "simulate":
        cfg.extra = {"depth": args.depth, "n_waves": args.n_waves, "weights": args.weights,
                     "size": args.size}
    return cfg


def _expand(patterns) -> list[str]:
    paths = []
    for pat in patterns:
        hits = sorted(glob.glob(pat)) if glob.has_magic(pat) else [pat]
        if not hits:
            raise DataError(f"no files match {pat!r}")
        paths.extend(hits)
    return paths


def _load_all(paths, pixel_size) -> list[ScalarField]:
    fields = []
    for path in paths:
        try:
            fields.append(load_image(path, pixel_size))
        except FileNotFoundError:
            raise DataError(f"{path}: no such file") from None
    return fields


def _analyze(cfg: RunConfig, paths) -> CliReport:
    images = _load_all(paths, cfg.pixel_size)
    return analyze_set(images, cfg.transform, cfg.window, cfg.band, cfg.mode, ids=list(paths),
                       average_after_log=cfg.average_after_log)


def cmd_analyze(cfg: RunConfig):
    paths = _expand(cfg.inputs)
    report = _analyze(cfg, paths)
    if cfg.out:
        write_report_json(report, cfg.out)
    else:
        sys.stdout.write(report_json(report))
    if cfg.csv:
        write_per_image_csv(report, cfg.csv)
    if cfg.svg:
        if report.stats is None:
            raise UsageError("--svg needs per-image results (--mode per-image or both)")
        emit_svg_plot({"images": report.stats}, "boxplot", cfg.svg)


def cmd_batch(cfg: RunConfig):
    groups = {}
    for spec in cfg.inputs:
        name, sep, pattern = spec.partition("=")
        if not sep or not name or not pattern:
            raise UsageError(f"group must look like NAME=GLOB, got {spec!r}")
        if name in groups:
            raise UsageError(f"duplicate group name {name!r}")
        groups[name] = _expand([pattern])
    reports = {name: _analyze(cfg, paths) for name, paths in groups.items()}
    combined = {"groups": {name: rep.to_dict() for name, rep in reports.items()}}
    if cfg.out:
        write_report_json(combined, cfg.out)
    else:
        sys.stdout.write(report_json(combined))
    if cfg.csv:
        with open(cfg.csv, "w") as fh:
            fh.write("group,id,cli\n")
            for name, rep in reports.items():
                for image_id, cli in rep.per_image_cli:
                    fh.write(f"{name},{image_id},{cli!r}\n")
    if cfg.svg:
        stats = {name: rep.stats for name, rep in reports.items() if rep.stats is not None}
        if not stats:
            raise UsageError("--svg needs per-image results (--mode per-image or both)")
        emit_svg_plot(stats, "boxplot", cfg.svg)


def cmd_radial(cfg: RunConfig):
    paths = _expand(cfg.inputs)
    images = _load_all(paths, cfg.pixel_size)
    gray = pixelwise_mean(images)
    weight = log_attenuation(gray, cfg.transform)
    normalized, _, _ = normalize_relative_weight(weight)
    rs = radial_mean(power_spectrum_2d(normalized, cfg.window))
    write_radial_csv(rs, cfg.csv or cfg.out or sys.stdout)
    if cfg.svg:
        emit_svg_plot(rs, "radial_loglog", cfg.svg)


def cmd_simulate(cfg: RunConfig):
    size = None
    if cfg.extra["size"]:
        try:
            w, h = (int(t) for t in cfg.extra["size"].lower().split("x"))
        except ValueError:
            raise UsageError(f"--size must look like WIDTHxHEIGHT, got {cfg.extra['size']!r}") from None
        if w < 2 or h < 2:
            raise UsageError("--size must be at least 2x2")
        size = (w, h)
    depth = cfg.extra["depth"]
    weight = simulate_preset(cfg.preset, cfg.seed, n_waves=cfg.extra["n_waves"], size=size)
    meta = {"preset": cfg.preset, "seed": cfg.seed, "simulation": weight.meta}
    if cfg.extra["weights"]:
        save_image(weight, cfg.out, depth, metadata=meta)
        return
    top = (1 << depth) - 1
    g0 = 0.9 * top
    span = float(weight.values.max() - weight.values.min())
    # darkest pixel at 5% of full scale keeps every gray value well above zero
    absorption = math.log(0.9 / 0.05) / span
    gray = to_transmission_image(weight, g0, absorption)
    meta.update({"g0": g0, "absorption": absorption})
    save_image(gray, cfg.out, depth, value_range=(0, top), metadata=meta)


def cmd_plot(cfg: RunConfig):
    first = Path(cfg.inputs[0])
    if first.suffix.lower() == ".csv":
        if len(cfg.inputs) != 1:
            raise UsageError("radial plots take exactly one CSV")
        data = read_radial_csv(first)
        if len(data["rho_per_um"]) == 0:
            raise DataError(f"{first}: empty radial spectrum")
        rs = RadialSpectrum(data["rho_per_um"], data["k1_um2"], data["count"], data["error_weight"],
                            float("nan"), float("nan"))
        emit_svg_plot(rs, "radial_loglog", cfg.svg)
        return
    groups = {}
    for path in cfg.inputs:
        doc = json.loads(Path(path).read_text())
        reports = doc["groups"] if "groups" in doc else {Path(path).stem: doc}
        for name, rep in reports.items():
            values = [e["cli"] for e in rep.get("per_image", [])]
            if values:
                groups[name] = summary_stats(values)
    if not groups:
        raise DataError("no per-image CLI values to plot")
    emit_svg_plot(groups, "boxplot", cfg.svg)


COMMANDS = {"analyze": cmd_analyze, "radial": cmd_radial, "simulate": cmd_simulate,
            "batch": cmd_batch, "plot": cmd_plot}


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
