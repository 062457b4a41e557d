"""JSON and CSV serialization of reports and radial spectra."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .batch import CliReport
from .spectrum import RadialSpectrum

RADIAL_HEADER = ("rho_per_um", "k1_um2", "count", "error_weight")


def _num(x: float) -> str:
    return format(float(x), ".12g")


def report_json(report: CliReport | dict) -> str:
    data = report.to_dict() if isinstance(report, CliReport) else report
    return json.dumps(data, indent=2) + "\n"


def write_report_json(report: CliReport | dict, path) -> None:
    Path(path).write_text(report_json(report))


def write_per_image_csv(report: CliReport, path, group: str | None = None) -> None:
    """Rows ``id,cli`` (or ``group,id,cli`` when ``group`` is given)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("id", "cli") if group is None else ("group", "id", "cli"))
        for image_id, cli in report.per_image_cli:
            row = (image_id, repr(cli))
            w.writerow(row if group is None else (group, *row))


def write_radial_csv(rs: RadialSpectrum, path) -> None:
    """One row per annulus, rho ascending, twelve significant digits.

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _radial_rows(rs, path)
        return
    with open(path, "w", newline="") as fh:
        _radial_rows(rs, fh)


def _radial_rows(rs: RadialSpectrum, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RADIAL_HEADER)
    for rho, k1, n, ew in zip(rs.rho, rs.density, rs.count, rs.error_weight):
        w.writerow((_num(rho), _num(k1), int(n), _num(ew)))


def read_radial_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != RADIAL_HEADER:
        raise ValueError(f"{path}: not a radial spectrum CSV")
    body = np.array(rows[1:], dtype=float).reshape(-1, len(RADIAL_HEADER))
    out = {name: body[:, i] for i, name in enumerate(RADIAL_HEADER)}
    out["count"] = out["count"].astype(np.int64)
    return out
