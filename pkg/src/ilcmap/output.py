"""File emission: sweep CSV, portable-pixmap heatmaps, run manifests.

Everything written here is byte-reproducible for a fixed configuration:
floats are serialized with Python's shortest round-trip repr, verdicts
as 1/0/m, and pixmaps are raw binary P6 with a fixed palette, so a
repeated run diffs clean against the first.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

import numpy as np

from .plant import ABPoint
from .sweep import PointReport, Tri

__all__ = [
    "CSV_COLUMNS",
    "format_float",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_heatmaps",
    "write_manifest",
    "sha256_of",
]

CSV_COLUMNS = ["A", "B", "sup_T", "sigma_sq", "rho", "mc_z", "mc_sigma",
               "ac_rho", "mc_iter", "ac_iter", "mc_analytic", "ac_analytic",
               "flags"]

VERDICT_FIELDS = ("mc_z", "mc_sigma", "ac_rho", "mc_iter", "ac_iter",
                  "mc_analytic", "ac_analytic")
NUMERIC_FIELDS = ("sup_T", "sigma_sq", "rho")

# fixed palette: converged / marginal band / not converged / not computed
COLOR_TRUE = (40, 90, 200)
COLOR_MARGINAL = (240, 210, 60)
COLOR_FALSE = (200, 60, 50)
COLOR_ABSENT = (128, 128, 128)

_FIELD_ATTR = {"sup_T": "sup_t", "sigma_sq": "sigma_sq", "rho": "rho"}


def format_float(x: float | None) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _tri_str(t: Tri | None) -> str:
    return "" if t is None else t.value


def _tri_parse(s: str) -> Tri | None:
    if s == "":
        return None
    return Tri(s)


def write_sweep_csv(path, reports: list[PointReport]) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for r in reports:
        row = [
            format_float(r.point.a_gain),
            format_float(r.point.b_pole),
            format_float(r.sup_t),
            format_float(r.sigma_sq),
            format_float(r.rho),
            _tri_str(r.mc_z),
            _tri_str(r.mc_sigma),
            _tri_str(r.ac_rho),
            _tri_str(r.mc_iter),
            _tri_str(r.ac_iter),
            _tri_str(r.mc_analytic),
            _tri_str(r.ac_analytic),
            ";".join(r.flags),
        ]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_sweep_csv(path) -> list[PointReport]:
    """Parse a sweep CSV back into reports.

    The strict supremum and the per-point iteration trace indices are
    not serialized; those fields come back as None.
    """
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split(",") != CSV_COLUMNS:
        raise ValueError(f"{path}: not a sweep CSV (bad header)")
    reports = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise ValueError(f"{path}: malformed row {ln!r}")
        def num(s):
            return None if s == "" else float(s)
        reports.append(PointReport(
            point=ABPoint(float(cells[0]), float(cells[1])),
            sup_t=num(cells[2]), sigma_sq=num(cells[3]), rho=num(cells[4]),
            mc_z=_tri_parse(cells[5]), mc_sigma=_tri_parse(cells[6]),
            ac_rho=_tri_parse(cells[7]), mc_iter=_tri_parse(cells[8]),
            ac_iter=_tri_parse(cells[9]), mc_analytic=_tri_parse(cells[10]),
            ac_analytic=_tri_parse(cells[11]),
            flags=tuple(f for f in cells[12].split(";") if f),
        ))
    return reports


def _grid_of(reports: list[PointReport]):
    a_vals = sorted({r.point.a_gain for r in reports})
    b_vals = sorted({r.point.b_pole for r in reports})
    na, nb = len(a_vals), len(b_vals)
    if na * nb != len(reports):
        raise ValueError("reports do not form a complete rectangular grid")
    return a_vals, b_vals, na, nb


def _write_p6(path, pixels: np.ndarray) -> None:
    h, w, _ = pixels.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + pixels.astype(np.uint8).tobytes())


def write_heatmaps(prefix, reports: list[PointReport]) -> list[str]:
    """One pixmap per populated field, plus a sidecar legend.

    Verdict fields get the fixed three-color scheme; numeric fields get
    a linear grayscale over their observed range.  Rows run from the
    largest B (top) down, columns from the smallest A (left) right.
    Returns the list of written paths.
    """
    a_vals, b_vals, na, nb = _grid_of(reports)
    written: list[str] = []
    legend_lines = [
        "heatmap legend",
        f"grid: A {a_vals[0]}..{a_vals[-1]} ({na} cols, left to right), "
        f"B {b_vals[0]}..{b_vals[-1]} ({nb} rows, top = B max)",
        f"verdict colors: true/converged rgb{COLOR_TRUE}, "
        f"marginal rgb{COLOR_MARGINAL}, false rgb{COLOR_FALSE}, "
        f"absent rgb{COLOR_ABSENT}",
    ]

    def pix_index(k):
        i, j = divmod(k, nb)
        return (nb - 1 - j, i)  # row from B max down, column from A min

    for field in VERDICT_FIELDS:
        if all(getattr(r, field) is None for r in reports):
            continue
        img = np.zeros((nb, na, 3), dtype=np.uint8)
        for k, r in enumerate(reports):
            t = getattr(r, field)
            color = {Tri.TRUE: COLOR_TRUE, Tri.MARGINAL: COLOR_MARGINAL,
                     Tri.FALSE: COLOR_FALSE, None: COLOR_ABSENT}[t]
            img[pix_index(k)] = color
        path = f"{prefix}.{field}.ppm"
        _write_p6(path, img)
        written.append(path)

    for field in NUMERIC_FIELDS:
        attr = _FIELD_ATTR[field]
        vals = [getattr(r, attr) for r in reports]
        if all(v is None for v in vals):
            continue
        finite = [v for v in vals if v is not None]
        lo, hi = min(finite), max(finite)
        span = hi - lo
        img = np.zeros((nb, na, 3), dtype=np.uint8)
        for k, r in enumerate(reports):
            v = getattr(r, attr)
            if v is None:
                img[pix_index(k)] = COLOR_ABSENT
            else:
                g = 128 if span == 0.0 else int(round(255.0 * (v - lo) / span))
                img[pix_index(k)] = (g, g, g)
        path = f"{prefix}.{field}.ppm"
        _write_p6(path, img)
        written.append(path)
        legend_lines.append(
            f"{field}: grayscale 0..255 maps {format_float(lo)}"
            f"..{format_float(hi)} linearly")

    legend_path = f"{prefix}.legend.txt"
    Path(legend_path).write_text("\n".join(legend_lines) + "\n")
    written.append(legend_path)
    return written


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, config: dict, outputs: list[str],
                   tool_version: str, seed: int | None = None) -> None:
    """Record the resolved configuration and checksums of every output.

    Written after all outputs, so a manifest on disk certifies a
    complete run; re-running with the embedded configuration must
    reproduce the listed checksums bit for bit.
    """
    manifest = {
        "tool": "ilcmap",
        "version": tool_version,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "seed": seed,
        "config": config,
        "outputs": [{"path": str(p), "sha256": sha256_of(p)}
                    for p in outputs],
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
