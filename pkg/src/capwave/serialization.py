"""Deterministic on-disk formats: solution/branch JSON, CSV summaries, SVG.

Floating-point values are printed with 17 significant digits (lossless for
IEEE doubles) and every object is written with a fixed field order, so
identical inputs produce byte-identical files.  Infinite depth is stored as
JSON null / CSV "inf".
"""

from __future__ import annotations

import json
import math

import numpy as np

from .continuation import Branch, WaveSolution
from .operators import DepthMode, WaveParams
from .spectral import PeriodicFunction

FORMAT_VERSION = 1

BRANCH_CSV_COLUMNS = ("A_start", "alpha", "beta", "gamma", "h", "residual_inf_norm",
                      "b_or_qhat", "steepness", "injective", "above_bed", "newton_iters")


def format_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return "null"
    return "%.17g" % x


def dumps_fixed(obj, indent: int = 0) -> str:
    """JSON writer with %.17g floats and insertion-ordered keys."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(f'{pad}  {json.dumps(str(k))}: {dumps_fixed(v, indent + 1)}'
                           for k, v in obj.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        if flat:
            return "[" + ", ".join(dumps_fixed(v) for v in seq) + "]"
        items = ",\n".join(f"{pad}  {dumps_fixed(v, indent + 1)}" for v in seq)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    return json.dumps(obj)


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_fixed(obj))
        fh.write("\n")


# -- solutions ------------------------------------------------------------------


def solution_to_dict(sol: WaveSolution) -> dict:
    p = sol.params
    diag = {"b_or_qhat": sol.b_or_qhat,
            "newton_iters": sol.newton_iters,
            "sigma_min": sol.sigma_min}
    for key in ("steepness", "injective", "above_bed", "crossing_count"):
        if key in sol.geometry:
            diag[key] = sol.geometry[key]
    return {
        "format_version": FORMAT_VERSION,
        "params": {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma,
                   "h": None if math.isinf(p.h) else p.h, "g": p.g, "sigma": p.sigma},
        "depth_mode": "infinite" if sol.depth.is_infinite else "finite",
        "n_grid": sol.w.n_grid,
        "cosine_coeffs": list(sol.w.cosine_coefficients(sol.modes)),
        "residual_norm": sol.residual_norm,
        "diagnostics": diag,
    }


def solution_from_dict(d: dict) -> WaveSolution:
    if d.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {d.get('format_version')!r}")
    pr = d["params"]
    h = pr["h"] if pr["h"] is not None else math.inf
    params = WaveParams(alpha=pr["alpha"], beta=pr["beta"], g=pr["g"],
                        sigma=pr["sigma"], gamma=pr["gamma"], h=h)
    depth = DepthMode(h=h, gamma=pr["gamma"])
    coeffs = np.asarray(d["cosine_coeffs"], dtype=float)
    w = PeriodicFunction.from_cosine_series(coeffs, d["n_grid"])
    diag = dict(d.get("diagnostics", {}))
    geometry = {k: diag[k] for k in ("steepness", "injective", "above_bed", "crossing_count")
                if k in diag}
    return WaveSolution(params=params, depth=depth, w=w,
                        residual_norm=float(d["residual_norm"]),
                        b_or_qhat=float(diag.get("b_or_qhat", math.nan)),
                        newton_iters=int(diag.get("newton_iters", 0)),
                        modes=len(coeffs),
                        sigma_min=float(diag.get("sigma_min", math.nan)),
                        residual_history=(), geometry=geometry)


# -- branches -------------------------------------------------------------------


def branch_to_dict(branch: Branch) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "start_A": branch.start_A,
        "solutions": [solution_to_dict(s) for s in branch.solutions],
        "step_history": [{"alpha": a, "beta": b, "step": s, "accepted": acc}
                         for (a, b, s, acc) in branch.step_history],
    }


def branch_from_dict(d: dict) -> Branch:
    if d.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {d.get('format_version')!r}")
    branch = Branch(start_A=float(d["start_A"]))
    branch.solutions = [solution_from_dict(s) for s in d["solutions"]]
    branch.step_history = [(e["alpha"], e["beta"], e["step"], bool(e["accepted"]))
                           for e in d["step_history"]]
    return branch


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    return str(v)


def branch_csv_text(branch: Branch) -> str:
    lines = [",".join(BRANCH_CSV_COLUMNS)]
    for s in branch.solutions:
        geo = s.geometry
        row = (branch.start_A, s.params.alpha, s.params.beta, s.params.gamma,
               s.params.h, s.residual_norm, s.b_or_qhat,
               geo.get("steepness", math.nan), geo.get("injective", True),
               geo.get("above_bed", True), s.newton_iters)
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


# -- profile CSV / SVG -------------------------------------------------------------


def profile_csv_text(x, y) -> str:
    lines = ["X,Y"]
    for xi, yi in zip(x, y):
        lines.append(f"{_csv_cell(float(xi))},{_csv_cell(float(yi))}")
    return "\n".join(lines) + "\n"


def profile_svg_text(x, y, crossings=None) -> str:
    """Unit-square SVG polyline with 5% margins; crossings drawn as circles."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    span = max(float(np.max(x) - np.min(x)), float(np.max(y) - np.min(y)), 1e-30)
    scale = 0.9 / span
    x0 = 0.5 - 0.5 * scale * (np.max(x) + np.min(x))
    y0 = 0.5 + 0.5 * scale * (np.max(y) + np.min(y))
    px = x0 + scale * x
    py = y0 - scale * y  # SVG y points down
    pts = " ".join(f"{xi:.6f},{yi:.6f}" for xi, yi in zip(px, py))
    parts = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1">',
             f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="0.003"/>']
    if crossings is not None and len(crossings):
        for cx, cy in np.asarray(crossings, dtype=float).reshape(-1, 2):
            parts.append(f'<circle cx="{x0 + scale * cx:.6f}" cy="{y0 - scale * cy:.6f}" '
                         'r="0.01" fill="none" stroke="red" stroke-width="0.003"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
