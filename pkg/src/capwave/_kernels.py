"""Segment-crossing kernel, the one hot non-FFT loop in the package.

Two interchangeable implementations: a numba @njit pairwise sweep and a
chunk-vectorised numpy fallback.  Selection:

    CAPWAVE_BACKEND=numba   force the jit kernel (error if numba is missing)
    CAPWAVE_BACKEND=numpy   force the fallback
    unset / auto            numba when importable, else numpy

Both compute the same crossing points; benchmarks/segment_bench.py compares
their throughput.
"""

from __future__ import annotations

import os

import numpy as np

ENDPOINT_BAND = 1e-12
_MAX_HITS = 8192

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


def selected_backend() -> str:
    env = os.environ.get("CAPWAVE_BACKEND", "auto").strip().lower()
    if env in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if env == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("CAPWAVE_BACKEND=numba but numba is not importable")
        return "numba"
    if env == "numpy":
        return "numpy"
    raise RuntimeError(f"CAPWAVE_BACKEND must be auto, numba or numpy, got {env!r}")


@njit(cache=True)
def _crossings_jit(x, y, band):
    n = len(x) - 1
    out = np.empty((_MAX_HITS, 2))
    hits = 0
    for i in range(n - 2):
        ax, ay = x[i], y[i]
        bx, by = x[i + 1], y[i + 1]
        xlo = min(ax, bx)
        xhi = max(ax, bx)
        ylo = min(ay, by)
        yhi = max(ay, by)
        for j in range(i + 2, n):
            cx, cy = x[j], y[j]
            dx, dy = x[j + 1], y[j + 1]
            if min(cx, dx) > xhi or max(cx, dx) < xlo:
                continue
            if min(cy, dy) > yhi or max(cy, dy) < ylo:
                continue
            d1 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
            d2 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
            d3 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            d4 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
            if d1 * d2 < 0.0 and d3 * d4 < 0.0:
                s = d1 / (d1 - d2)
                px = ax + s * (bx - ax)
                py = ay + s * (by - ay)
                if abs(px - ax) <= band and abs(py - ay) <= band:
                    continue
                if abs(px - bx) <= band and abs(py - by) <= band:
                    continue
                if abs(px - cx) <= band and abs(py - cy) <= band:
                    continue
                if abs(px - dx) <= band and abs(py - dy) <= band:
                    continue
                if hits < _MAX_HITS:
                    out[hits, 0] = px
                    out[hits, 1] = py
                    hits += 1
    return out[:hits]


def _crossings_numpy(x, y, band):
    n = len(x) - 1
    ax, ay = x[:-1], y[:-1]
    bx, by = x[1:], y[1:]
    pts = []
    chunk = 256
    jj = np.arange(n)[None, :]
    for i0 in range(0, max(n - 2, 0), chunk):
        i1 = min(i0 + chunk, n - 2)
        idx = np.arange(i0, i1)
        Ax, Ay = ax[idx, None], ay[idx, None]
        Bx, By = bx[idx, None], by[idx, None]
        d1 = (bx[None, :] - ax[None, :]) * (Ay - ay[None, :]) - (by[None, :] - ay[None, :]) * (Ax - ax[None, :])
        d2 = (bx[None, :] - ax[None, :]) * (By - ay[None, :]) - (by[None, :] - ay[None, :]) * (Bx - ax[None, :])
        d3 = (Bx - Ax) * (ay[None, :] - Ay) - (By - Ay) * (ax[None, :] - Ax)
        d4 = (Bx - Ax) * (by[None, :] - Ay) - (By - Ay) * (bx[None, :] - Ax)
        proper = (d1 * d2 < 0.0) & (d3 * d4 < 0.0) & (jj >= (idx[:, None] + 2))
        for i_loc, j in zip(*np.nonzero(proper)):
            i = i0 + i_loc
            s = d1[i_loc, j] / (d1[i_loc, j] - d2[i_loc, j])
            px = x[i] + s * (x[i + 1] - x[i])
            py = y[i] + s * (y[i + 1] - y[i])
            near = False
            for e in (i, i + 1, j, j + 1):
                if abs(px - x[e]) <= band and abs(py - y[e]) <= band:
                    near = True
                    break
            if not near:
                pts.append((px, py))
    return np.array(pts, dtype=float).reshape(-1, 2)


def segment_crossings(x: np.ndarray, y: np.ndarray, band: float = ENDPOINT_BAND,
                      backend: str | None = None) -> np.ndarray:
    """Proper pairwise intersections of the open polyline (x, y).

    Adjacent segments are skipped; intersections within `band` of a segment
    endpoint are excluded.  Returns an (n, 2) array of crossing coordinates.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 4:
        raise ValueError("need at least 4 polyline points")
    use = backend or selected_backend()
    if use == "numba":
        return _crossings_jit(x, y, band)
    return _crossings_numpy(x, y, band)
