"""Free-surface reconstruction and physical admissibility checks.

A profile w on the conformal grid maps to the surface curve

    S = { ((t + C w(t))/k, w(t)/k) : t in R },

which advances by one wavelength 2*pi/k per period of t.  A valid wave must
keep this curve injective (no trapped air pockets) and above the bed
(w > -kh in finite depth); both are checked here, along with the
crest-to-trough steepness and the parameter threshold where the explicit
pure-capillary family starts self-intersecting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import crapper
from ._kernels import segment_crossings
from .spectral import PeriodicFunction, hilbert, hilbert_strip, drop_mean, grid
from .operators import conformal_metric

GEOMETRY_POINTS = 1024


@dataclass(frozen=True)
class SurfaceCurve:
    """One period of the free surface; x advances by 2*pi/k per period."""

    x: np.ndarray
    y: np.ndarray
    k: float

    def __post_init__(self):
        if len(self.x) != len(self.y) or len(self.x) < 4:
            raise ValueError("curve needs matching x/y arrays with >= 4 points")
        if not self.k > 0.0:
            raise ValueError("wavenumber must be positive")
        self.x.flags.writeable = False
        self.y.flags.writeable = False

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.k

    def extended(self, margin: float = 0.5):
        """Polyline over one period plus `margin` periods on each side."""
        n = len(self.x)
        m = int(round(margin * n))
        j = np.arange(-m, n + m + 1)
        shift = np.floor_divide(j, n)
        idx = j - shift * n
        return self.x[idx] + shift * self.period, self.y[idx]


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    crossings: np.ndarray  # (n, 2) crossing coordinates folded into one period


def surface_profile(w: PeriodicFunction, k: float, d: float | None = None,
                    n_points: int | None = None) -> SurfaceCurve:
    """Surface curve ((t + C w)/k, w/k); strip conjugation when d is given."""
    if not k > 0.0:
        raise ValueError("wavenumber must be positive")
    conformal_metric(w, d)  # rejects degenerate parameterisations
    if n_points is not None and n_points != w.n_grid:
        w = w.resample(n_points)
    cw = hilbert(drop_mean(w)) if d is None else hilbert_strip(drop_mean(w), d)
    t = grid(w.n_grid)
    return SurfaceCurve(x=(t + cw.samples) / k, y=w.samples / k, k=k)


def check_injective(curve: SurfaceCurve) -> InjectivityReport:
    """Segment sweep over one period plus half-period margins on both sides."""
    if len(curve.x) < 64:
        raise ValueError("injectivity check needs at least 64 points")
    x, y = curve.extended(margin=0.5)
    hits = segment_crossings(x, y)
    if len(hits):
        folded = hits.copy()
        folded[:, 0] = np.mod(folded[:, 0], curve.period)
        order = np.lexsort((folded[:, 1].round(9), folded[:, 0].round(9)))
        folded = folded[order]
        keep = np.ones(len(folded), dtype=bool)
        keep[1:] = np.any(np.abs(np.diff(folded.round(9), axis=0)) > 1e-9, axis=1)
        hits = folded[keep]
    return InjectivityReport(injective=len(hits) == 0, crossings=hits)


def check_above_bed(w: PeriodicFunction, k: float, h: float) -> bool:
    """Whether the surface stays above the bed: min w > -k*h."""
    if not (k > 0.0 and h > 0.0 and math.isfinite(h)):
        raise ValueError("above-bed check needs k > 0 and finite h > 0")
    return bool(np.min(w.samples) + k * h > 0.0)


def steepness(w: PeriodicFunction, k: float = 1.0) -> float:
    """Crest-to-trough height over wavelength, (max w - min w)/(2*pi).

    Independent of k: both coordinates of the surface scale by 1/k.
    """
    return float((np.max(w.samples) - np.min(w.samples)) / (2.0 * math.pi))


def crapper_profile_injective(A: float, n_grid: int = GEOMETRY_POINTS) -> bool:
    w = crapper.crapper_wave(A, n_grid)
    return check_injective(surface_profile(w, 1.0)).injective


def critical_self_intersection_A(tol: float = 1e-3, n_grid: int = 2048,
                                 lo: float = 0.2, hi: float = 0.9) -> float:
    """Bisect the parameter where the explicit pure-capillary profiles start
    to self-intersect; injective below, crossing above, bracket width <= tol."""
    if tol < 1e-4:
        raise ValueError("tol below 1e-4 is not resolvable at this grid")
    if crapper_profile_injective(hi, n_grid):
        raise RuntimeError(f"expected a self-intersecting profile at A={hi}")
    while not crapper_profile_injective(lo, n_grid):
        lo *= 0.5
        if lo < 1e-3:
            raise RuntimeError("failed to bracket the self-intersection threshold")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if crapper_profile_injective(mid, n_grid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
