import numpy as np
import pytest

from capwave import crapper
from capwave._kernels import HAVE_NUMBA, segment_crossings
from capwave.geometry import (
    SurfaceCurve,
    check_above_bed,
    check_injective,
    crapper_profile_injective,
    critical_self_intersection_A,
    steepness,
    surface_profile,
)
from capwave.operators import conformal_metric
from capwave.spectral import DegenerateMetricError, PeriodicFunction, derivative, grid


def test_surface_profile_flat_and_family_values():
    n = 256
    flat = surface_profile(PeriodicFunction.zeros(n), 1.0)
    assert np.max(np.abs(flat.y)) == 0.0
    assert np.max(np.abs(flat.x - grid(n))) < 1e-14
    w = crapper.crapper_wave(0.5, n)
    curve = surface_profile(w, 1.0)
    assert curve.y[0] == pytest.approx(-4.0 / 3.0, abs=1e-12)
    assert curve.y[n // 2] == pytest.approx(4.0, abs=1e-12)
    curve2 = surface_profile(w, 2.0)
    assert curve2.period == pytest.approx(np.pi, rel=1e-15)
    assert np.max(np.abs(curve2.y - curve.y / 2.0)) < 1e-14


def test_surface_profile_periodic_closure():
    w = crapper.crapper_wave(0.4, 128)
    curve = surface_profile(w, 1.5)
    x, y = curve.extended(margin=1.0)
    n = 128
    assert np.max(np.abs(x[n:2 * n] + curve.period - x[2 * n:3 * n])) < 1e-13
    assert np.max(np.abs(y[:n] - y[n:2 * n])) < 1e-13


def test_surface_profile_rejects_degenerate_metric():
    bad = PeriodicFunction.from_cosine_series([-1.0], 128)
    with pytest.raises(DegenerateMetricError):
        surface_profile(bad, 1.0)
    with pytest.raises(ValueError):
        surface_profile(crapper.crapper_wave(0.2, 128), 0.0)


def test_check_injective_flat_and_family():
    flat = surface_profile(PeriodicFunction.zeros(256), 1.0)
    assert check_injective(flat).injective
    assert crapper_profile_injective(0.2, 1024)
    report = check_injective(surface_profile(crapper.crapper_wave(0.9, 1024), 1.0))
    assert not report.injective
    assert len(report.crossings) >= 1
    with pytest.raises(ValueError):
        check_injective(SurfaceCurve(x=np.arange(8.0), y=np.zeros(8), k=1.0))


def test_injectivity_symmetric_under_parameter_sign():
    for A in (0.3, 0.6, 0.9):
        assert (crapper_profile_injective(A, 1024)
                == crapper_profile_injective(-A, 1024))


def test_backends_agree_on_crossings():
    w = crapper.crapper_wave(0.9, 1024)
    curve = surface_profile(w, 1.0)
    x, y = curve.extended(margin=0.5)
    via_numpy = segment_crossings(x, y, backend="numpy")
    assert len(via_numpy) >= 2
    if HAVE_NUMBA:
        via_numba = segment_crossings(x, y, backend="numba")
        assert via_numba.shape == via_numpy.shape
        order_a = np.lexsort((via_numba[:, 1], via_numba[:, 0]))
        order_b = np.lexsort((via_numpy[:, 1], via_numpy[:, 0]))
        assert np.allclose(via_numba[order_a], via_numpy[order_b], atol=1e-9)


def test_check_above_bed_examples():
    n = 256
    assert check_above_bed(PeriodicFunction.zeros(n), 1.0, 1.0)
    w = crapper.crapper_wave(0.5, n)  # min w = -4/3
    assert not check_above_bed(w, 1.0, 1.0)
    assert check_above_bed(w, 1.0, 2.0)
    with pytest.raises(ValueError):
        check_above_bed(w, 1.0, np.inf)


def test_steepness_examples():
    assert steepness(PeriodicFunction.zeros(64)) == 0.0
    for A in (0.1, 0.3, 0.5, 0.8):
        w = crapper.crapper_wave(A, 512)
        assert abs(steepness(w) - crapper.steepness_closed_form(A)) < 1e-10
    # conformal-unit steepness does not involve k at all
    w = crapper.crapper_wave(0.3, 256)
    assert steepness(w, 1.0) == steepness(w, 7.0)


def test_metric_matches_squared_curve_speed():
    for A, k in ((0.3, 1.0), (0.6, 2.5)):
        n = 512
        w = crapper.crapper_wave(A, n)
        curve = surface_profile(w, k)
        # d/dt of (X - t/k) and Y are spectral derivatives of periodic parts
        xper = PeriodicFunction.from_samples(curve.x - grid(n) / k)
        y = PeriodicFunction.from_samples(curve.y)
        dx = derivative(xper).samples + 1.0 / k
        dy = derivative(y).samples
        speed2 = (dx ** 2 + dy ** 2) * k ** 2
        assert np.max(np.abs(speed2 - conformal_metric(w).samples)) < 1e-10


def test_critical_self_intersection_threshold():
    a_star = critical_self_intersection_A(tol=1e-3, n_grid=1024)
    assert 0.4 < a_star < 0.5
    assert crapper_profile_injective(a_star - 0.05, 1024)
    assert not crapper_profile_injective(a_star + 0.05, 1024)
    with pytest.raises(ValueError):
        critical_self_intersection_A(tol=1e-5)


def test_segment_crossings_validation():
    with pytest.raises(ValueError):
        segment_crossings(np.zeros(3), np.zeros(3))
    with pytest.raises(ValueError):
        segment_crossings(np.zeros(8), np.zeros(4))
    # two crossing segments embedded in a zig-zag polyline
    x = np.array([0.0, 1.0, 1.0, 0.0])
    y = np.array([0.0, 1.0, 0.0, 1.0])
    hits = segment_crossings(x, y, backend="numpy")
    assert len(hits) == 1
    assert hits[0] == pytest.approx([0.5, 0.5], abs=1e-12)
