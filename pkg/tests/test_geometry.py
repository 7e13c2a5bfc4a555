import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from robinlayer.geometry import (
    CurveSpec,
    PeriodicCell,
    build_arc_curve,
    curvature_peak,
    curve_from_mapping,
    flat_well_profile,
    is_simple,
    min_layer_width,
    read_points_csv,
)

PRESETS = ["circle", "ellipse", "perturbed_circle", "flat_well", "stadium"]


def preset(name, n, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_arc_curve(CurveSpec.preset(name, **kw), n)


def ellipse_samples(m, a=2.0, b=1.0):
    t = 2 * np.pi * np.arange(m) / m
    return np.column_stack([a * np.cos(t), b * np.sin(t)])


def test_circle_length_and_curvature():
    c = preset("circle", 256, R=1.0)
    assert c.length == pytest.approx(2 * math.pi, abs=1e-12)
    assert np.allclose(c.kappa, 1.0, atol=1e-12)


def test_ellipse_extremes_at_major_vertices():
    c = preset("ellipse", 512, a=2.0, b=1.0)
    i = int(np.argmax(c.kappa))
    assert c.kappa[i] == pytest.approx(2.0, abs=1e-12)
    assert abs(abs(c.position[i, 0]) - 2.0) < 1e-12
    assert np.min(c.kappa) == pytest.approx(0.25, abs=1e-4)


def test_ellipse_turning_number():
    c = preset("ellipse", 512, a=2.0, b=1.0)
    assert abs(c.turning() - 2 * math.pi) < 1e-6


@pytest.mark.parametrize("name", PRESETS)
def test_turning_number_every_closed_preset(name):
    c = preset(name, 512)
    assert abs(c.turning() - 2 * math.pi) <= 10 * c.h**2 * 2 * math.pi


@pytest.mark.parametrize("name", PRESETS)
def test_min_layer_width_positive(name):
    c = preset(name, 256)
    w = min_layer_width(c)
    assert 0 < w < math.inf
    assert np.all(1 - w * c.kappa >= 0.5 - 1e-15)


def test_min_layer_width_examples():
    assert min_layer_width(preset("circle", 256)) == pytest.approx(0.5)
    assert min_layer_width(preset("ellipse", 512)) == pytest.approx(0.25)
    assert min_layer_width(PeriodicCell.preset("free")) == math.inf


def test_min_layer_width_concave_open_arc_is_unbounded():
    t = np.linspace(0.0, 1.0, 40)
    arc = build_arc_curve(CurveSpec.sampled(np.column_stack([np.cos(-t), np.sin(-t)]), closed=False), 64)
    assert np.all(arc.kappa < 0)
    assert min_layer_width(arc) == math.inf


def test_peak_circle_is_flat():
    pk = curvature_peak(preset("circle", 256))
    assert pk.flat and pk.kappa2 == 0.0


def test_peak_ellipse_two_maxima():
    c = preset("ellipse", 1024)
    pk = curvature_peak(c)
    assert not pk.flat
    assert pk.kappa_max == pytest.approx(2.0, abs=1e-12)
    assert len(pk.maxima) == 2
    gap = abs(pk.maxima[1] - pk.maxima[0])
    assert gap == pytest.approx(c.length / 2, rel=1e-6)
    # at the major vertex kappa'' = -3a(a^2 - b^2)/b^4
    assert pk.kappa2 == pytest.approx(-18.0, rel=1e-3)


def test_peak_perturbed_circle_against_fine_grid():
    coarse = preset("perturbed_circle", 256, R=1.0, eps=0.1, m=2)
    fine = preset("perturbed_circle", 16 * 256, R=1.0, eps=0.1, m=2)
    pk = curvature_peak(coarse)
    i = int(np.argmax(fine.kappa))
    k = fine.kappa
    k2_fine = (k[(i + 1) % k.size] - 2 * k[i] + k[i - 1]) / fine.h**2
    assert pk.kappa_max == pytest.approx(k.max(), rel=1e-2)
    assert pk.kappa2 == pytest.approx(k2_fine, rel=1e-2)


def test_stadium_has_flat_maximum_and_warns():
    with pytest.warns(UserWarning, match="C\\^\\{1,1\\}"):
        c = build_arc_curve(CurveSpec.preset("stadium", R=1.0, ell=2.0), 512)
    assert curvature_peak(c).flat


def test_flat_well_profile_quartic_maximum():
    kappa, k0 = flat_well_profile(2, 1.0, 2 * math.pi)
    s = np.array([1e-2, 2e-2])
    drop = k0 - kappa(s)
    assert np.allclose(drop / s**4, 1.0, rtol=1e-3)
    curve = preset("flat_well", 512)
    assert np.min(curve.kappa) > 0
    assert len(curvature_peak(curve).maxima) == 2


def test_sampled_curve_second_order():
    errs = []
    for m in (128, 256, 512):
        sampled = build_arc_curve(CurveSpec.sampled(ellipse_samples(m)), m)
        exact = preset("ellipse", m)
        errs.append(np.max(np.abs(sampled.kappa - exact.kappa)))
    for e0, e1 in zip(errs, errs[1:]):
        assert 3.5 <= e0 / e1 <= 4.5


def test_sampled_orientation_is_normalized():
    pts = ellipse_samples(200)[::-1]
    c = build_arc_curve(CurveSpec.sampled(pts), 256)
    assert c.turning() == pytest.approx(2 * math.pi, rel=1e-4)


def test_rejects_self_intersection():
    t = 2 * np.pi * np.arange(64) / 64
    eight = np.column_stack([np.sin(t), np.sin(t) * np.cos(t)])
    assert not is_simple(eight)
    with pytest.raises(ValueError, match="simple"):
        build_arc_curve(CurveSpec.sampled(eight), 128)


@pytest.mark.parametrize(
    "kw",
    [
        dict(kind="preset", name="ellipse", params={"a": 1.0, "b": 2.0}),
        dict(kind="preset", name="circle", params={"R": -1.0}),
        dict(kind="preset", name="circle", params={"Q": 1.0}),
        dict(kind="preset", name="hexagon"),
        dict(kind="sampled", points=np.zeros((8, 2))),
        dict(kind="other"),
    ],
)
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        CurveSpec(**kw)


def test_consecutive_duplicates_rejected():
    pts = ellipse_samples(32)
    pts[5] = pts[4]
    with pytest.raises(ValueError, match="distinct"):
        CurveSpec.sampled(pts)


def test_build_needs_32_nodes():
    with pytest.raises(ValueError):
        build_arc_curve(CurveSpec.preset("circle"), 16)


def test_csv_round_trip(tmp_path):
    path = tmp_path / "pts.csv"
    pts = ellipse_samples(300)
    np.savetxt(path, pts, delimiter=",", header="x,y", comments="")
    assert np.allclose(read_points_csv(path), pts)
    c = curve_from_mapping({"kind": "csv", "path": "pts.csv", "n": 256}, base_dir=tmp_path)
    assert c.length == pytest.approx(preset("ellipse", 256).length, rel=1e-6)


def test_mapping_preset():
    c = curve_from_mapping({"kind": "ellipse", "a": 2.0, "b": 1.0, "n": 512})
    assert c.n == 512 and np.max(c.kappa) == pytest.approx(2.0)


def test_resample_keeps_spec():
    c = preset("ellipse", 256)
    assert np.max(c.at(1024).kappa) == pytest.approx(2.0)


def test_periodic_cell_presets():
    cell = PeriodicCell.preset("cosine", n=128, mean=1.0, amplitude=1.0)
    assert cell.kappa[0] == pytest.approx(2.0)
    assert np.min(cell.kappa) == pytest.approx(0.0, abs=1e-12)
    assert np.all(PeriodicCell.preset("constant", value=0.5).kappa == 0.5)
    with pytest.raises(ValueError):
        PeriodicCell.preset("cosine", mean=1.0, slope=2.0)


@given(a=st.floats(1.0, 4.0), ratio=st.floats(0.3, 1.0))
def test_ellipse_property(a, ratio):
    b = a * ratio
    c = preset("ellipse", 256, a=a, b=b)
    assert abs(c.turning() - 2 * math.pi) <= 10 * c.h**2 * 2 * math.pi
    assert np.max(c.kappa) == pytest.approx(a / b**2, rel=1e-9)
    assert min_layer_width(c) == pytest.approx(b**2 / (2 * a), rel=1e-9)


@given(R=st.floats(0.1, 10.0))
def test_circle_property(R):
    c = preset("circle", 64, R=R)
    assert np.allclose(c.kappa, 1 / R)
    assert c.length == pytest.approx(2 * math.pi * R)


@given(eps=st.floats(0.01, 0.3), m=st.integers(2, 5))
def test_perturbed_circle_turning_property(eps, m):
    c = preset("perturbed_circle", 512, R=1.0, eps=eps, m=m)
    assert abs(c.turning() - 2 * math.pi) <= 10 * c.h**2 * 2 * math.pi
