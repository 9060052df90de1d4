import numpy as np
import pytest

from grwcurv.chartgeo import (
    GeometryError,
    christoffel,
    conformal_field,
    flat_field,
    flat_snapshot,
    max_trace_of_weyl,
    product_field,
    product_of_spheres,
    random_curvature_snapshot,
    random_metric_field,
    random_snapshot,
    ricci_from,
    sample_points,
    snapshot_from_field,
    space_form_snapshot,
    sphere_field,
    synthetic_snapshot,
    two_jet,
)
from grwcurv.tensorkit import norm
from oracles import christoffel_fd, sphere_metric


def test_unit_three_sphere_scalar_curvature():
    snap = snapshot_from_field(sphere_field(3), [0.7, 1.1, 0.3])
    assert snap.kappa == pytest.approx(6.0, rel=1e-12)
    assert norm(snap.S.data - 2.0 * snap.g.data) < 1e-12
    assert norm(snap.C) < 1e-12 * norm(snap.R)


def test_sphere_radius_scaling():
    snap = snapshot_from_field(sphere_field(3, radius=2.0), [0.7, 1.1, 0.3])
    assert snap.kappa == pytest.approx(6.0 / 4.0, rel=1e-12)


def test_s2xs2_is_einstein_not_conformally_flat(s2xs2):
    assert s2xs2.kappa == pytest.approx(4.0)
    assert np.allclose(s2xs2.S.data, s2xs2.g.data)
    assert norm(s2xs2.C) > 1.0
    assert max_trace_of_weyl(s2xs2) < 1e-14


def test_closed_jet_matches_ad_jet():
    fld = product_field(sphere_field(2), sphere_field(3))
    x = np.array([0.9, 0.4, 1.2, 0.8, 2.0])
    closed = two_jet(fld, x, method="closed")
    ad = two_jet(fld, x, method="ad")
    for a, b in zip(closed, ad):
        assert np.allclose(a, b, atol=1e-12)


def test_christoffel_against_finite_differences():
    x = np.array([0.8, 1.3, 0.2])
    G = christoffel(two_jet(sphere_field(3), x))
    assert np.allclose(G, christoffel_fd(sphere_metric, x), atol=1e-8)


def test_christoffel_random_field_against_finite_differences():
    fld = random_metric_field(4, 1, seed=5)
    x = sample_points(fld, 1, seed=5)[0]
    G = christoffel(two_jet(fld, x))
    assert np.allclose(G, christoffel_fd(fld.g, x), atol=1e-8)
    assert np.allclose(G, G.transpose(0, 2, 1))


def test_metric_compatibility_of_christoffel():
    fld = random_metric_field(4, 1, seed=2)
    x = sample_points(fld, 1, seed=2)[0]
    g, dg, _ = two_jet(fld, x)
    G = christoffel((g, dg, None))
    # d_c g_ab = Gamma^m_{ca} g_mb + Gamma^m_{cb} g_am
    rhs = np.einsum("mca,mb->cab", G, g) + np.einsum("mcb,am->cab", G, g)
    assert np.allclose(dg, rhs, atol=1e-12)


def test_field_snapshot_matches_exact_snapshot():
    fld = sphere_field(4)
    x = np.array([0.9, 1.4, 0.7, 0.1])
    a = snapshot_from_field(fld, x)
    b = fld.exact(x)
    assert norm(a.R.data - b.R.data) <= 1e-10 * norm(b.R)


def test_random_field_ad_matches_closed():
    fld = random_metric_field(5, 1, seed=11)
    x = sample_points(fld, 1, seed=11)[0]
    a = snapshot_from_field(fld, x, method="closed")
    b = snapshot_from_field(fld, x, method="ad")
    assert norm(a.R.data - b.R.data) <= 1e-10 * norm(a.R)
    assert a.signature == (1, 4)


def test_conformally_flat_field_has_zero_weyl():
    snap = snapshot_from_field(conformal_field(4, [0.3, -0.2, 0.1, 0.4], 1), [0.1, 0.2, 0.3, 0.4])
    assert norm(snap.C) < 1e-10 * norm(snap.R)


def test_flat_field_is_flat():
    snap = snapshot_from_field(flat_field(4, 1), np.zeros(4))
    assert norm(snap.R) == 0.0 and snap.signature == (1, 3)


def test_space_form():
    snap = space_form_snapshot(5, 20.0 / 4.0 * 4.0, signature=1)
    c = snap.kappa / (4 * 5)
    assert norm(snap.R.data - c * snap.G.data) < 1e-12
    assert snap.signature == (1, 4)


def test_ricci_from_and_weyl_traceless(rng):
    snap = random_curvature_snapshot(5, rng, negatives=2)
    assert np.allclose(snap.S.data, ricci_from(snap.g_inv.data, snap.R.data))
    assert max_trace_of_weyl(snap) < 1e-12


def test_dimension_three_weyl_vanishes(rng):
    snap = random_curvature_snapshot(3, rng)
    assert norm(snap.C) < 1e-12 * norm(snap.R)


def test_scaled_snapshot():
    snap = random_snapshot(4, seed=3, negatives=1)
    s2 = snap.scaled(3.0)
    assert s2.kappa == pytest.approx(snap.kappa / 9.0)
    assert np.allclose(s2.S.data, snap.S.data)


def test_singular_metric_rejected():
    fld = sphere_field(3)
    with pytest.raises(GeometryError):
        snapshot_from_field(fld, [0.0, 1.0, 0.5])


def test_point_shape_checked():
    with pytest.raises(GeometryError):
        two_jet(flat_field(3), [0.0, 0.0])


def test_synthetic_snapshot_rejects_non_curvature():
    with pytest.raises(GeometryError):
        synthetic_snapshot(np.eye(3), np.ones((3, 3, 3, 3)))


def test_product_of_spheres_dims():
    snap = product_of_spheres(2, 3)
    assert snap.dim == 5 and snap.kappa == pytest.approx(2.0 + 6.0)
    assert flat_snapshot(4).kappa == 0.0


def test_sample_points_are_deterministic():
    fld = random_metric_field(4, 0, seed=1)
    a = sample_points(fld, 3, seed=9)
    b = sample_points(fld, 3, seed=9)
    assert all(np.array_equal(p, q) for p, q in zip(a, b))
