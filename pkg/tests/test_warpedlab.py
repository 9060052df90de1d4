import numpy as np
import pytest
import sympy as sp

from grwcurv.chartgeo import (
    christoffel,
    flat_field,
    product_field,
    product_of_spheres,
    random_curvature_snapshot,
    snapshot_from_field,
    sphere_field,
    two_jet,
)
from grwcurv.conditionlab import products
from grwcurv.tensorkit import norm
from grwcurv.warpedlab import (
    WarpedSpec,
    WarpingError,
    admissible_points,
    b8_check,
    b9_residual,
    catalog_warp,
    custom,
    exponential,
    quadratic,
    sinusoidal,
    vrs_residual,
    warp_scalars,
    warped_blocks,
    warped_christoffel,
    warped_field,
    warped_snapshot,
    warping_jet,
)

x, b, c, C1 = sp.symbols("x b c C1", real=True)


def _ode(F, eps):
    return sp.simplify(F * sp.diff(F, x, 2) - sp.diff(F, x) ** 2 + 2 * eps * C1 * F)


@pytest.mark.parametrize("eps", [1, -1])
@pytest.mark.parametrize("s", [1, -1])
def test_exponential_family_solves_ode_symbolically(eps, s):
    k = s * b / 2
    K = 2 * eps * C1 / (b**2 * c)
    F = c / 2 * (sp.exp(k * x) - K * sp.exp(-k * x)) ** 2
    assert _ode(F, eps) == 0


@pytest.mark.parametrize("eps", [1, -1])
def test_sinusoidal_amplitude(eps):
    corrected = 2 * eps * C1 / c**2 * (1 + sp.sin(c * x + b))
    printed = 2 * eps * C1 / c * (1 + sp.sin(c * x + b))
    assert _ode(corrected, eps) == 0
    assert _ode(printed, eps) != 0


def test_numeric_jets_match_closed_forms():
    for fn in (quadratic(2, 3), exponential(1.3, 0.7, 0.4, -1, sign=-1),
               sinusoidal(0.2, 1.7, 0.5, 1)):
        for xv in admissible_points(fn, 4):
            j = warping_jet(fn, xv)
            h = 1e-4
            f = [float(fn.value(xv + d * h)) for d in (-1, 0, 1)]
            assert j.F == pytest.approx(f[1], rel=1e-13)
            assert j.Fp == pytest.approx((f[2] - f[0]) / (2 * h), rel=1e-6, abs=1e-8)
            assert j.Fpp == pytest.approx((f[2] - 2 * f[1] + f[0]) / h**2, rel=1e-4, abs=1e-5)


def test_custom_jet_by_ad():
    fn = custom(lambda t, xp=np: 2.0 + xp.sin(t) + t**2)
    j = warping_jet(fn, 0.4)
    assert j.Fp == pytest.approx(np.cos(0.4) + 0.8)
    assert j.Fpp == pytest.approx(-np.sin(0.4) + 2.0)


def test_b9_residuals():
    fams = [(exponential(1.0, 2.0, 1 / 3, -1), -1), (sinusoidal(0.0, 1.5, 1 / 3, 1), 1)]
    for fn, eps in fams:
        for xv in admissible_points(fn, 10):
            assert b9_residual(fn, xv, eps, 1 / 3) <= 1e-12
    printed = sinusoidal(0.0, 1.5, 1 / 3, 1, printed=True)
    assert b9_residual(printed, 0.3, 1, 1 / 3) > 1e-3


def test_printed_sinusoidal_example_conflict():
    # eps = -1, c = -1, C1 = 1/3, b = 0: the printed prefactor gives F(0) = 2/3 ...
    printed = sinusoidal(0.0, -1.0, 1 / 3, -1, printed=True)
    assert printed.printed_constraint_holds()
    assert warping_jet(printed, 0.0).F == pytest.approx(2 / 3)
    assert b9_residual(printed, 0.0, -1, 1 / 3) > 1e-3
    # ... while the prefactor that solves the ODE is negative there
    with pytest.raises(WarpingError):
        warping_jet(sinusoidal(0.0, -1.0, 1 / 3, -1), 0.0)


def test_positivity_enforced():
    with pytest.raises(WarpingError):
        warping_jet(quadratic(1.0, 0.0), 0.0)
    with pytest.raises(WarpingError):
        exponential(1.0, -1.0, 0.2, 1)


def test_catalog_rejects_unknown_family():
    with pytest.raises(WarpingError):
        catalog_warp("cubic", {})


def test_christoffel_block_values():
    fld = warped_field(-1, quadratic(2, 3), flat_field(3))
    G = christoffel(two_jet(fld, [1.0, 0.1, 0.2, 0.3], method="ad"))
    # F(1) = 25, F'(1) = 20
    assert np.allclose(np.diag(G[0, 1:, 1:]), 10.0)
    assert np.allclose(np.diag(G[1:, 0, 1:]), 0.4)
    fld = warped_field(1, quadratic(2, 3), flat_field(3))
    G = christoffel(two_jet(fld, [1.0, 0.1, 0.2, 0.3], method="ad"))
    assert np.allclose(np.diag(G[0, 1:, 1:]), -10.0)


@pytest.mark.parametrize("eps", [1, -1])
def test_closed_christoffel_blocks_match_ad(eps):
    fib = product_field(sphere_field(2), sphere_field(2))
    fn = exponential(1.0, 2.0, 0.4, -1)
    pt = np.array([0.2, 0.9, 0.3, 1.1, 0.6])
    G = christoffel(two_jet(warped_field(eps, fn, fib), pt, method="ad"))
    assert np.allclose(warped_christoffel(eps, fn, fib, pt), G, atol=1e-12)


def test_scalar_formulas_by_hand():
    # F = (2x+3)^2 at x = 1: F = 25, F' = 20, F'' = 8, T11 = 0, Delta1F = eps F'^2
    sc = warp_scalars(warping_jet(quadratic(2, 3), 1.0), -1)
    assert sc.T11 == pytest.approx(0.0) and sc.trT == pytest.approx(0.0)
    assert sc.Delta1F_over_4F == pytest.approx(-400 / 100)


@pytest.mark.parametrize("eps", [1, -1])
@pytest.mark.parametrize("fiber", ["S3", "S2xS2"])
def test_closed_form_matches_ad(eps, fiber):
    fib = sphere_field(3) if fiber == "S3" else product_field(sphere_field(2), sphere_field(2))
    fn = sinusoidal(0.3, 1.2, 0.4, 1)
    wf = warped_field(eps, fn, fib)
    rng = np.random.default_rng(4)
    for _ in range(3):
        y = rng.uniform(0.6, 1.2, size=fib.dim)
        x1 = float(rng.uniform(-0.5, 0.5))
        closed = warped_snapshot(WarpedSpec(eps, fn, x1, snapshot_from_field(fib, y)))
        ad = snapshot_from_field(wf, np.concatenate([[x1], y]), method="ad")
        assert norm(ad.R.data - closed.R.data) <= 1e-9 * norm(closed.R)
        assert norm(ad.S.data - closed.S.data) <= 1e-9 * max(norm(closed.S), 1.0)
        assert ad.kappa == pytest.approx(closed.kappa, rel=1e-9, abs=1e-9)


def test_closed_ricci_equals_contraction(rng):
    fiber = random_curvature_snapshot(4, rng, negatives=1)
    snap = warped_snapshot(WarpedSpec(1, exponential(0.8, 1.1, -0.3, 1), 0.2, fiber))
    S = np.einsum("hk,hijk->ij", snap.g_inv.data, snap.R.data)
    assert norm(S - snap.S.data) <= 1e-12 * norm(S)


def test_block_formulas_against_generic(rng):
    for _ in range(5):
        fiber = random_curvature_snapshot(int(rng.integers(3, 5)), rng,
                                          negatives=int(rng.integers(2)))
        spec = WarpedSpec(int(rng.choice([-1, 1])), exponential(1.2, 0.9, 0.7, -1), 0.3, fiber)
        p = products(warped_snapshot(spec))
        asm = warped_blocks(spec).assembled()
        for key, ref in (("QgR", p.QgR), ("QSR", p.QSR), ("V", p.V), ("P", p.P)):
            assert norm(asm[key] - ref) <= 1e-10 * norm(ref), key
        assert vrs_residual(spec) <= 1e-10


def test_b8_on_einstein_fiber():
    s22 = product_of_spheres(2, 2)
    fn = exponential(1.0, 2.0, 1 / 3, -1)
    for xv in admissible_points(fn, 5):
        assert b8_check(warping_jet(fn, xv), -1, s22.kappa, 5) <= 1e-12


def test_fiber_dimension_checked(rng):
    with pytest.raises(WarpingError):
        WarpedSpec(1, quadratic(1, 2), 0.0, random_curvature_snapshot(2, rng))
    with pytest.raises(WarpingError):
        WarpedSpec(0, quadratic(1, 2), 0.0, product_of_spheres(3))
