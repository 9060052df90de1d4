import numpy as np
import pytest

from grwcurv.conditionlab import check_sr2
from grwcurv.gaussfiber import (
    GaussError,
    HypersurfaceData,
    catalog_gauss,
    diagonal_fixture,
    e1_lambda,
    e2_check,
    e3_check,
    e4_check,
    gauss_kappa,
    gauss_snapshot,
    jordan3_fixture,
    nilpotent_fixture,
    sr2_from_e4,
    with_lambda,
)
from grwcurv.tensorkit import norm
from oracles import kn_loop


@pytest.mark.parametrize("m", [3, 4, 6])
def test_e1_umbilic_identity(m):
    # A = I: 1 = m + lambda
    r = e1_lambda(diagonal_fixture(np.ones(m), 1.0))
    assert r.success and r.lam == pytest.approx(1.0 - m)


def test_e1_diagonal_example():
    r = e1_lambda(diagonal_fixture([1, 2, 0, 0], 20.0))
    assert r.success and r.lam == pytest.approx(-2.0)


def test_e1_fails_for_three_distinct_nonzero_eigenvalues():
    r = e1_lambda(diagonal_fixture([1, 2, 3], 1.0))
    assert not r.success
    with pytest.raises(GaussError):
        with_lambda(diagonal_fixture([1, 2, 3], 1.0))


@pytest.mark.parametrize("blocks", [[3], [3, 1], [2, 1, 1], [3, 2]])
def test_e1_nilpotent(blocks):
    data = nilpotent_fixture(blocks, -6.0)
    r = e1_lambda(data)
    assert r.success and r.lam == pytest.approx(0.0, abs=1e-15)
    A = data.A
    assert norm(np.linalg.matrix_power(A, max(blocks))) == 0.0


@pytest.mark.parametrize("sign", [1, -1])
def test_gauss_curvature_against_loop(sign):
    data = diagonal_fixture([1, 2, 0, 0], 20.0, gauss_sign=sign)
    gt, H = data.gt, data.H
    c = 20.0 / (4 * 5)
    R_ref = 0.5 * sign * kn_loop(H, H) + 0.5 * c * kn_loop(gt, gt)
    snap = gauss_snapshot(data)
    assert np.allclose(snap.R.data, R_ref, atol=1e-14)
    assert snap.kappa == pytest.approx(gauss_kappa(data))


def test_diagonal_example_values():
    data = with_lambda(diagonal_fixture([1, 2, 0, 0], 20.0))
    A = data.A
    part = np.trace(A) * A - A @ A
    assert sorted(np.diag(part)) == pytest.approx([0, 0, 2, 2])
    r2, rc = e2_check(data)
    assert r2 <= 1e-12 and rc <= 1e-12
    assert e3_check(data) <= 1e-12
    e4 = e4_check(data)
    assert not e4.holds and not e4.lambda_zero


@pytest.mark.parametrize("dim,tau", [(3, -12.0), (4, -20.0), (5, 7.0)])
def test_jordan_fixture_satisfies_e4_and_sr2(dim, tau):
    data = jordan3_fixture(dim, tau)
    assert data.gt.shape == (dim, dim)
    e4 = e4_check(data)
    assert e4.holds and e4.trace_dev == 0.0
    assert sr2_from_e4(data) <= 1e-12
    assert check_sr2(gauss_snapshot(data), data.c) <= 1e-12
    r2, rc = e2_check(data)
    assert r2 <= 1e-12 and rc <= 1e-12


def test_jordan_fixture_metric_is_lorentzian():
    data = jordan3_fixture(4, 1.0)
    ev = np.linalg.eigvalsh(data.gt)
    assert np.sum(ev < 0) == 1
    # shape operator self-adjoint: g A symmetric
    assert np.allclose(data.gt @ data.A, (data.gt @ data.A).T)


def test_e3_skipped_in_dim3():
    assert e3_check(jordan3_fixture(3, 1.0)) is None


def test_diagonal_with_lambda_zero_is_einstein_like():
    data = with_lambda(diagonal_fixture([2, 0, 0, 0], 12.0))
    assert data.lam == pytest.approx(0.0)
    assert e4_check(data).lambda_zero


def test_validation():
    with pytest.raises(GaussError):
        HypersurfaceData(np.eye(2), np.zeros((2, 2)), 1.0)
    with pytest.raises(GaussError):
        HypersurfaceData(np.eye(3), np.triu(np.ones((3, 3))), 1.0)
    with pytest.raises(GaussError):
        HypersurfaceData(np.eye(3), np.eye(3), 1.0, gauss_sign=0)
    with pytest.raises(GaussError):
        nilpotent_fixture([4], 1.0)
    with pytest.raises(GaussError):
        catalog_gauss("spiral", {})


def test_catalog():
    d = catalog_gauss("nilpotent", {"blocks": [3, 2], "tau": -30.0})
    assert d.fiber_dim == 5 and d.n == 6 and d.c == pytest.approx(-1.0)
    d = catalog_gauss("diagonal", {"eigs": [1, 2, 0, 0], "tau": 20.0, "gauss_sign": -1})
    assert d.gauss_sign == -1
