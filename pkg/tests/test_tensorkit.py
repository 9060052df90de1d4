import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grwcurv.tensorkit import (
    DenseTensor,
    MetricPoint,
    TensorError,
    curvature_action,
    curvature_symmetry_deviation,
    dump,
    flat_metric,
    g_tensor,
    gram_fit,
    kulkarni_nomizu,
    norm,
    random_curvature_tensor,
    random_symmetric,
    ricci_operator_action,
    sym_outer_block,
    tachibana,
)
from oracles import action_loop, kn_loop, tachibana_loop


def _metric(rng, n, neg=0):
    P = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    return P.T @ flat_metric(n, neg) @ P


def test_kn_matches_loop(rng):
    E, T = random_symmetric(4, rng), random_symmetric(4, rng)
    assert np.allclose(kulkarni_nomizu(E, T).data, kn_loop(E, T), atol=1e-13)


def test_g_wedge_g_is_twice_G(rng):
    g = _metric(rng, 5, 1)
    G = g_tensor(g).data
    expected = np.einsum("ad,bc->abcd", g, g) - np.einsum("ac,bd->abcd", g, g)
    assert np.allclose(G, expected)
    assert np.allclose(kulkarni_nomizu(g, g).data, 2 * G)


def test_kn_of_symmetric_pair_is_curvature(rng):
    E, T = random_symmetric(5, rng), random_symmetric(5, rng)
    K = kulkarni_nomizu(E, T)
    assert K.symmetry == "generalized-curvature"
    assert curvature_symmetry_deviation(K) < 1e-14


@pytest.mark.parametrize("rank", [2, 4])
def test_tachibana_matches_loop(rng, rank):
    n = 3
    A = random_symmetric(n, rng)
    T = random_symmetric(n, rng) if rank == 2 else random_curvature_tensor(n, rng)
    assert np.allclose(tachibana(A, T).data, tachibana_loop(A, T), atol=1e-12)


@pytest.mark.parametrize("rank", [2, 4])
def test_curvature_action_matches_loop(rng, rank):
    n = 3
    g = _metric(rng, n, 1)
    gi = np.linalg.inv(g)
    B = random_curvature_tensor(n, rng)
    T = random_symmetric(n, rng) if rank == 2 else random_curvature_tensor(n, rng)
    assert np.allclose(curvature_action(B, gi, T).data, action_loop(B, gi, T), atol=1e-12)


def test_curvature_action_kills_metric(rng):
    g = _metric(rng, 4, 1)
    R = random_curvature_tensor(4, rng)
    assert norm(curvature_action(R, np.linalg.inv(g), g)) < 1e-12 * norm(R)


def test_tachibana_of_metric_with_G_vanishes(rng):
    g = _metric(rng, 4)
    assert norm(tachibana(g, g_tensor(g))) < 1e-12


def test_q_g_s_vanishes_iff_einstein(rng):
    g = _metric(rng, 4)
    assert norm(tachibana(g, 3.0 * g)) < 1e-12
    assert norm(tachibana(g, random_symmetric(4, rng))) > 1e-3


def test_sym_outer_block(rng):
    g, S = random_symmetric(3, rng), random_symmetric(3, rng)
    W = sym_outer_block(g, S)
    m, b, c, d = 2, 0, 1, 2
    assert W[m, b, c, d] == pytest.approx(g[b, c] * S[m, d] - g[b, d] * S[m, c])


def test_ricci_operator_action(rng):
    g = _metric(rng, 3)
    gi = np.linalg.inv(g)
    S = random_symmetric(3, rng)
    R = random_curvature_tensor(3, rng)
    V = ricci_operator_action(S, gi, R).data
    h, i, j, k = 1, 0, 2, 1
    ref = sum(S[h, l] * gi[l, m] * R[m, i, j, k] for l in range(3) for m in range(3))
    assert V[h, i, j, k] == pytest.approx(ref)


def test_dense_tensor_rejects_bad_symmetry():
    with pytest.raises(TensorError):
        DenseTensor(np.array([[0.0, 1.0], [0.0, 0.0]]), "symmetric-pair")
    with pytest.raises(TensorError):
        DenseTensor(np.ones((3, 3, 3, 3)), "generalized-curvature")
    with pytest.raises(TensorError):
        DenseTensor(np.ones((2, 3)))
    with pytest.raises(TensorError):
        DenseTensor(np.eye(2), "hermitian")


def test_ref_scale_tolerates_rounding_sized_tensors(rng):
    R = random_curvature_tensor(4, rng)
    noise = 1e-17 * rng.standard_normal((4,) * 4)
    with pytest.raises(TensorError):
        DenseTensor(noise, "generalized-curvature")
    DenseTensor(noise, "generalized-curvature", ref_scale=float(np.max(np.abs(R))))


def test_metric_point_signature_and_errors():
    mp = MetricPoint(flat_metric(4, 1))
    assert mp.signature == (1, 3)
    with pytest.raises(TensorError):
        MetricPoint(np.diag([1.0, 0.0, 1.0]))
    with pytest.raises(TensorError):
        MetricPoint(flat_metric(3), signature=(1, 2))


def test_gram_fit_recovers_coefficients(rng):
    B1, B2 = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    fit = gram_fit(2.5 * B1 - 0.5 * B2, [B1, B2])
    assert np.allclose(fit.coefficients, [2.5, -0.5])
    assert fit.residual < 1e-14 and not fit.rank_deficient


def test_gram_fit_flags_dependent_basis(rng):
    B = rng.standard_normal((3, 3))
    fit = gram_fit(B, [B, 2 * B])
    assert fit.rank_deficient and fit.rank == 1


def test_gram_fit_residual_of_orthogonal_target():
    B = np.zeros((2, 2))
    B[0, 0] = 1.0
    D = np.zeros((2, 2))
    D[1, 1] = 3.0
    fit = gram_fit(D, [B])
    assert fit.coefficients[0] == pytest.approx(0.0)
    assert fit.residual == pytest.approx(1.0)


def test_dump_uses_17_digits():
    T = np.zeros((2, 2))
    T[0, 1] = 1 / 3
    assert dump(T) == [((0, 1), "0.33333333333333331")]


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(3, 5), neg=st.integers(0, 1))
def test_random_curvature_tensor_has_symmetries(seed, n, neg):
    R = random_curvature_tensor(n, np.random.default_rng(seed))
    assert curvature_symmetry_deviation(R) < 1e-13


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_tachibana_antisymmetric_in_last_pair(seed):
    rng = np.random.default_rng(seed)
    A = random_symmetric(4, rng)
    R = random_curvature_tensor(4, rng)
    Q = tachibana(A, R).data
    assert np.allclose(Q, -Q.swapaxes(4, 5), atol=1e-12)
