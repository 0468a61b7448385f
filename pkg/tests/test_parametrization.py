import numpy as np
import pytest

from vsmooth.exceptions import DimensionError
from vsmooth.exceptions import NotOrthonormalError
from vsmooth.parametrization import assemble
from vsmooth.parametrization import BasisMatrix
from vsmooth.parametrization import cayley_adjoint
from vsmooth.parametrization import cayley_dmap
from vsmooth.parametrization import cayley_map
from vsmooth.parametrization import CayleyChart
from vsmooth.parametrization import ParamPoint
from vsmooth.parametrization import project_Q
from vsmooth.parametrization import select_S
from vsmooth.testing import adjoint_identity
from vsmooth.testing import random_basis
from vsmooth.testing import random_laplacian
from vsmooth.testing import random_point


def test_skew_block_structure(rng):
    V = random_point(rng, 7, 3)
    M = assemble(V)
    np.testing.assert_array_equal(M, -M.T)
    np.testing.assert_array_equal(M[3:, 3:], 0.0)


def test_inner_is_frobenius(rng):
    V = random_point(rng, 6, 2)
    W = random_point(rng, 6, 2)
    assert V.inner(W) == pytest.approx(float(np.sum(assemble(V) * assemble(W))))
    assert V.norm() == pytest.approx(np.linalg.norm(assemble(V)))


def test_point_arithmetic(rng):
    V = random_point(rng, 5, 2)
    W = random_point(rng, 5, 2)
    np.testing.assert_allclose(assemble(V + 2 * W), assemble(V) + 2 * assemble(W))
    np.testing.assert_allclose(assemble(V - W), assemble(V) - assemble(W))
    np.testing.assert_array_equal(assemble(-V), -assemble(V))


def test_incompatible_points(rng):
    with pytest.raises(DimensionError):
        random_point(rng, 5, 2) + random_point(rng, 6, 2)

    with pytest.raises(DimensionError):
        ParamPoint(np.zeros((2, 2)), np.zeros((3, 1)))

    with pytest.raises(DimensionError):
        ParamPoint.zeros(3, 4)


def test_project_Q_identity_on_subspace(rng):
    V = random_point(rng, 8, 3)
    P = project_Q(assemble(V), 3)
    np.testing.assert_allclose(P.A, V.A)
    np.testing.assert_allclose(P.B, V.B)


def test_project_Q_symmetric_is_zero(rng):
    M = rng.standard_normal((5, 5))
    P = project_Q(M + M.T, 2)
    assert P.norm() == 0


def test_project_Q_example():
    P = project_Q(np.array([[0.0, 1.0], [0.0, 0.0]]), 1)
    np.testing.assert_array_equal(P.A, [[0.0]])
    np.testing.assert_array_equal(P.B, [[-0.5]])


def test_project_Q_self_adjoint(rng):
    M = rng.standard_normal((6, 6))
    N = rng.standard_normal((6, 6))
    lhs = float(np.sum(assemble(project_Q(M, 2)) * N))
    rhs = float(np.sum(M * assemble(project_Q(N, 2))))
    assert lhs == pytest.approx(rhs)


def test_project_Q_idempotent(rng):
    M = rng.standard_normal((6, 6))
    once = assemble(project_Q(M, 4))
    twice = assemble(project_Q(once, 4))
    np.testing.assert_array_equal(once, twice)


@pytest.mark.parametrize(("N", "k"), [(4, 1), (6, 2), (5, 5)])
def test_zero_maps_to_leading_columns(rng, N, k):
    S = random_basis(rng, N)
    U = cayley_map(S, ParamPoint.zeros(N, k))
    np.testing.assert_allclose(U, S.S[:, :k], atol=1e-15)


def test_two_by_two_example():
    S = BasisMatrix.identity(2)
    V = ParamPoint(np.zeros((1, 1)), np.array([[1.0]]))
    np.testing.assert_array_equal(assemble(V), [[0.0, -1.0], [1.0, 0.0]])
    np.testing.assert_allclose(cayley_map(S, V), [[0.0], [-1.0]], atol=1e-15)


@pytest.mark.parametrize(("N", "k"), [(10, 3), (6, 1), (20, 3)])
def test_stiefel_feasibility(rng, N, k):
    for _ in range(100):
        U = cayley_map(random_basis(rng, N), random_point(rng, N, k, scale=2.0))
        assert np.linalg.norm(U.T @ U - np.eye(k)) <= 1e-10


def test_map_checks_k(rng):
    with pytest.raises(DimensionError):
        cayley_map(random_basis(rng, 4), ParamPoint.zeros(4, 2), k=3)


def test_basis_must_be_orthogonal():
    with pytest.raises(NotOrthonormalError) as exc_info:
        BasisMatrix(np.array([[1.0, 0.1], [0.0, 1.0]]))

    assert "not orthonormal" in exc_info.value.format_message()


def test_differential_at_zero(rng):
    H = random_point(rng, 5, 2)
    expect = -2 * assemble(H)[:, :2]
    got = cayley_dmap(BasisMatrix.identity(5), ParamPoint.zeros(5, 2), H)
    np.testing.assert_allclose(got, expect, atol=1e-14)


def test_differential_of_zero(rng):
    S = random_basis(rng, 6)
    out = cayley_dmap(S, random_point(rng, 6, 2), ParamPoint.zeros(6, 2))
    np.testing.assert_array_equal(out, 0.0)


@pytest.mark.parametrize(("N", "k"), [(8, 2), (6, 1), (6, 3), (20, 1), (20, 3)])
def test_differential_matches_differences(rng, N, k):
    h = 1e-6

    for _ in range(100):
        S = random_basis(rng, N)
        V = random_point(rng, N, k)
        H = random_point(rng, N, k, scale=1.0)
        numeric = (cayley_map(S, V + h * H) - cayley_map(S, V - h * H)) / (2 * h)
        analytic = cayley_dmap(S, V, H)
        error = np.linalg.norm(numeric - analytic) / np.linalg.norm(analytic)
        assert error <= 1e-6


@pytest.mark.parametrize(("N", "k"), [(8, 2), (6, 1), (6, 3), (20, 1), (20, 3)])
def test_adjoint_identity(rng, N, k):
    for _ in range(100):
        chart = CayleyChart(random_basis(rng, N), random_point(rng, N, k))
        H = random_point(rng, N, k, scale=1.0)
        Z = rng.standard_normal((N, k))
        lhs, rhs = adjoint_identity(chart, H, Z)
        scale = np.linalg.norm(chart.differential(H)) * np.linalg.norm(Z)
        assert abs(lhs - rhs) <= 1e-10 * scale


def test_adjoint_examples(rng):
    S = BasisMatrix.identity(4)
    V = ParamPoint.zeros(4, 2)
    assert cayley_adjoint(S, V, np.zeros((4, 2))).norm() == 0

    Z = np.zeros((4, 2))
    Z[0, 0] = 1.0
    assert cayley_adjoint(S, V, Z).norm() == 0


def test_adjoint_shape(rng):
    with pytest.raises(DimensionError):
        cayley_adjoint(random_basis(rng, 4), ParamPoint.zeros(4, 2), np.zeros((4, 3)))


def test_chart_agrees_with_functions(rng):
    S = random_basis(rng, 7)
    V = random_point(rng, 7, 2)
    H = random_point(rng, 7, 2)
    chart = CayleyChart(S, V)
    np.testing.assert_array_equal(chart.point(), cayley_map(S, V))
    np.testing.assert_array_equal(chart.differential(H), cayley_dmap(S, V, H))


def test_select_S_without_warm_start():
    np.testing.assert_array_equal(select_S(N=4).S, np.eye(4))

    with pytest.raises(DimensionError):
        select_S()


def test_select_S_completes_identity_columns():
    U0 = np.eye(5, 2)
    S = select_S(U0)
    np.testing.assert_allclose(S.S[:, :2], U0, atol=1e-15)
    np.testing.assert_allclose(cayley_map(S, ParamPoint.zeros(5, 2)), U0, atol=1e-15)


def test_select_S_spans_eigenvectors(rng):
    L = random_laplacian(rng, 12)
    _, vectors = np.linalg.eigh(L)
    U0 = vectors[:, :3]
    U = cayley_map(select_S(U0), ParamPoint.zeros(12, 3))
    assert np.linalg.norm(U @ U.T - U0 @ U0.T) <= 1e-8
    np.testing.assert_allclose(U, U0, atol=1e-12)


def test_select_S_rejects_non_orthonormal():
    with pytest.raises(NotOrthonormalError):
        select_S(np.ones((4, 2)))

    with pytest.raises(DimensionError):
        select_S(np.eye(5, 2), N=4)
