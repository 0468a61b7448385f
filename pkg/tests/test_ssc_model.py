import numpy as np
import pytest

from vsmooth import solver
from vsmooth.clustering import sc_baseline
from vsmooth.exceptions import ConfigError
from vsmooth.exceptions import DimensionError
from vsmooth.parametrization import BasisMatrix
from vsmooth.parametrization import ParamPoint
from vsmooth.parametrization import select_S
from vsmooth.penalties import moreau_value
from vsmooth.penalties import PenaltyKind
from vsmooth.penalties import PenaltySpec
from vsmooth.solver import rate_envelope_check
from vsmooth.solver import SolverConfig
from vsmooth.ssc_model import g_chain_grad
from vsmooth.ssc_model import h_grad
from vsmooth.ssc_model import h_value
from vsmooth.ssc_model import smoothed_grad
from vsmooth.ssc_model import smoothed_value
from vsmooth.ssc_model import SscProblem
from vsmooth.ssc_model import unsmoothed_value
from vsmooth.testing import directional_check
from vsmooth.testing import random_basis
from vsmooth.testing import random_laplacian
from vsmooth.testing import random_penalty
from vsmooth.testing import random_point
from vsmooth.testing import random_step
from vsmooth.testing import ssc_instance


def test_h_identity_laplacian(rng):
    U = random_basis(rng, 6).S[:, :2]
    assert h_value(np.eye(6), U) == pytest.approx(2.0)


def test_h_at_eigenvectors(rng):
    L = random_laplacian(rng, 10)
    values, vectors = np.linalg.eigh(L)
    assert h_value(L, vectors[:, :3]) == pytest.approx(values[:3].sum())


def test_h_grad_matches_differences(rng):
    L = random_laplacian(rng, 8)
    U = rng.standard_normal((8, 2))
    D = rng.standard_normal((8, 2))
    h = 1e-6
    numeric = (h_value(L, U + h * D) - h_value(L, U - h * D)) / (2 * h)
    assert numeric == pytest.approx(float(np.sum(h_grad(L, U) * D)), rel=1e-6)


def test_h_shapes():
    with pytest.raises(DimensionError):
        h_value(np.eye(3), np.zeros((4, 1)))


def test_chain_example():
    L = np.array([[1.0, -1.0], [-1.0, 1.0]])
    problem = SscProblem(L, 1, PenaltySpec.l1(1.0), BasisMatrix.identity(2))
    out = g_chain_grad(problem, np.array([[1.0], [0.0]]), 0.5)
    np.testing.assert_allclose(out, [[2.0], [0.0]])


def test_chain_without_penalty(rng):
    problem = ssc_instance(rng, PenaltySpec.mcp(0.0, 1.0), N=6, k=2)
    U = random_basis(rng, 6).S[:, :2]
    np.testing.assert_array_equal(g_chain_grad(problem, U, 0.3), 0.0)


@pytest.mark.parametrize("kind", list(PenaltyKind))
def test_chain_matches_differences(kind, rng):
    p = random_penalty(rng, kind)
    mu = random_step(rng, p, low=0.01)
    problem = ssc_instance(rng, p, N=8, k=2)
    U = rng.standard_normal((8, 2))
    D = rng.standard_normal((8, 2))
    h = 1e-7

    def env(X):
        return moreau_value(p, mu, X @ X.T)

    numeric = (env(U + h * D) - env(U - h * D)) / (2 * h)
    analytic = float(np.sum(g_chain_grad(problem, U, mu) * D))
    scale = np.linalg.norm(g_chain_grad(problem, U, mu)) * np.linalg.norm(D)
    assert abs(numeric - analytic) <= 1e-5 * max(scale, 1.0)


@pytest.mark.parametrize("kind", list(PenaltyKind))
def test_full_chain_gradient(kind, rng):
    p = random_penalty(rng, kind)
    problem = ssc_instance(rng, p, N=20, k=3)

    for _ in range(20):
        V = random_point(rng, 20, 3)
        H = random_point(rng, 20, 3, scale=1.0)
        mu = random_step(rng, p, low=0.01)
        assert directional_check(problem, V, mu, H * (1 / H.norm())) <= 1e-5


def coordinate_directions(N, k):
    """Unit coordinates of ``Q_{N,k}``: one skew pair per ``i < j`` in
    ``A``, then every entry of ``B``.
    """
    directions = []

    for i in range(k):
        for j in range(i + 1, k):
            A = np.zeros((k, k))
            A[i, j], A[j, i] = 1.0, -1.0
            directions.append(ParamPoint(A, np.zeros((N - k, k))))

    for i in range(N - k):
        for j in range(k):
            B = np.zeros((N - k, k))
            B[i, j] = 1.0
            directions.append(ParamPoint(np.zeros((k, k)), B))

    return directions


@pytest.mark.parametrize("kind", list(PenaltyKind))
def test_full_chain_gradient_per_coordinate(kind, rng):
    p = random_penalty(rng, kind)
    problem = ssc_instance(rng, p, N=20, k=3)
    directions = coordinate_directions(20, 3)
    assert len(directions) == 3 + 17 * 3
    h = 1e-7

    for _ in range(20):
        V = random_point(rng, 20, 3)
        mu = random_step(rng, p, low=0.01)
        grad = problem.grad(V, mu)
        analytic = np.array([grad.inner(E) for E in directions])
        numeric = np.array(
            [
                (problem.value(V + h * E, mu) - problem.value(V - h * E, mu)) / (2 * h)
                for E in directions
            ]
        )
        error = np.linalg.norm(numeric - analytic)
        assert error <= 1e-5 * max(np.linalg.norm(analytic), 1.0)


def test_value_and_grad_agree(rng):
    problem = ssc_instance(rng, PenaltySpec.scad(0.1), N=7, k=2)
    V = random_point(rng, 7, 2)
    value, grad = problem.value_and_grad(V, 0.2)
    assert value == smoothed_value(problem, V, 0.2)
    assert (grad - smoothed_grad(problem, V, 0.2)).norm() == 0


def warm_start(L, k, penalty):
    U0 = sc_baseline(L, k)
    return SscProblem(L, k, penalty, select_S(U0)), U0


def test_warm_start_is_stationary_without_penalty(blob_laplacian):
    problem, U0 = warm_start(blob_laplacian, 3, PenaltySpec.l1(0.0))
    V = ParamPoint.zeros(problem.N, 3)
    eigenvalues = np.linalg.eigvalsh(blob_laplacian)[:3]

    for mu in (1.0, 0.01):
        value, grad = problem.value_and_grad(V, mu)
        assert value == pytest.approx(eigenvalues.sum(), abs=1e-10)
        assert grad.norm() <= 1e-6


def test_zero_lambda_keeps_subspace(blob_laplacian):
    problem, U0 = warm_start(blob_laplacian, 3, PenaltySpec.l1(0.0))
    trace = solver.run(problem, ParamPoint.zeros(problem.N, 3), SolverConfig())
    assert len(trace) == 500
    U = problem.point(trace.y)
    assert np.linalg.norm(U @ U.T - U0 @ U0.T) <= 1e-6


def test_rotation_invariance(rng):
    L = random_laplacian(rng, 9)
    penalty = PenaltySpec.mcp(0.2, 1.0)
    U0 = sc_baseline(L, 3)
    Q = random_basis(rng, 3).S
    first = SscProblem(L, 3, penalty, select_S(U0))
    second = SscProblem(L, 3, penalty, select_S(U0 @ Q))
    V = ParamPoint.zeros(9, 3)

    for mu in (0.5, 0.05):
        assert smoothed_value(first, V, mu) == pytest.approx(
            smoothed_value(second, V, mu), abs=1e-8
        )

    U = first.point(random_point(rng, 9, 3))
    assert h_value(L, U @ Q) == pytest.approx(h_value(L, U), abs=1e-10)
    np.testing.assert_allclose((U @ Q) @ (U @ Q).T, U @ U.T, atol=1e-10)


def test_smoothing_gap(rng):
    problem = ssc_instance(rng, PenaltySpec.l1(0.5), N=8, k=2)
    V = random_point(rng, 8, 2)
    exact = unsmoothed_value(problem, V)
    gaps = [exact - smoothed_value(problem, V, mu) for mu in 10.0 ** -np.arange(1, 7)]
    assert all(g >= 0 for g in gaps)
    assert all(a >= b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4


def test_unsmoothed_without_penalty(rng):
    problem = ssc_instance(rng, PenaltySpec.l1(0.0), N=6, k=2)
    V = random_point(rng, 6, 2)
    assert unsmoothed_value(problem, V) == h_value(problem.L, problem.point(V))


def test_feasible_iterates(rng):
    problem = ssc_instance(rng, PenaltySpec.mcp(0.1, 0.5), N=10, k=2)
    trace = solver.run(problem, random_point(rng, 10, 2), SolverConfig(max_iters=30))
    U = problem.point(trace.y)
    assert np.linalg.norm(U.T @ U - np.eye(2)) <= 1e-10


def test_invalid_problem():
    l1 = PenaltySpec.l1(1.0)

    with pytest.raises(ConfigError):
        SscProblem(np.eye(3), 4, l1, BasisMatrix.identity(3))

    with pytest.raises(DimensionError):
        SscProblem(np.eye(3), 2, l1, BasisMatrix.identity(4))

    with pytest.raises(ConfigError):
        SscProblem(np.triu(np.ones((3, 3))), 2, l1, BasisMatrix.identity(3))

    with pytest.raises(ConfigError) as exc_info:
        SscProblem(3 * np.eye(3), 2, l1, BasisMatrix.identity(3))

    assert "outside" in exc_info.value.format_message()


def test_point_dimensions(rng):
    problem = ssc_instance(rng, PenaltySpec.l1(1.0), N=6, k=2)

    with pytest.raises(DimensionError):
        problem.point(ParamPoint.zeros(6, 3))


def test_convergence_envelope(blob_laplacian, rng):
    N = blob_laplacian.shape[0]
    penalty = PenaltySpec.mcp(1e-3, 1.0)
    problem = SscProblem(blob_laplacian, 3, penalty, random_basis(rng, N))
    cfg = SolverConfig()
    trace = solver.run(problem, ParamPoint.zeros(N, 3), cfg)
    norms = trace.grad_norms()
    assert len(trace) == 500
    assert norms.min() <= 0.1 * norms[0]
    assert rate_envelope_check(trace, cfg, 5, 250).holds
    assert all(r.shrinks <= cfg.max_shrinks for r in trace.records)

    for r in trace.records:
        decrease = cfg.c * r.gamma * r.grad_norm ** 2 * (1 - 1e-12)
        assert r.accepted_value <= r.smoothed_value - decrease

