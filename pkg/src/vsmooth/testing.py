"""Numerical oracles for verifying the closed forms and gradients.

These compare the library against slow but obviously correct
computations: a brute-force grid search for proximity operators and
central finite differences for every gradient and differential. They
back both the test suite and ``vsmooth check``.
"""
import typing as t
from dataclasses import dataclass

import numpy as np

from .clustering import normalized_laplacian
from .parametrization import BasisMatrix
from .parametrization import CayleyChart
from .parametrization import ParamPoint
from .penalties import moreau_grad
from .penalties import moreau_value
from .penalties import penalty_entries
from .penalties import penalty_value
from .penalties import PenaltyKind
from .penalties import PenaltySpec
from .penalties import prox_scalar
from .solver import inner
from .solver import SmoothedProblem
from .ssc_model import SscProblem


def grid_prox_oracle(p: PenaltySpec, mu: float, z: float, step: float = 1e-4) -> float:
    """Minimize ``lam r(t) + (t - z)^2 / (2 mu)`` over a grid of spacing
    ``step`` centered at ``z``. Accurate to about ``step / 2``.
    """
    half = 3 + 3 * mu * p.lam
    grid = np.arange(z - half, z + half + step, step)
    objective = penalty_entries(p, grid) + (grid - z) ** 2 / (2 * mu)
    return float(grid[np.argmin(objective)])


def central_difference(
    f: t.Callable[[t.Any], float], x: t.Any, direction: t.Any, h: float = 1e-6
) -> float:
    """``(f(x + h d) - f(x - h d)) / (2 h)``."""
    return (f(x + h * direction) - f(x - h * direction)) / (2 * h)


def directional_check(
    problem: SmoothedProblem, y: t.Any, mu: float, direction: t.Any, h: float = 1e-7
) -> float:
    """Relative error of ``<grad, d>`` against the central difference of
    the smoothed value along ``d``, scaled by ``||grad|| ||d||``.
    """
    value_at = lambda z: problem.value(z, mu)  # noqa: E731
    numeric = central_difference(value_at, y, direction, h)
    grad = problem.grad(y, mu)
    analytic = inner(grad, direction)
    scale = np.sqrt(inner(grad, grad) * inner(direction, direction))
    return abs(numeric - analytic) / max(scale, 1e-12)


def adjoint_identity(
    chart: CayleyChart, H: ParamPoint, Z: np.ndarray
) -> t.Tuple[float, float]:
    """``(<D Psi[H], Z>, <H, D Psi^*[Z]>)``, equal up to rounding."""
    lhs = float(np.sum(chart.differential(H) * Z))
    rhs = chart.adjoint(Z).inner(H)
    return lhs, rhs


def random_point(
    rng: np.random.Generator, N: int, k: int, scale: float = 0.5
) -> ParamPoint:
    return ParamPoint(
        scale * rng.standard_normal((k, k)), scale * rng.standard_normal((N - k, k))
    )


def random_basis(rng: np.random.Generator, N: int) -> BasisMatrix:
    """A random orthogonal matrix."""
    Q, R = np.linalg.qr(rng.standard_normal((N, N)))
    return BasisMatrix(Q * np.sign(np.diag(R)))


def random_laplacian(rng: np.random.Generator, N: int) -> np.ndarray:
    """Normalized Laplacian of a random dense graph."""
    W = rng.uniform(0.05, 1.0, size=(N, N))
    W = (W + W.T) / 2
    np.fill_diagonal(W, 0.0)
    return normalized_laplacian(W)


def random_penalty(rng: np.random.Generator, kind: PenaltyKind) -> PenaltySpec:
    lam = float(10 ** rng.uniform(-2, 0.5))

    if kind is PenaltyKind.MCP:
        return PenaltySpec.mcp(lam, float(rng.uniform(0.2, 3.0)))

    if kind is PenaltyKind.SCAD:
        return PenaltySpec.scad(lam, float(rng.uniform(2.5, 5.0)))

    return PenaltySpec.l1(lam)


def random_step(rng: np.random.Generator, p: PenaltySpec, low: float = 0.0) -> float:
    """A prox step with ``mu * rho <= 0.9``, at least ``low``."""
    high = 0.9 / p.rho if p.rho > 0 else 2.0
    return float(rng.uniform(max(low, 1e-3), max(high, low + 1e-3)))


@dataclass
class CheckResult:
    name: str
    worst: float
    tolerance: float
    draws: int

    @property
    def passed(self) -> bool:
        return bool(self.worst <= self.tolerance)


def check_prox(rng: np.random.Generator, kind: PenaltyKind, draws: int) -> CheckResult:
    worst = 0.0

    for _i in range(draws):
        p = random_penalty(rng, kind)
        mu = random_step(rng, p)
        z = float(rng.uniform(-6, 6))
        error = abs(prox_scalar(p, mu, z) - grid_prox_oracle(p, mu, z))
        worst = max(worst, error)

    return CheckResult(f"prox {kind.value} vs grid search", worst, 5e-4, draws)


def check_envelope(
    rng: np.random.Generator, kind: PenaltyKind, draws: int
) -> t.List[CheckResult]:
    """Envelope gradient against finite differences, plus domination
    ``env <= lam r`` and monotonicity in ``mu``.
    """
    worst_grad = 0.0
    worst_order = 0.0

    for _i in range(draws):
        p = random_penalty(rng, kind)
        mu = random_step(rng, p, low=0.01)
        z = float(rng.uniform(-6, 6))
        env = lambda x: moreau_value(p, mu, x)  # noqa: E731
        numeric = central_difference(env, z, 1.0, 1e-6)
        analytic = float(moreau_grad(p, mu, z))
        worst_grad = max(worst_grad, abs(numeric - analytic) / max(1.0, abs(analytic)))

        smaller = moreau_value(p, mu / 2, z)
        worst_order = max(
            worst_order,
            env(z) - smaller,
            smaller - penalty_value(p, z),
        )

    return [
        CheckResult(f"envelope gradient {kind.value}", worst_grad, 1e-5, draws),
        CheckResult(f"envelope ordering {kind.value}", worst_order, 1e-12, draws),
    ]


def check_parametrization(
    rng: np.random.Generator, N: int, k: int, draws: int
) -> t.List[CheckResult]:
    worst_orth = 0.0
    worst_diff = 0.0
    worst_adj = 0.0

    for _i in range(draws):
        S = random_basis(rng, N)
        V = random_point(rng, N, k)
        H = random_point(rng, N, k, scale=1.0)
        chart = CayleyChart(S, V)
        U = chart.point()
        worst_orth = max(worst_orth, float(np.linalg.norm(U.T @ U - np.eye(k))))

        h = 1e-5
        numeric = CayleyChart(S, V + h * H).point() - CayleyChart(S, V - h * H).point()
        numeric /= 2 * h
        analytic = chart.differential(H)
        worst_diff = max(
            worst_diff,
            float(np.linalg.norm(numeric - analytic) / np.linalg.norm(analytic)),
        )

        Z = rng.standard_normal((N, k))
        lhs, rhs = adjoint_identity(chart, H, Z)
        scale = np.linalg.norm(analytic) * np.linalg.norm(Z)
        worst_adj = max(worst_adj, abs(lhs - rhs) / scale)

    where = f"N={N} k={k}"
    return [
        CheckResult(f"orthonormal columns {where}", worst_orth, 1e-10, draws),
        CheckResult(f"differential {where}", worst_diff, 1e-6, draws),
        CheckResult(f"adjoint identity {where}", worst_adj, 1e-10, draws),
    ]


def ssc_instance(
    rng: np.random.Generator, penalty: PenaltySpec, N: int = 20, k: int = 3
) -> SscProblem:
    """A random SSC problem with a random orthogonal basis."""
    return SscProblem(random_laplacian(rng, N), k, penalty, random_basis(rng, N))


def check_ssc_gradient(
    rng: np.random.Generator, draws: int, N: int = 20, k: int = 3
) -> t.List[CheckResult]:
    results = []

    for kind in PenaltyKind:
        p = random_penalty(rng, kind)
        problem = ssc_instance(rng, p, N, k)
        worst = 0.0

        for _i in range(draws):
            V = random_point(rng, N, k)
            H = random_point(rng, N, k, scale=1.0)
            H = H * (1 / H.norm())
            mu = random_step(rng, p, low=0.01)
            worst = max(worst, directional_check(problem, V, mu, H))

        results.append(
            CheckResult(f"SSC gradient {kind.value} N={N} k={k}", worst, 1e-5, draws)
        )

    return results


def run_checks(seed: int = 0, draws: int = 100) -> t.List[CheckResult]:
    """Run every oracle comparison with ``draws`` random samples each."""
    rng = np.random.default_rng(seed)
    results = []

    for kind in PenaltyKind:
        results.append(check_prox(rng, kind, draws))
        results.extend(check_envelope(rng, kind, draws))

    for N in (6, 20):
        for k in (1, 3):
            results.extend(check_parametrization(rng, N, k, draws))

    results.extend(check_ssc_gradient(rng, max(draws // 5, 1)))
    return results
