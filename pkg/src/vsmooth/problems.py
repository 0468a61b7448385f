"""Composite problems on plain vectors, used by ``vsmooth solve``.

``CompositeProblem`` minimizes ``h(y) + lam r(A y)`` with the quadratic
``h(y) = y^T Q y / 2 - b^T y`` over ``y`` in ``R^d``, without any
parametrization.
"""
import typing as t
from gettext import gettext as _

import numpy as np

from .exceptions import ConfigError
from .exceptions import DimensionError
from .penalties import moreau_grad
from .penalties import moreau_value
from .penalties import penalty_value
from .penalties import PenaltySpec
from .solver import SmoothedProblem


class CompositeProblem(SmoothedProblem):
    def __init__(
        self,
        Q: np.ndarray,
        b: np.ndarray,
        A: np.ndarray,
        penalty: PenaltySpec,
    ) -> None:
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        A = np.atleast_2d(np.asarray(A, dtype=float))
        d = b.shape[0]

        if Q.shape != (d, d) or A.shape[1] != d:
            raise DimensionError(
                _("Q {Q}, b {b} and A {A} do not fit together").format(
                    Q=Q.shape, b=b.shape, A=A.shape
                )
            )

        self.Q = (Q + Q.T) / 2
        self.b = b
        self.A = A
        self.penalty = penalty
        self.rho_eff = penalty.rho_eff

    def _smooth_part(self, y: np.ndarray) -> float:
        return float(0.5 * y @ self.Q @ y - self.b @ y)

    def value(self, y: np.ndarray, mu: float) -> float:
        return self._smooth_part(y) + moreau_value(self.penalty, mu, self.A @ y)

    def grad(self, y: np.ndarray, mu: float) -> np.ndarray:
        outer = moreau_grad(self.penalty, mu, self.A @ y)
        return self.Q @ y - self.b + self.A.T @ outer

    def unsmoothed_value(self, y: np.ndarray) -> float:
        return self._smooth_part(y) + penalty_value(self.penalty, self.A @ y)


def _regression(
    penalty: PenaltySpec, rng: np.random.Generator, n: int = 40, d: int = 20
) -> t.Tuple[CompositeProblem, np.ndarray]:
    X = rng.standard_normal((n, d)) / np.sqrt(n)
    coef = np.zeros(d)
    coef[: d // 4] = rng.choice([-2.0, 2.0], size=d // 4)
    target = X @ coef + 0.05 * rng.standard_normal(n)
    problem = CompositeProblem(X.T @ X, X.T @ target, np.eye(d), penalty)
    return problem, np.zeros(d)


def builtin_problem(
    name: str, lam: float = 0.1, seed: int = 0
) -> t.Tuple[CompositeProblem, np.ndarray]:
    """Return one of the demonstration problems and its starting point.

    ``quadratic``
        A strongly convex quadratic in ``R^5`` with no penalty.
    ``abs``
        ``|y|`` in one dimension, started at 2.
    ``lasso``
        Sparse least squares with an l1 penalty of weight ``lam``.
    ``mcp-regression``
        The same regression with MCP, ``beta = 1``.
    """
    rng = np.random.default_rng(seed)

    if name == "quadratic":
        M = rng.standard_normal((5, 5))
        problem = CompositeProblem(
            M.T @ M + np.eye(5),
            rng.standard_normal(5),
            np.eye(5),
            PenaltySpec.l1(0.0),
        )
        return problem, np.zeros(5)

    if name == "abs":
        problem = CompositeProblem(
            np.zeros((1, 1)), np.zeros(1), np.eye(1), PenaltySpec.l1(1.0)
        )
        return problem, np.array([2.0])

    if name == "lasso":
        return _regression(PenaltySpec.l1(lam), rng)

    if name == "mcp-regression":
        return _regression(PenaltySpec.mcp(lam, 1.0), rng)

    raise ConfigError(
        _("unknown problem {name!r}").format(name=name), key="problem"
    )


#: Names accepted by :func:`builtin_problem`.
BUILTIN_PROBLEMS = ("quadratic", "abs", "lasso", "mcp-regression")
