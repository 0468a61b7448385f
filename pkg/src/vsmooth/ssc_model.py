"""Sparse spectral clustering as a smoothed problem on ``Q_{N,k}``.

The objective is ``Tr(U^T L U) + lam r(U U^T)`` evaluated at
``U = Psi_S(V)``. Gradients pull back through the adjoint of the
parametrization's differential.
"""
import typing as t
from gettext import gettext as _

import numpy as np
import scipy.linalg

from .exceptions import ConfigError
from .exceptions import DimensionError
from .parametrization import BasisMatrix
from .parametrization import CayleyChart
from .parametrization import ParamPoint
from .penalties import moreau_grad
from .penalties import moreau_value
from .penalties import penalty_value
from .penalties import PenaltySpec
from .solver import SmoothedProblem

#: Tolerance on ``||L - L^T||`` and on the spectral range of ``L``.
LAPLACIAN_SYMMETRY_TOL = 1e-10
LAPLACIAN_SPECTRUM_TOL = 1e-8


def h_value(L: np.ndarray, U: np.ndarray) -> float:
    """``Tr(U^T L U)``."""
    _check_shapes(L, U)
    return float(np.sum(U * (L @ U)))


def h_grad(L: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Gradient of :func:`h_value`, ``2 L U`` for symmetric ``L``."""
    _check_shapes(L, U)
    return 2 * (L @ U)


def _check_shapes(L: np.ndarray, U: np.ndarray) -> None:
    if L.ndim != 2 or U.ndim != 2 or L.shape != (U.shape[0], U.shape[0]):
        raise DimensionError(
            _("L {L} and U {U} do not fit together").format(L=L.shape, U=U.shape)
        )


class SscProblem(SmoothedProblem):
    """The data of one sparse spectral clustering instance.

    :param L: symmetric normalized Laplacian, spectrum in ``[0, 2]``.
    :param k: subspace dimension.
    :param penalty: the penalty applied to ``U U^T``. ``lam = 0``
        reduces the problem to the plain trace minimization.
    :param S: basis of the parametrization.
    """

    def __init__(
        self, L: np.ndarray, k: int, penalty: PenaltySpec, S: BasisMatrix
    ) -> None:
        L = np.asarray(L, dtype=float)
        N = L.shape[0]

        if L.ndim != 2 or L.shape[1] != N:
            raise DimensionError(
                _("Laplacian must be square, got shape {shape}").format(shape=L.shape)
            )

        if not 1 <= k <= N:
            raise ConfigError(
                _("must satisfy 1 <= k <= {N}").format(N=N), key="k"
            )

        if S.N != N:
            raise DimensionError(
                _("basis is {SN} x {SN} but L is {N} x {N}").format(SN=S.N, N=N)
            )

        if np.linalg.norm(L - L.T) > LAPLACIAN_SYMMETRY_TOL:
            raise ConfigError(_("Laplacian is not symmetric"), key="L")

        spectrum = scipy.linalg.eigvalsh(L)

        if (
            spectrum[0] < -LAPLACIAN_SPECTRUM_TOL
            or spectrum[-1] > 2 + LAPLACIAN_SPECTRUM_TOL
        ):
            raise ConfigError(
                _("Laplacian spectrum [{lo:.3g}, {hi:.3g}] is outside [0, 2]").format(
                    lo=spectrum[0], hi=spectrum[-1]
                ),
                key="L",
            )

        self.L = L
        self.k = k
        self.penalty = penalty
        self.S = S
        self.rho_eff = penalty.rho_eff

    @property
    def N(self) -> int:
        return self.L.shape[0]

    def chart(self, V: ParamPoint) -> CayleyChart:
        if V.N != self.N or V.k != self.k:
            raise DimensionError(
                _("point has (N={N}, k={k}), problem has (N={PN}, k={Pk})").format(
                    N=V.N, k=V.k, PN=self.N, Pk=self.k
                )
            )

        return CayleyChart(self.S, V)

    def point(self, V: ParamPoint) -> np.ndarray:
        """The orthonormal basis ``U = Psi_S(V)``."""
        return self.chart(V).point()

    def _penalized(self) -> bool:
        return self.penalty.lam > 0

    def value(self, V: ParamPoint, mu: float) -> float:
        return smoothed_value(self, V, mu)

    def grad(self, V: ParamPoint, mu: float) -> ParamPoint:
        return smoothed_grad(self, V, mu)

    def value_and_grad(self, V: ParamPoint, mu: float) -> t.Tuple[float, ParamPoint]:
        chart = self.chart(V)
        U = chart.point()
        value = h_value(self.L, U)
        euclidean = h_grad(self.L, U)

        if self._penalized():
            value += moreau_value(self.penalty, mu, U @ U.T)
            euclidean = euclidean + g_chain_grad(self, U, mu)

        return value, chart.adjoint(euclidean)

    def unsmoothed_value(self, V: ParamPoint) -> float:
        return unsmoothed_value(self, V)


def g_chain_grad(problem: SscProblem, U: np.ndarray, mu: float) -> np.ndarray:
    """Gradient of ``U -> env(U U^T)``: with ``W`` the envelope gradient
    at ``U U^T`` this is ``(W + W^T) U``.
    """
    if not problem._penalized():
        return np.zeros_like(U)

    W = moreau_grad(problem.penalty, mu, U @ U.T)
    return (W + W.T) @ U


def smoothed_value(problem: SscProblem, V: ParamPoint, mu: float) -> float:
    U = problem.point(V)
    value = h_value(problem.L, U)

    if problem._penalized():
        value += moreau_value(problem.penalty, mu, U @ U.T)

    return value


def smoothed_grad(problem: SscProblem, V: ParamPoint, mu: float) -> ParamPoint:
    return problem.value_and_grad(V, mu)[1]


def unsmoothed_value(problem: SscProblem, V: ParamPoint) -> float:
    """``Tr(U^T L U) + lam r(U U^T)`` with no smoothing."""
    U = problem.point(V)
    return h_value(problem.L, U) + penalty_value(problem.penalty, U @ U.T)
