"""Cayley-type parametrization of the Grassmann manifold.

The map ``V -> S (I - V) (I + V)^{-1} I_{N x k}`` sends the structured
skew space ``Q_{N,k}`` onto orthonormal ``N x k`` bases, i.e. onto
representatives of points of ``Gr(k, N)``. ``V`` is stored through its
blocks::

    V = [[A, -B^T],
         [B,  0  ]]     A^T = -A (k x k),  B ((N - k) x k)

Inner products on ``Q_{N,k}`` are the Frobenius inner products of the
assembled ``N x N`` matrices, so ``<V, W> = <A, A'> + 2 <B, B'>``.
"""
import typing as t
from dataclasses import dataclass
from gettext import gettext as _

import numpy as np
import scipy.linalg

from .exceptions import DimensionError
from .exceptions import NotOrthonormalError
from .exceptions import NumericalError

#: Tolerance on ``||S^T S - I||_F`` for a basis matrix.
BASIS_TOL = 1e-10
#: Tolerance on ``||U0^T U0 - I||_F`` for a warm start.
WARM_START_TOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ParamPoint:
    """An element of ``Q_{N,k}``. ``A`` is skew-symmetrized on
    construction, which leaves an already skew matrix bit-for-bit
    unchanged.
    """

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)

        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(
                _("block A must be square, got shape {shape}").format(shape=A.shape)
            )

        if B.ndim != 2 or B.shape[1] != A.shape[0]:
            raise DimensionError(
                _("block B must have {k} columns, got shape {shape}").format(
                    k=A.shape[0], shape=B.shape
                )
            )

        object.__setattr__(self, "A", _frozen((A - A.T) / 2))
        object.__setattr__(self, "B", _frozen(B))

    @classmethod
    def zeros(cls, N: int, k: int) -> "ParamPoint":
        if not 1 <= k <= N:
            raise DimensionError(
                _("need 1 <= k <= N, got N={N}, k={k}").format(N=N, k=k)
            )

        return cls(np.zeros((k, k)), np.zeros((N - k, k)))

    @property
    def k(self) -> int:
        return self.A.shape[0]

    @property
    def N(self) -> int:
        return self.A.shape[0] + self.B.shape[0]

    def _check_compatible(self, other: "ParamPoint") -> None:
        if self.A.shape != other.A.shape or self.B.shape != other.B.shape:
            raise DimensionError(
                _("incompatible points: (N={N1}, k={k1}) and (N={N2}, k={k2})").format(
                    N1=self.N, k1=self.k, N2=other.N, k2=other.k
                )
            )

    def __add__(self, other: "ParamPoint") -> "ParamPoint":
        self._check_compatible(other)
        return ParamPoint(self.A + other.A, self.B + other.B)

    def __sub__(self, other: "ParamPoint") -> "ParamPoint":
        self._check_compatible(other)
        return ParamPoint(self.A - other.A, self.B - other.B)

    def __neg__(self) -> "ParamPoint":
        return ParamPoint(-self.A, -self.B)

    def __mul__(self, scalar: float) -> "ParamPoint":
        return ParamPoint(scalar * self.A, scalar * self.B)

    __rmul__ = __mul__

    def inner(self, other: "ParamPoint") -> float:
        """Frobenius inner product of the assembled matrices."""
        self._check_compatible(other)
        return float(np.sum(self.A * other.A) + 2 * np.sum(self.B * other.B))

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self)))

    def __repr__(self) -> str:
        return f"<ParamPoint N={self.N} k={self.k} norm={self.norm():.3g}>"


@dataclass(frozen=True, eq=False)
class BasisMatrix:
    """An orthogonal ``N x N`` matrix centering the parametrization."""

    S: np.ndarray

    def __post_init__(self) -> None:
        S = np.asarray(self.S, dtype=float)

        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DimensionError(
                _("basis must be square, got shape {shape}").format(shape=S.shape)
            )

        defect = float(np.linalg.norm(S.T @ S - np.eye(S.shape[0])))

        if defect > BASIS_TOL:
            raise NotOrthonormalError(_("basis matrix"), defect, BASIS_TOL)

        object.__setattr__(self, "S", _frozen(S))

    @classmethod
    def identity(cls, N: int) -> "BasisMatrix":
        return cls(np.eye(N))

    @property
    def N(self) -> int:
        return self.S.shape[0]


def assemble(V: ParamPoint) -> np.ndarray:
    """The ``N x N`` matrix encoded by ``V``."""
    k = V.k
    M = np.zeros((V.N, V.N))
    M[:k, :k] = V.A
    M[k:, :k] = V.B
    M[:k, k:] = -V.B.T
    return M


def project_Q(M: np.ndarray, k: int) -> ParamPoint:
    """Orthogonal projection of an ``N x N`` matrix onto ``Q_{N,k}``:
    take the skew part and drop the lower-right block.
    """
    M = np.asarray(M, dtype=float)

    if M.ndim != 2 or M.shape[0] != M.shape[1] or not 1 <= k <= M.shape[0]:
        raise DimensionError(
            _("cannot project shape {shape} onto Q with k={k}").format(
                shape=M.shape, k=k
            )
        )

    skew = (M - M.T) / 2
    return ParamPoint(skew[:k, :k], skew[k:, :k])


def _left_identity(N: int, k: int) -> np.ndarray:
    return np.eye(N, k)


class CayleyChart:
    """The parametrization evaluated at one point ``V``.

    Factorizes ``I + V`` once and reuses it for the point, the
    differential and the adjoint of the differential at ``V``. ``I + V``
    is always invertible because ``V`` is skew-symmetric.
    """

    def __init__(self, S: BasisMatrix, V: ParamPoint) -> None:
        if S.N != V.N:
            raise DimensionError(
                _("basis is {SN} x {SN} but the point has N={N}").format(
                    SN=S.N, N=V.N
                )
            )

        self.S = S
        self.V = V
        self.k = V.k
        self._V = assemble(V)

        try:
            self._lu = scipy.linalg.lu_factor(np.eye(V.N) + self._V)
        except (ValueError, np.linalg.LinAlgError) as e:
            raise NumericalError(
                _("factorization of I + V failed: {error}").format(error=e)
            ) from e

        # Y = (I + V)^{-1} I_{N x k}
        self._Y = scipy.linalg.lu_solve(self._lu, _left_identity(V.N, self.k))
        self._U: t.Optional[np.ndarray] = None

    def point(self) -> np.ndarray:
        """``U = S (I - V) Y``, an ``N x k`` matrix with orthonormal
        columns.
        """
        if self._U is None:
            self._U = self.S.S @ (self._Y - self._V @ self._Y)

        return self._U

    def differential(self, H: ParamPoint) -> np.ndarray:
        """``-2 S (I + V)^{-1} H (I + V)^{-1} I_{N x k}``."""
        self.V._check_compatible(H)
        return -2 * (self.S.S @ scipy.linalg.lu_solve(self._lu, assemble(H) @ self._Y))

    def adjoint(self, Z: np.ndarray) -> ParamPoint:
        """Adjoint of :meth:`differential` with respect to the Frobenius
        inner products on ``N x k`` matrices and on ``Q_{N,k}``.
        """
        Z = np.asarray(Z, dtype=float)

        if Z.shape != (self.V.N, self.k):
            raise DimensionError(
                _("expected an {N} x {k} matrix, got shape {shape}").format(
                    N=self.V.N, k=self.k, shape=Z.shape
                )
            )

        X = scipy.linalg.lu_solve(self._lu, self.S.S.T @ Z, trans=1)
        return project_Q(-2 * X @ self._Y.T, self.k)


def cayley_map(S: BasisMatrix, V: ParamPoint, k: t.Optional[int] = None) -> np.ndarray:
    """Orthonormal representative of ``Psi_S(V)`` in ``Gr(k, N)``."""
    if k is not None and k != V.k:
        raise DimensionError(
            _("point has k={k1}, requested k={k2}").format(k1=V.k, k2=k)
        )

    return CayleyChart(S, V).point()


def cayley_dmap(S: BasisMatrix, V: ParamPoint, H: ParamPoint) -> np.ndarray:
    """Differential of :func:`cayley_map` at ``V`` in direction ``H``."""
    return CayleyChart(S, V).differential(H)


def cayley_adjoint(S: BasisMatrix, V: ParamPoint, Z: np.ndarray) -> ParamPoint:
    """Adjoint of :func:`cayley_dmap` at ``V`` applied to ``Z``."""
    return CayleyChart(S, V).adjoint(Z)


def select_S(
    U0: t.Optional[np.ndarray] = None, N: t.Optional[int] = None
) -> BasisMatrix:
    """Choose the basis ``S`` so that ``V = 0`` maps to the span of
    ``U0``.

    Without a warm start this is the identity of size ``N``. Otherwise
    it is the orthogonal factor of a full QR decomposition of ``U0``,
    with column signs fixed so its first ``k`` columns equal ``U0``.

    :raises NotOrthonormalError: if ``U0`` does not have orthonormal
        columns.
    """
    if U0 is None:
        if N is None:
            raise DimensionError(_("N is required when no warm start is given"))

        return BasisMatrix.identity(N)

    U0 = np.asarray(U0, dtype=float)

    if U0.ndim != 2 or U0.shape[1] > U0.shape[0]:
        raise DimensionError(
            _("warm start must be tall, got shape {shape}").format(shape=U0.shape)
        )

    if N is not None and N != U0.shape[0]:
        raise DimensionError(
            _("warm start has {rows} rows, expected {N}").format(rows=U0.shape[0], N=N)
        )

    k = U0.shape[1]
    defect = float(np.linalg.norm(U0.T @ U0 - np.eye(k)))

    if defect > WARM_START_TOL:
        raise NotOrthonormalError(_("warm start"), defect, WARM_START_TOL)

    Q, R = scipy.linalg.qr(U0, mode="full")
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1
    Q[:, :k] *= signs
    return BasisMatrix(Q)
