"""Weakly convex penalties with closed-form proximity operators.

Every penalty is used in the scaled form ``lam * r`` where ``r`` is
applied entrywise and summed. The Moreau envelope and its gradient are
evaluated exactly through the prox::

    env(Z) = lam * r(P) + ||P - Z||^2 / (2 mu),   P = prox(Z)
    grad env(Z) = (Z - P) / mu
"""
import enum
import typing as t
from dataclasses import dataclass
from gettext import gettext as _

import numpy as np

from .exceptions import ConfigError
from .exceptions import ScheduleError

ArrayLike = t.Union[float, np.ndarray]

#: Default SCAD shape parameter.
SCAD_DEFAULT_A = 3.7


class PenaltyKind(enum.Enum):
    L1 = "l1"
    MCP = "mcp"
    SCAD = "scad"


@dataclass(frozen=True)
class PenaltySpec:
    """The penalty ``lam * r`` together with its smoothing data.

    :param kind: which scalar penalty ``r`` is applied entrywise.
    :param lam: the multiplier. ``0`` disables the penalty.
    :param beta: MCP flattening point, ``r(z) = beta / 2`` for
        ``|z| > beta``.
    :param a: SCAD shape parameter, must exceed 2. The SCAD knots sit
        at 1 and ``a``.
    :param rho_floor: weak-convexity modulus reported as
        :attr:`rho_eff` when the penalty is convex.
    """

    kind: PenaltyKind
    lam: float
    beta: float = 1.0
    a: float = SCAD_DEFAULT_A
    rho_floor: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.kind, PenaltyKind):
            object.__setattr__(self, "kind", PenaltyKind(self.kind))

        if not self.lam >= 0:
            raise ConfigError(_("must be nonnegative"), key="penalty.lambda")

        if self.kind is PenaltyKind.MCP and not self.beta > 0:
            raise ConfigError(_("must be positive"), key="penalty.beta")

        if self.kind is PenaltyKind.SCAD and not self.a > 2:
            raise ConfigError(_("must be greater than 2"), key="penalty.a")

        if not self.rho_floor > 0:
            raise ConfigError(_("must be positive"), key="penalty.rho_floor")

    @classmethod
    def l1(cls, lam: float, **kwargs: t.Any) -> "PenaltySpec":
        return cls(PenaltyKind.L1, lam, **kwargs)

    @classmethod
    def mcp(cls, lam: float, beta: float, **kwargs: t.Any) -> "PenaltySpec":
        return cls(PenaltyKind.MCP, lam, beta=beta, **kwargs)

    @classmethod
    def scad(
        cls, lam: float, a: float = SCAD_DEFAULT_A, **kwargs: t.Any
    ) -> "PenaltySpec":
        return cls(PenaltyKind.SCAD, lam, a=a, **kwargs)

    @property
    def rho(self) -> float:
        """Weak-convexity modulus of ``lam * r``."""
        if self.kind is PenaltyKind.MCP:
            return self.lam / self.beta

        if self.kind is PenaltyKind.SCAD:
            return self.lam / (self.a - 1)

        return 0.0

    @property
    def rho_eff(self) -> float:
        """Modulus used by the smoothing schedule, always positive."""
        rho = self.rho
        return rho if rho > 0 else self.rho_floor

    @property
    def shape(self) -> t.Optional[float]:
        """The shape parameter of the penalty, ``None`` for l1."""
        if self.kind is PenaltyKind.MCP:
            return self.beta

        if self.kind is PenaltyKind.SCAD:
            return self.a

        return None

    def to_info_dict(self) -> t.Dict[str, t.Any]:
        info: t.Dict[str, t.Any] = {"kind": self.kind.value, "lambda": self.lam}

        if self.kind is PenaltyKind.MCP:
            info["beta"] = self.beta
        elif self.kind is PenaltyKind.SCAD:
            info["a"] = self.a

        info["rho"] = self.rho
        info["rho_eff"] = self.rho_eff
        return info


def make_penalty(
    kind: str,
    lam: float,
    shape: t.Optional[float] = None,
    rho_floor: float = 1.0,
) -> PenaltySpec:
    """Build a :class:`PenaltySpec` from its serialized form, where
    ``shape`` is ``beta`` for MCP, ``a`` for SCAD and ignored for l1.
    """
    kind_ = PenaltyKind(kind)

    if kind_ is PenaltyKind.MCP:
        beta = 1.0 if shape is None else shape
        return PenaltySpec.mcp(lam, beta, rho_floor=rho_floor)

    if kind_ is PenaltyKind.SCAD:
        a = SCAD_DEFAULT_A if shape is None else shape
        return PenaltySpec.scad(lam, a, rho_floor=rho_floor)

    return PenaltySpec.l1(lam, rho_floor=rho_floor)


def _check_step(p: PenaltySpec, mu: float) -> None:
    if not mu > 0:
        raise ConfigError(_("must be positive"), key="mu")

    if mu * p.rho >= 1:
        raise ScheduleError(mu, p.rho)


def penalty_entries(p: PenaltySpec, Z: ArrayLike) -> np.ndarray:
    """``lam * r`` applied to every entry of ``Z``."""
    Z = np.asarray(Z, dtype=float)

    if p.lam == 0:
        return np.zeros_like(Z)

    absz = np.abs(Z)

    if p.kind is PenaltyKind.MCP:
        r = np.where(absz <= p.beta, absz - Z * Z / (2 * p.beta), p.beta / 2)
    elif p.kind is PenaltyKind.SCAD:
        a = p.a
        r = np.where(
            absz <= 1,
            absz,
            np.where(
                absz <= a, (2 * a * absz - Z * Z - 1) / (2 * (a - 1)), (a + 1) / 2
            ),
        )
    else:
        r = absz

    return p.lam * r


def penalty_value(p: PenaltySpec, Z: ArrayLike) -> float:
    """``lam * r(Z)``, the entrywise penalty summed over ``Z``."""
    return float(np.sum(penalty_entries(p, Z)))


def prox_matrix(p: PenaltySpec, mu: float, Z: ArrayLike) -> np.ndarray:
    """Entrywise ``prox_{mu lam r}(Z)``.

    l1 is soft thresholding at ``mu * lam``. MCP is firm thresholding
    between ``mu * lam`` and ``beta``. SCAD is three-piece, with
    thresholds ``eta = mu * lam``, ``1 + eta`` and ``a``.

    :raises ScheduleError: if ``mu * rho >= 1``.
    """
    _check_step(p, mu)
    Z = np.asarray(Z, dtype=float)
    eta = mu * p.lam

    if eta == 0:
        return Z.copy()

    absz = np.abs(Z)
    sign = np.sign(Z)
    shrunk = sign * np.maximum(absz - eta, 0.0)

    if p.kind is PenaltyKind.L1:
        return shrunk

    if p.kind is PenaltyKind.MCP:
        firm = shrunk / (1 - eta / p.beta)
        return np.where(absz <= p.beta, firm, Z)

    a = p.a
    middle = ((a - 1) * Z - sign * a * eta) / (a - 1 - eta)
    return np.where(absz <= 1 + eta, shrunk, np.where(absz <= a, middle, Z))


def prox_scalar(p: PenaltySpec, mu: float, z: float) -> float:
    """The unique minimizer of ``lam r(t) + (t - z)^2 / (2 mu)``."""
    return float(prox_matrix(p, mu, z))


def moreau_value(p: PenaltySpec, mu: float, Z: ArrayLike) -> float:
    """Moreau envelope of ``lam * r`` with parameter ``mu`` at ``Z``."""
    Z = np.asarray(Z, dtype=float)
    P = prox_matrix(p, mu, Z)
    D = P - Z
    return penalty_value(p, P) + float(np.sum(D * D)) / (2 * mu)


def moreau_grad(p: PenaltySpec, mu: float, Z: ArrayLike) -> np.ndarray:
    """Gradient of :func:`moreau_value`, ``(Z - prox(Z)) / mu``."""
    Z = np.asarray(Z, dtype=float)
    return (Z - prox_matrix(p, mu, Z)) / mu
