"""Variable smoothing gradient descent with Armijo backtracking.

At iteration ``n`` the nonsmooth term is replaced by its Moreau envelope
with parameter ``mu_n = 1 / (tau * rho * n^(1/alpha))`` and a single
gradient step is taken on the smoothed objective, with the stepsize
found by backtracking from a warm-started guess.
"""
import csv
import logging
import math
import typing as t
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from gettext import gettext as _

import numpy as np

from .exceptions import BacktrackingError
from .exceptions import ConfigError
from .exceptions import NonFiniteError
from .exceptions import TraceTooShortError

logger = logging.getLogger(__name__)

Point = t.Any

#: Column order of the trace CSV export.
TRACE_COLUMNS = (
    "n",
    "mu",
    "gamma_bar",
    "gamma",
    "shrinks",
    "grad_norm",
    "smoothed_value",
    "unsmoothed_value",
)


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of the variable smoothing method. The defaults are
    ``(tau, c, kappa, alpha) = (3, 2^-13, 0.5, 1.1)`` with a stepsize
    floor of ``1e-5`` and 500 iterations.
    """

    tau: float = 3.0
    c: float = 2.0 ** -13
    kappa: float = 0.5
    alpha: float = 1.1
    epsilon_step: float = 1e-5
    gamma_first: float = 1.0
    max_iters: int = 500
    max_shrinks: int = 60
    grad_tol: float = 0.0

    def __post_init__(self) -> None:
        checks = [
            ("tau", self.tau > 2, _("must be greater than 2")),
            ("c", 0 < self.c < 1, _("must be in (0, 1)")),
            ("kappa", 0 < self.kappa < 1, _("must be in (0, 1)")),
            ("alpha", self.alpha > 1, _("must be greater than 1")),
            ("epsilon_step", self.epsilon_step > 0, _("must be positive")),
            ("gamma_first", self.gamma_first > 0, _("must be positive")),
            ("max_iters", self.max_iters >= 1, _("must be at least 1")),
            ("max_shrinks", self.max_shrinks >= 1, _("must be at least 1")),
            ("grad_tol", self.grad_tol >= 0, _("must be nonnegative")),
        ]

        for name, ok, message in checks:
            if not ok:
                raise ConfigError(message, key=f"solver.{name}")

    def to_info_dict(self) -> t.Dict[str, t.Any]:
        return asdict(self)


class SmoothedProblem:
    """Interface of a problem the solver can minimize.

    Subclasses implement :meth:`value` and :meth:`grad` of the smoothed
    objective at fixed ``mu`` and :meth:`unsmoothed_value` of the
    original one. ``grad`` must be the exact gradient of ``value`` with
    respect to the inner product of the points, which are either numpy
    arrays or objects with an ``inner`` method.

    Implementations must be safe to call from several threads.
    """

    #: Weak-convexity modulus driving the smoothing schedule.
    rho_eff: float = 1.0

    def value(self, y: Point, mu: float) -> float:
        raise NotImplementedError

    def grad(self, y: Point, mu: float) -> Point:
        raise NotImplementedError

    def value_and_grad(self, y: Point, mu: float) -> t.Tuple[float, Point]:
        """Both at once. Override when they share work."""
        return self.value(y, mu), self.grad(y, mu)

    def unsmoothed_value(self, y: Point) -> float:
        raise NotImplementedError


def inner(a: Point, b: Point) -> float:
    """Inner product of two solver points."""
    method = getattr(a, "inner", None)

    if method is not None:
        return float(method(b))

    return float(np.vdot(np.asarray(a, dtype=float), np.asarray(b, dtype=float)))


@dataclass(frozen=True)
class IterationRecord:
    n: int
    mu: float
    gamma_bar: float
    gamma: float
    shrinks: int
    grad_norm: float
    smoothed_value: float
    unsmoothed_value: float
    #: ``J(y_n - gamma_n grad J(y_n))`` at the accepted stepsize.
    accepted_value: float


@dataclass
class SolverTrace:
    """Everything :func:`run` did, one record per iteration."""

    records: t.List[IterationRecord] = field(default_factory=list)
    y: Point = None
    reason: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def grad_norms(self) -> np.ndarray:
        return self.column("grad_norm")

    def mus(self) -> np.ndarray:
        return self.column("mu")

    def to_csv(self, file: t.TextIO) -> None:
        """Write the trace columns, one row per iteration."""
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)

        for record in self.records:
            writer.writerow([getattr(record, name) for name in TRACE_COLUMNS])

    def summary(self) -> t.Dict[str, t.Any]:
        if not self.records:
            return {"iterations": 0, "reason": self.reason}

        norms = self.grad_norms()
        last = self.records[-1]
        return {
            "iterations": len(self.records),
            "reason": self.reason,
            "first_grad_norm": float(norms[0]),
            "min_grad_norm": float(norms.min()),
            "final_grad_norm": float(norms[-1]),
            "final_smoothed_value": last.smoothed_value,
            "final_unsmoothed_value": last.unsmoothed_value,
            "total_shrinks": int(sum(r.shrinks for r in self.records)),
        }


def schedule_mu(n: int, cfg: SolverConfig, rho_eff: float) -> float:
    """``mu_n = 1 / (tau * rho_eff * n^(1/alpha))``."""
    if n < 1:
        raise ConfigError(_("must be at least 1"), key="n")

    return 1.0 / (cfg.tau * rho_eff * n ** (1.0 / cfg.alpha))


class BacktrackResult(t.NamedTuple):
    gamma: float
    shrinks: int
    #: Objective value at the accepted point.
    value: float


def backtrack(
    J: t.Callable[[Point], float],
    gradJ_at_y: Point,
    J_at_y: float,
    y: Point,
    cfg: SolverConfig,
    gamma_init: float,
) -> BacktrackResult:
    """Shrink ``gamma_init`` by ``kappa`` until the Armijo condition
    ``J(y - gamma g) <= J(y) - c gamma ||g||^2`` holds.

    :raises BacktrackingError: after ``cfg.max_shrinks`` failed shrinks.
    """
    if not gamma_init > 0:
        raise ConfigError(_("must be positive"), key="gamma_init")

    grad_sq = inner(gradJ_at_y, gradJ_at_y)
    gamma = gamma_init

    for shrinks in range(cfg.max_shrinks + 1):
        trial = J(y - gamma * gradJ_at_y)

        if trial <= J_at_y - cfg.c * gamma * grad_sq:
            return BacktrackResult(gamma, shrinks, trial)

        gamma *= cfg.kappa

    raise BacktrackingError(cfg.max_shrinks, gamma / cfg.kappa)


def initial_stepsize_guess(
    trace: SolverTrace, value: float, grad_norm_sq: float, cfg: SolverConfig
) -> float:
    """The stepsize backtracking starts from.

    From the second iteration on this is ``2 (J_prev - J) / ||grad||^2``,
    floored at ``epsilon_step``. If the objective did not decrease, the
    previous accepted stepsize is reused instead.
    """
    if not trace.records:
        return cfg.gamma_first

    previous = trace.records[-1]
    decrease = previous.smoothed_value - value

    if decrease > 0 and grad_norm_sq > 0:
        return max(2 * decrease / grad_norm_sq, cfg.epsilon_step)

    return max(previous.gamma, cfg.epsilon_step)


def run(
    problem: SmoothedProblem,
    y1: Point,
    cfg: SolverConfig,
    callback: t.Optional[t.Callable[[IterationRecord], None]] = None,
) -> SolverTrace:
    """Minimize ``problem`` from ``y1``.

    Stops after ``cfg.max_iters`` iterations, or earlier once the
    smoothed gradient norm drops to ``cfg.grad_tol`` when that is
    positive.

    :param callback: called with every new record.
    :raises NonFiniteError: if the objective or gradient is not finite.
    :raises BacktrackingError: if a stepsize search fails.
    """
    trace = SolverTrace(y=y1, reason="max_iters")
    rho_eff = problem.rho_eff
    y = y1

    for n in range(1, cfg.max_iters + 1):
        mu = schedule_mu(n, cfg, rho_eff)
        value, grad = problem.value_and_grad(y, mu)

        if not math.isfinite(value):
            raise NonFiniteError(n, "objective value")

        grad_sq = inner(grad, grad)

        if not math.isfinite(grad_sq):
            raise NonFiniteError(n, "gradient")

        grad_norm = math.sqrt(grad_sq)
        gamma_bar = initial_stepsize_guess(trace, value, grad_sq, cfg)
        unsmoothed = problem.unsmoothed_value(y)

        if cfg.grad_tol > 0 and grad_norm <= cfg.grad_tol:
            trace.records.append(
                IterationRecord(
                    n, mu, gamma_bar, 0.0, 0, grad_norm, value, unsmoothed, value
                )
            )
            trace.reason = "grad_tol"
            break

        step = backtrack(
            lambda z: problem.value(z, mu), grad, value, y, cfg, gamma_bar
        )
        record = IterationRecord(
            n,
            mu,
            gamma_bar,
            step.gamma,
            step.shrinks,
            grad_norm,
            value,
            unsmoothed,
            step.value,
        )
        trace.records.append(record)
        y = y - step.gamma * grad
        logger.debug(
            "n=%d mu=%.3e gamma=%.3e shrinks=%d |grad|=%.3e value=%.6g",
            n,
            mu,
            step.gamma,
            step.shrinks,
            grad_norm,
            value,
        )

        if callback is not None:
            callback(record)

    trace.y = y
    logger.info(
        "solver stopped after %d iterations (%s)", len(trace), trace.reason
    )
    return trace


class EnvelopeCheck(t.NamedTuple):
    eta: float
    holds: bool


def rate_envelope_check(
    trace: SolverTrace, cfg: SolverConfig, n0: int, n_split: t.Optional[int] = None
) -> EnvelopeCheck:
    """Check the decay of the running minimum of gradient norms against
    the envelope ``sqrt(eta / ((n1 + 1)^(1 - 1/alpha) - n0^(1 - 1/alpha)))``.

    The smallest ``eta`` making the bound hold for every ``n1`` in
    ``(n0, n_split]`` is fitted first; the check then reports whether
    that ``eta`` also bounds every ``n1`` in ``(n_split, len(trace)]``.

    :param n0: first iteration of the window, 1-based.
    :param n_split: last calibration iteration. Defaults to half the
        trace length.
    :raises TraceTooShortError: if the trace cannot hold a calibration
        and a verification segment.
    """
    length = len(trace)

    if n_split is None:
        n_split = length // 2

    if not 1 <= n0 < n_split < length:
        raise TraceTooShortError(length, n0)

    exponent = 1.0 - 1.0 / cfg.alpha
    norms = trace.grad_norms()
    # running[j] is the minimum over iterations n0 .. n0 + j
    running = np.minimum.accumulate(norms[n0 - 1 :])
    n1 = np.arange(n0, length + 1, dtype=float)
    width = (n1 + 1) ** exponent - float(n0) ** exponent
    required = running ** 2 * width

    calibration = slice(1, n_split - n0 + 1)
    verification = slice(n_split - n0 + 1, None)
    eta = float(required[calibration].max())
    holds = bool(np.all(required[verification] <= eta * (1 + 1e-12)))
    return EnvelopeCheck(eta, holds)
