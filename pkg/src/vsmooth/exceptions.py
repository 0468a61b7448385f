import typing as t
from gettext import gettext as _

from click import ClickException


class VsmoothException(ClickException):
    """Base class for every error raised by vsmooth. It is a
    :exc:`click.ClickException`, so the command line shows it as
    ``Error: <message>`` and exits with :attr:`exit_code`.
    """

    #: The exit code for this exception.
    exit_code = 1


class ConfigError(VsmoothException):
    """An experiment, solver or penalty setting is invalid.

    :param message: the error message to display.
    :param key: the configuration key or field that caused the error.
    """

    exit_code = 2

    def __init__(self, message: str, key: t.Optional[str] = None) -> None:
        super().__init__(message)
        self.key = key

    def format_message(self) -> str:
        if self.key is None:
            return _("Invalid configuration: {message}").format(message=self.message)

        return _("Invalid value for {key!r}: {message}").format(
            key=self.key, message=self.message
        )


class ScheduleError(VsmoothException):
    """The proximal step ``mu`` violates ``mu * rho < 1``, so the prox
    subproblem is not strongly convex. With the smoothing schedule this
    only happens when ``tau`` or ``rho_eff`` is misconfigured.
    """

    def __init__(self, mu: float, rho: float) -> None:
        super().__init__(
            _("mu * rho = {product:.6g} must be below 1").format(product=mu * rho)
        )
        self.mu = mu
        self.rho = rho

    def format_message(self) -> str:
        return _(
            "{message} (mu={mu:.6g}, rho={rho:.6g}); check that tau > 2 and"
            " that the weak-convexity modulus is not underestimated."
        ).format(message=self.message, mu=self.mu, rho=self.rho)


class DimensionError(VsmoothException):
    """Array shapes do not fit together."""


class NotOrthonormalError(VsmoothException):
    """A matrix expected to have orthonormal columns does not.

    :param defect: the measured ``||Q^T Q - I||_F``.
    :param tol: the tolerance that was exceeded.
    """

    def __init__(self, what: str, defect: float, tol: float) -> None:
        super().__init__(what)
        self.defect = defect
        self.tol = tol

    def format_message(self) -> str:
        return _(
            "{what} is not orthonormal: ||Q^T Q - I|| = {defect:.3g} > {tol:.1g}"
        ).format(what=self.message, defect=self.defect, tol=self.tol)


class NumericalError(VsmoothException):
    """A dense factorization or eigensolver failed. For the inputs the
    library constructs itself this indicates an internal fault.
    """


class BacktrackingError(VsmoothException):
    """The Armijo search did not accept a step within ``max_shrinks``
    reductions. The gradient is inconsistent with the objective or the
    objective is not smooth at the current point.
    """

    def __init__(self, shrinks: int, gamma: float) -> None:
        super().__init__(
            _("no Armijo step after {shrinks} shrinks").format(shrinks=shrinks)
        )
        self.shrinks = shrinks
        self.gamma = gamma

    def format_message(self) -> str:
        return _(
            "{message} (last stepsize {gamma:.3g}); the gradient does not"
            " match the objective."
        ).format(message=self.message, gamma=self.gamma)


class NonFiniteError(VsmoothException):
    """The objective or its gradient became NaN or infinite."""

    def __init__(self, iteration: int, quantity: str) -> None:
        super().__init__(
            _("non-finite {quantity} at iteration {n}").format(
                quantity=quantity, n=iteration
            )
        )
        self.iteration = iteration
        self.quantity = quantity


class TraceTooShortError(VsmoothException):
    """The trace has too few records for the requested diagnostic."""

    def __init__(self, length: int, n0: int) -> None:
        super().__init__(
            _("trace of length {length} is too short for n0={n0}").format(
                length=length, n0=n0
            )
        )
        self.length = length
        self.n0 = n0


class GraphError(VsmoothException):
    """The affinity graph cannot be built or normalized.

    :param index: the offending point, if a single point is to blame.
    """

    def __init__(self, message: str, index: t.Optional[int] = None) -> None:
        super().__init__(message)
        self.index = index

    def format_message(self) -> str:
        if self.index is None:
            return self.message

        return _("point {index}: {message}").format(
            index=self.index, message=self.message
        )


class DatasetError(VsmoothException):
    """A dataset file cannot be read.

    :param path: the file that was read.
    :param row: 1-based data row, not counting the header.
    :param column: the column name involved.
    """

    def __init__(
        self,
        path: str,
        message: str,
        row: t.Optional[int] = None,
        column: t.Optional[str] = None,
    ) -> None:
        super().__init__(message)
        self.path = path
        self.row = row
        self.column = column

    def format_message(self) -> str:
        where = []

        if self.row is not None:
            where.append(_("row {row}").format(row=self.row))

        if self.column is not None:
            where.append(_("column {column!r}").format(column=self.column))

        location = f" ({', '.join(where)})" if where else ""
        return _("Could not load {path!r}{location}: {message}").format(
            path=self.path, location=location, message=self.message
        )


class PipelineError(VsmoothException):
    """A step of the clustering pipeline failed.

    :param stage: the pipeline stage, e.g. ``"affinity"`` or ``"solver"``.
    :param cause: the underlying exception.
    """

    def __init__(self, stage: str, cause: BaseException) -> None:
        if isinstance(cause, ClickException):
            message = cause.format_message()
        else:
            message = str(cause) or type(cause).__name__

        super().__init__(message)
        self.stage = stage
        self.cause = cause

    def format_message(self) -> str:
        return _("{stage} stage failed: {message}").format(
            stage=self.stage, message=self.message
        )
