"""Command line parameter types for hyperparameter grids and affinity
recipes.
"""
import re
import typing as t
from gettext import gettext as _

import click

from .clustering import AffinityMethod
from .clustering import AffinityParams
from .exceptions import ConfigError

_POW10_RE = re.compile(r"^pow10:(\d+)\.\.(\d+)$")


def pow10_grid(first: int, last: int) -> t.Tuple[float, ...]:
    """``(10^-first, ..., 10^-last)``."""
    return tuple(10.0 ** -i for i in range(first, last + 1))


#: ``{10^-i | i = 0, ..., 6}``, the default search grid.
DEFAULT_GRID = pow10_grid(0, 6)


class FloatGrid(click.ParamType):
    """A nonempty tuple of nonnegative floats.

    Accepts a comma separated list like ``1,0.1,0.01`` or the shorthand
    ``pow10:I..J`` for ``10^-I, ..., 10^-J``. Duplicates are dropped,
    first occurrence wins.
    """

    name = "grid"

    def to_info_dict(self) -> t.Dict[str, t.Any]:
        info_dict = super().to_info_dict()
        info_dict["syntax"] = ["a,b,c", "pow10:I..J"]
        return info_dict

    def get_metavar(self, param: click.Parameter) -> str:
        return "GRID"

    def convert(
        self,
        value: t.Any,
        param: t.Optional[click.Parameter],
        ctx: t.Optional[click.Context],
    ) -> t.Tuple[float, ...]:
        if isinstance(value, (int, float)):
            value = (value,)

        if isinstance(value, (tuple, list)):
            return self._check([float(v) for v in value], param, ctx)

        text = str(value).strip()
        match = _POW10_RE.match(text)

        if match is not None:
            first, last = int(match.group(1)), int(match.group(2))

            if first > last:
                self.fail(
                    _("{value!r} is an empty range.").format(value=text), param, ctx
                )

            return pow10_grid(first, last)

        items = [item.strip() for item in text.split(",")]

        try:
            values = [float(item) for item in items if item]
        except ValueError:
            self.fail(
                _("{value!r} is not a comma separated list of numbers.").format(
                    value=text
                ),
                param,
                ctx,
            )

        return self._check(values, param, ctx)

    def _check(
        self,
        values: t.List[float],
        param: t.Optional[click.Parameter],
        ctx: t.Optional[click.Context],
    ) -> t.Tuple[float, ...]:
        if not values:
            self.fail(_("The grid is empty."), param, ctx)

        bad = [v for v in values if not v >= 0]

        if bad:
            self.fail(
                _("{value} is negative or not a number.").format(value=bad[0]),
                param,
                ctx,
            )

        return tuple(dict.fromkeys(values))

    def __repr__(self) -> str:
        return "GRID"


class AffinityType(click.ParamType):
    """``local`` or ``local:M`` for local scaling with the ``M``-th
    nearest neighbor, ``fixed:SIGMA`` for a fixed kernel width.
    """

    name = "affinity"

    def get_metavar(self, param: click.Parameter) -> str:
        return "[local[:M]|fixed:SIGMA]"

    def convert(
        self,
        value: t.Any,
        param: t.Optional[click.Parameter],
        ctx: t.Optional[click.Context],
    ) -> AffinityParams:
        if isinstance(value, AffinityParams):
            return value

        method, _sep, argument = str(value).strip().partition(":")

        try:
            if method == AffinityMethod.LOCAL_SCALING.value:
                if not argument:
                    return AffinityParams()

                return AffinityParams(neighbor_index=int(argument))

            if method == AffinityMethod.FIXED.value and argument:
                return AffinityParams(AffinityMethod.FIXED, sigma=float(argument))
        except ValueError:
            pass
        except ConfigError as e:
            self.fail(e.message, param, ctx)

        self.fail(
            _("{value!r} is not 'local', 'local:M' or 'fixed:SIGMA'.").format(
                value=value
            ),
            param,
            ctx,
        )

    def __repr__(self) -> str:
        return "AFFINITY"


GRID = FloatGrid()
AFFINITY = AffinityType()
