"""Experiment configuration and the flat ``key = value`` config file.

A config file looks like this::

    # iris, proposed method
    dataset.builtin = iris
    k = 3
    method = ssc_mcp
    penalty.lambda = pow10:0..6
    penalty.beta = pow10:0..6
    kmeans.restarts = 100

Every key corresponds to one command line option; options given on the
command line win over the file.
"""
import enum
import itertools
import typing as t
from dataclasses import dataclass
from dataclasses import field
from dataclasses import fields
from gettext import gettext as _

from .clustering import AffinityParams
from .datasets import Dataset
from .datasets import load_builtin
from .datasets import load_csv
from .datasets import SUBSAMPLE_SEED
from .exceptions import ConfigError
from .penalties import make_penalty
from .penalties import PenaltyKind
from .penalties import PenaltySpec
from .penalties import SCAD_DEFAULT_A
from .solver import SolverConfig

#: Config file key -> command line parameter name.
CONFIG_KEYS = {
    "dataset.path": "data",
    "dataset.builtin": "builtin",
    "dataset.label_column": "label_column",
    "dataset.subsample": "subsample",
    "dataset.seed": "subsample_seed",
    "k": "clusters",
    "affinity": "affinity",
    "affinity.self_loops": "self_loops",
    "method": "method",
    "warm_start": "warm_start",
    "penalty.lambda": "lam",
    "penalty.beta": "beta",
    "penalty.a": "scad_a",
    "penalty.rho_floor": "rho_floor",
    "solver.tau": "tau",
    "solver.c": "c",
    "solver.kappa": "kappa",
    "solver.alpha": "alpha",
    "solver.epsilon_step": "epsilon_step",
    "solver.gamma_first": "gamma_first",
    "solver.max_iters": "max_iters",
    "solver.max_shrinks": "max_shrinks",
    "solver.grad_tol": "grad_tol",
    "kmeans.restarts": "restarts",
    "kmeans.seed": "seed",
    "workers": "workers",
}

#: Parameters of ``solve`` that a config file may set.
SOLVER_PARAMS = frozenset(f.name for f in fields(SolverConfig))


class Method(enum.Enum):
    SC = "sc"
    SSC_L1 = "ssc_l1"
    SSC_MCP = "ssc_mcp"
    SSC_SCAD = "ssc_scad"

    @property
    def penalty_kind(self) -> t.Optional[PenaltyKind]:
        """The penalty of an SSC method, ``None`` for plain SC."""
        if self is Method.SC:
            return None

        return PenaltyKind(self.value[len("ssc_") :])

    @property
    def has_shape(self) -> bool:
        return self in (Method.SSC_MCP, Method.SSC_SCAD)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines one clustering experiment.

    Exactly one of ``data_path`` and ``builtin`` names the dataset.
    ``lambdas`` and ``shapes`` are the search grids; a single run uses a
    grid with one point. ``shapes`` holds MCP ``beta`` or SCAD ``a``
    values and is ignored by the other methods.
    """

    k: int
    method: Method = Method.SC
    data_path: t.Optional[str] = None
    builtin: t.Optional[str] = None
    label_column: str = "label"
    subsample: t.Optional[int] = None
    subsample_seed: int = SUBSAMPLE_SEED
    affinity: AffinityParams = field(default_factory=AffinityParams)
    lambdas: t.Tuple[float, ...] = (0.0,)
    shapes: t.Optional[t.Tuple[float, ...]] = None
    rho_floor: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    restarts: int = 100
    seed: int = 0
    warm_start: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.method, Method):
            object.__setattr__(self, "method", Method(self.method))

        if (self.data_path is None) == (self.builtin is None):
            raise ConfigError(_("give exactly one of a file or a builtin dataset"))

        if self.k < 2:
            raise ConfigError(_("must be at least 2"), key="k")

        if self.restarts < 1:
            raise ConfigError(_("must be at least 1"), key="kmeans.restarts")

        if self.subsample is not None and self.subsample < 1:
            raise ConfigError(_("must be positive"), key="dataset.subsample")

        if self.method is not Method.SC and not self.lambdas:
            raise ConfigError(_("the grid is empty"), key="penalty.lambda")

        if self.shapes is None:
            default = {Method.SSC_MCP: (1.0,), Method.SSC_SCAD: (SCAD_DEFAULT_A,)}
            object.__setattr__(self, "shapes", default.get(self.method, ()))
        elif self.method.has_shape and not self.shapes:
            key = "penalty.beta" if self.method is Method.SSC_MCP else "penalty.a"
            raise ConfigError(_("the grid is empty"), key=key)

        # validate every grid point up front
        for lam, shape in self.grid_points():
            self.penalty(lam, shape)

    @property
    def dataset_name(self) -> str:
        if self.builtin is not None:
            return self.builtin

        return str(self.data_path)

    def grid_points(self) -> t.List[t.Tuple[float, t.Optional[float]]]:
        """The ``(lambda, shape)`` pairs to run, in grid order. MCP and
        SCAD use the full Cartesian product of both grids.
        """
        if self.method is Method.SC:
            return [(0.0, None)]

        if not self.method.has_shape:
            return [(lam, None) for lam in self.lambdas]

        assert self.shapes is not None
        return list(itertools.product(self.lambdas, self.shapes))

    def penalty(self, lam: float, shape: t.Optional[float]) -> t.Optional[PenaltySpec]:
        kind = self.method.penalty_kind

        if kind is None:
            return None

        return make_penalty(kind.value, lam, shape, rho_floor=self.rho_floor)

    def load_dataset(self) -> Dataset:
        if self.builtin is not None:
            dataset = load_builtin(self.builtin, seed=self.subsample_seed)

            if self.subsample:
                dataset = dataset.subsample(self.subsample, self.subsample_seed)

            return dataset

        assert self.data_path is not None
        return load_csv(
            self.data_path, self.label_column, self.subsample, self.subsample_seed
        )

    def to_info_dict(self) -> t.Dict[str, t.Any]:
        return {
            "dataset": self.dataset_name,
            "subsample": self.subsample,
            "subsample_seed": self.subsample_seed,
            "k": self.k,
            "method": self.method.value,
            "affinity": self.affinity.to_info_dict(),
            "rho_floor": self.rho_floor,
            "solver": self.solver.to_info_dict(),
            "restarts": self.restarts,
            "seed": self.seed,
            "warm_start": self.warm_start,
        }


def read_config_file(path: str) -> t.Dict[str, str]:
    """Parse a config file into command line parameter names and raw
    string values, ready to serve as a :attr:`click.Context.default_map`.

    :raises ConfigError: for a malformed line or an unknown key.
    """
    values: t.Dict[str, str] = {}

    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(
            _("cannot read config file {path!r}: {error}").format(
                path=path, error=e.strerror or e
            )
        ) from e

    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()

        if not line:
            continue

        key, sep, value = line.partition("=")
        key = key.strip()

        if not sep or not key:
            raise ConfigError(
                _("{path}:{number}: expected 'key = value'").format(
                    path=path, number=number
                )
            )

        if key not in CONFIG_KEYS:
            raise ConfigError(
                _("{path}:{number}: unknown key").format(path=path, number=number),
                key=key,
            )

        values[CONFIG_KEYS[key]] = value.strip()

    return values


def solver_config_from(params: t.Mapping[str, t.Any]) -> SolverConfig:
    """Build a :class:`SolverConfig` from the parameters that are set."""
    return SolverConfig(
        **{
            name: params[name]
            for name in SOLVER_PARAMS
            if params.get(name) is not None
        }
    )
