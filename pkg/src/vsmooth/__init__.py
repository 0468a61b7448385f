"""
vsmooth minimizes nonsmooth weakly convex penalties composed with smooth
maps over a parametrized set by gradient descent on Moreau envelopes
whose smoothing parameter shrinks along a schedule. The bundled
application is sparse spectral clustering on the Grassmann manifold.
"""
from .clustering import affinity
from .clustering import AffinityMethod
from .clustering import AffinityParams
from .clustering import ari
from .clustering import ClusteringReport
from .clustering import kmeans
from .clustering import nmi
from .clustering import normalized_laplacian
from .clustering import row_normalize
from .clustering import sc_baseline
from .config import ExperimentConfig
from .config import Method
from .config import read_config_file
from .datasets import Dataset
from .datasets import load_builtin
from .datasets import load_csv
from .exceptions import BacktrackingError
from .exceptions import ConfigError
from .exceptions import DatasetError
from .exceptions import DimensionError
from .exceptions import GraphError
from .exceptions import NonFiniteError
from .exceptions import NotOrthonormalError
from .exceptions import NumericalError
from .exceptions import PipelineError
from .exceptions import ScheduleError
from .exceptions import TraceTooShortError
from .exceptions import VsmoothException
from .experiment import emit_report
from .experiment import grid_search
from .experiment import run_method
from .parametrization import BasisMatrix
from .parametrization import cayley_adjoint
from .parametrization import cayley_dmap
from .parametrization import cayley_map
from .parametrization import CayleyChart
from .parametrization import ParamPoint
from .parametrization import select_S
from .penalties import make_penalty
from .penalties import moreau_grad
from .penalties import moreau_value
from .penalties import penalty_value
from .penalties import PenaltyKind
from .penalties import PenaltySpec
from .penalties import prox_matrix
from .penalties import prox_scalar
from .problems import builtin_problem
from .problems import CompositeProblem
from .solver import backtrack
from .solver import initial_stepsize_guess
from .solver import rate_envelope_check
from .solver import run
from .solver import schedule_mu
from .solver import SmoothedProblem
from .solver import SolverConfig
from .solver import SolverTrace
from .ssc_model import SscProblem

__version__ = "0.1.0.dev0"
