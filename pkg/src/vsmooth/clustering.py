"""The spectral clustering pipeline around the optimizer.

Data points become a Gaussian affinity graph, the graph a normalized
Laplacian, the Laplacian an ``N x k`` basis (the eigenvector baseline or
the optimizer output), and the row-normalized basis is clustered by
k-means and scored against ground truth.
"""
import enum
import logging
import typing as t
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from gettext import gettext as _

import numpy as np
import scipy.linalg
from scipy.spatial.distance import pdist
from scipy.spatial.distance import squareform
from sklearn.cluster import KMeans
from sklearn.metrics import adjusted_rand_score
from sklearn.metrics import normalized_mutual_info_score

from .exceptions import ConfigError
from .exceptions import DimensionError
from .exceptions import GraphError
from .exceptions import NumericalError
from .solver import SolverTrace

logger = logging.getLogger(__name__)

#: Lloyd iteration cap per k-means restart.
KMEANS_MAX_ITER = 300


class AffinityMethod(enum.Enum):
    LOCAL_SCALING = "local"
    FIXED = "fixed"


@dataclass(frozen=True)
class AffinityParams:
    """How the affinity matrix is built.

    ``local`` uses ``exp(-d_ij^2 / (s_i s_j))`` where ``s_i`` is the
    distance from point ``i`` to its ``neighbor_index``-th nearest
    neighbor. ``fixed`` uses ``exp(-d_ij^2 / sigma^2)``.
    """

    method: AffinityMethod = AffinityMethod.LOCAL_SCALING
    neighbor_index: int = 7
    sigma: float = 1.0
    self_loops: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.method, AffinityMethod):
            object.__setattr__(self, "method", AffinityMethod(self.method))

        if self.neighbor_index < 1:
            raise ConfigError(_("must be at least 1"), key="affinity.neighbor_index")

        if not self.sigma > 0:
            raise ConfigError(_("must be positive"), key="affinity.sigma")

    def describe(self) -> str:
        if self.method is AffinityMethod.FIXED:
            recipe = f"gaussian kernel, fixed sigma={self.sigma:g}"
        else:
            recipe = (
                "gaussian kernel with local scaling,"
                f" neighbor index {self.neighbor_index}"
            )

        if self.self_loops:
            recipe += ", self loops kept"

        return recipe

    def to_info_dict(self) -> t.Dict[str, t.Any]:
        info: t.Dict[str, t.Any] = {
            "method": self.method.value,
            "self_loops": self.self_loops,
        }

        if self.method is AffinityMethod.FIXED:
            info["sigma"] = self.sigma
        else:
            info["neighbor_index"] = self.neighbor_index

        return info


def affinity(data: np.ndarray, params: AffinityParams) -> np.ndarray:
    """Symmetric nonnegative affinity matrix of the rows of ``data``.

    :raises GraphError: if local scaling meets a point whose scale is
        zero because it has too many exact duplicates.
    """
    X = np.asarray(data, dtype=float)

    if X.ndim == 1:
        X = X[:, None]

    N = X.shape[0]

    if N < 2:
        raise DimensionError(_("need at least 2 points, got {N}").format(N=N))

    if not np.all(np.isfinite(X)):
        raise GraphError(_("data contains non-finite coordinates"))

    sq_dist = squareform(pdist(X, "sqeuclidean"))

    if params.method is AffinityMethod.FIXED:
        W = np.exp(-sq_dist / params.sigma ** 2)
    else:
        m = params.neighbor_index

        if m > N - 1:
            raise ConfigError(
                _("neighbor index {m} needs more than {N} points").format(m=m, N=N),
                key="affinity.neighbor_index",
            )

        scale = np.sort(np.sqrt(sq_dist), axis=1)[:, m]
        zero = np.flatnonzero(scale == 0)

        if zero.size:
            raise GraphError(
                _(
                    "local scale is zero because the point has {m} or more"
                    " duplicates; add jitter or use the fixed-sigma affinity"
                ).format(m=m),
                index=int(zero[0]),
            )

        W = np.exp(-sq_dist / np.outer(scale, scale))

    if not params.self_loops:
        np.fill_diagonal(W, 0.0)

    return W


def normalized_laplacian(W: np.ndarray) -> np.ndarray:
    """``I - D^{-1/2} W D^{-1/2}`` with ``D`` the degree matrix.

    :raises GraphError: if a point has zero degree.
    """
    W = np.asarray(W, dtype=float)

    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionError(
            _("affinity must be square, got shape {shape}").format(shape=W.shape)
        )

    if np.any(W < 0):
        raise GraphError(_("affinity has negative entries"))

    degree = W.sum(axis=1)
    isolated = np.flatnonzero(degree <= 0)

    if isolated.size:
        raise GraphError(_("point is isolated (zero degree)"), index=int(isolated[0]))

    scale = 1 / np.sqrt(degree)
    L = np.eye(W.shape[0]) - scale[:, None] * W * scale[None, :]
    return (L + L.T) / 2


def sc_baseline(L: np.ndarray, k: int) -> np.ndarray:
    """Orthonormal eigenvectors of the ``k`` smallest eigenvalues of
    ``L``, in ascending eigenvalue order.
    """
    N = L.shape[0]

    if not 1 <= k <= N:
        raise ConfigError(_("must satisfy 1 <= k <= {N}").format(N=N), key="k")

    try:
        _values, vectors = scipy.linalg.eigh(L, subset_by_index=[0, k - 1])
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(
            _("eigensolver failed: {error}").format(error=e)
        ) from e

    return vectors


def row_normalize(U: np.ndarray) -> t.Tuple[np.ndarray, np.ndarray]:
    """Scale every row to unit length.

    Zero rows stay zero and are flagged in the returned boolean mask.
    """
    U = np.asarray(U, dtype=float)
    norms = np.linalg.norm(U, axis=1)
    zero = norms == 0

    if np.any(zero):
        logger.warning(
            "%d zero rows left unnormalized (first at %d)",
            int(zero.sum()),
            int(np.flatnonzero(zero)[0]),
        )

    safe = np.where(zero, 1.0, norms)
    return U / safe[:, None], zero


@dataclass
class KMeansResult:
    #: Labels of the restart with the smallest within-cluster SSE.
    best_labels: np.ndarray
    #: One row of labels per restart.
    labels: np.ndarray
    inertia: np.ndarray


def restart_seeds(seed: int, restarts: int) -> t.List[int]:
    """Independent integer seeds, one per restart."""
    children = np.random.SeedSequence(seed).spawn(restarts)
    return [int(child.generate_state(1)[0]) for child in children]


def _lloyd(points: np.ndarray, k: int, seed: int) -> t.Tuple[np.ndarray, float]:
    model = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=1,
        max_iter=KMEANS_MAX_ITER,
        algorithm="lloyd",
        random_state=seed,
    )
    labels = model.fit_predict(points)
    return labels, float(model.inertia_)


def kmeans(
    points: np.ndarray, k: int, restarts: int, seed: int, workers: int = 1
) -> KMeansResult:
    """k-means with k-means++ seeding, restarted ``restarts`` times.

    Every restart keeps its labels. Restarts run on ``workers`` threads;
    the result does not depend on the number of workers.
    """
    if restarts < 1:
        raise ConfigError(_("must be at least 1"), key="kmeans.restarts")

    points = np.asarray(points, dtype=float)

    if not 1 <= k <= points.shape[0]:
        raise ConfigError(
            _("must satisfy 1 <= k <= {N}").format(N=points.shape[0]), key="k"
        )

    seeds = restart_seeds(seed, restarts)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda s: _lloyd(points, k, s), seeds))
    else:
        outcomes = [_lloyd(points, k, s) for s in seeds]

    labels = np.array([o[0] for o in outcomes], dtype=int)
    inertia = np.array([o[1] for o in outcomes])
    return KMeansResult(labels[int(np.argmin(inertia))], labels, inertia)


def _check_labels(a: t.Sequence[int], b: t.Sequence[int]) -> None:
    if len(a) != len(b):
        raise DimensionError(
            _("labelings have different lengths {a} and {b}").format(
                a=len(a), b=len(b)
            )
        )

    if len(a) == 0:
        raise DimensionError(_("labelings are empty"))


def nmi(a: t.Sequence[int], b: t.Sequence[int]) -> float:
    """Normalized mutual information with geometric normalization."""
    _check_labels(a, b)
    return float(normalized_mutual_info_score(a, b, average_method="geometric"))


def ari(a: t.Sequence[int], b: t.Sequence[int]) -> float:
    """Adjusted Rand index. Can be negative."""
    _check_labels(a, b)
    return float(adjusted_rand_score(a, b))


@dataclass
class ClusteringReport:
    """Result of one pipeline run, scored over all k-means restarts."""

    dataset: str
    method: str
    k: int
    hyperparameters: t.Dict[str, t.Any]
    labels: np.ndarray
    nmi_mean: float
    nmi_std: float
    ari_mean: float
    ari_std: float
    trace_summary: t.Optional[t.Dict[str, t.Any]] = None
    deviations: t.List[str] = field(default_factory=list)
    seeds: t.Dict[str, t.Any] = field(default_factory=dict)
    #: The experiment settings that produced the report.
    settings: t.Dict[str, t.Any] = field(default_factory=dict)
    runtime: float = 0.0
    #: The full solver trace. Only its summary is serialized.
    trace: t.Optional[SolverTrace] = field(default=None, repr=False, compare=False)

    @classmethod
    def score(
        cls,
        labels: np.ndarray,
        truth: t.Sequence[int],
        **kwargs: t.Any,
    ) -> "ClusteringReport":
        """Score every restart in ``labels`` against ``truth``."""
        nmis = np.array([nmi(truth, row) for row in labels])
        aris = np.array([ari(truth, row) for row in labels])
        return cls(
            labels=np.asarray(labels, dtype=int),
            nmi_mean=float(nmis.mean()),
            nmi_std=float(nmis.std()),
            ari_mean=float(aris.mean()),
            ari_std=float(aris.std()),
            **kwargs,
        )

    def to_info_dict(self, include_timing: bool = False) -> t.Dict[str, t.Any]:
        info = {
            "dataset": self.dataset,
            "method": self.method,
            "k": self.k,
            "hyperparameters": self.hyperparameters,
            "nmi": {"mean": self.nmi_mean, "std": self.nmi_std},
            "ari": {"mean": self.ari_mean, "std": self.ari_std},
            "labels": self.labels.tolist(),
            "trace": self.trace_summary,
            "deviations": list(self.deviations),
            "seeds": self.seeds,
            "settings": self.settings,
        }

        if include_timing:
            info["runtime"] = self.runtime

        return info

    @classmethod
    def from_info_dict(cls, info: t.Dict[str, t.Any]) -> "ClusteringReport":
        return cls(
            dataset=info["dataset"],
            method=info["method"],
            k=info["k"],
            hyperparameters=info["hyperparameters"],
            labels=np.asarray(info["labels"], dtype=int),
            nmi_mean=info["nmi"]["mean"],
            nmi_std=info["nmi"]["std"],
            ari_mean=info["ari"]["mean"],
            ari_std=info["ari"]["std"],
            trace_summary=info.get("trace"),
            deviations=list(info.get("deviations", [])),
            seeds=info.get("seeds", {}),
            settings=info.get("settings", {}),
            runtime=info.get("runtime", 0.0),
        )
