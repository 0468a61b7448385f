"""Running clustering experiments: one configuration, a hyperparameter
grid, and rendering the results.
"""
import csv
import json
import logging
import time
import typing as t
from concurrent.futures import as_completed
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from gettext import gettext as _

from . import solver
from .clustering import affinity
from .clustering import ClusteringReport
from .clustering import kmeans
from .clustering import normalized_laplacian
from .clustering import row_normalize
from .clustering import sc_baseline
from .config import ExperimentConfig
from .config import Method
from .datasets import Dataset
from .exceptions import ConfigError
from .exceptions import PipelineError
from .exceptions import VsmoothException
from .formatting import ScoreEntry
from .formatting import TableFormatter
from .parametrization import BasisMatrix
from .parametrization import ParamPoint
from .parametrization import select_S
from .ssc_model import SscProblem

logger = logging.getLogger(__name__)

#: Published NMI and ARI scores, ``(nmi, nmi_std, ari, ari_std)`` keyed
#: by method and dataset. ``ssc_l1_relax`` is the convex relaxation
#: baseline, which is not implemented here.
PUBLISHED_SCORES: t.Dict[str, t.Dict[str, t.Tuple[float, float, float, float]]] = {
    "sc": {
        "iris": (0.732, 0.000, 0.715, 0.000),
        "shuttle": (0.427, 0.076, 0.250, 0.104),
        "segmentation": (0.454, 0.035, 0.289, 0.031),
    },
    "ssc_l1_relax": {
        "iris": (0.706, 0.007, 0.700, 0.037),
        "shuttle": (0.434, 0.070, 0.236, 0.103),
        "segmentation": (0.468, 0.025, 0.303, 0.020),
    },
    "ssc_l1": {
        "iris": (0.736, 0.000, 0.723, 0.000),
        "shuttle": (0.461, 0.066, 0.275, 0.094),
        "segmentation": (0.471, 0.022, 0.304, 0.019),
    },
    "ssc_mcp": {
        "iris": (0.756, 0.005, 0.740, 0.020),
        "shuttle": (0.569, 0.061, 0.412, 0.066),
        "segmentation": (0.472, 0.023, 0.306, 0.023),
    },
}

#: Stages of :func:`run_method`, in order.
STAGES = ("affinity", "laplacian", "baseline", "solver", "kmeans", "metrics")

GRID_COLUMNS = (
    "lambda",
    "shape",
    "nmi_mean",
    "nmi_std",
    "ari_mean",
    "ari_std",
    "status",
    "best",
)


@contextmanager
def _stage(name: str) -> t.Iterator[None]:
    try:
        yield
    except PipelineError:
        raise
    except Exception as e:
        raise PipelineError(name, e) from e


def run_method(
    cfg: ExperimentConfig,
    dataset: Dataset,
    lam: t.Optional[float] = None,
    shape: t.Optional[float] = None,
    workers: int = 1,
) -> ClusteringReport:
    """Cluster ``dataset`` with the method of ``cfg`` and score the
    result against the ground truth labels.

    SSC methods start from the SC solution: ``S`` is chosen so that
    ``V = 0`` maps to the SC eigenvectors, and the solver runs from
    there. ``lam`` and ``shape`` pick one grid point; when omitted the
    grid of ``cfg`` must consist of exactly one point.

    :param workers: threads for the k-means restarts.
    :raises PipelineError: naming the stage that failed.
    """
    if lam is None:
        points = cfg.grid_points()

        if len(points) != 1:
            raise ConfigError(
                _(
                    "a single run needs one grid point, got {n}; use a grid search"
                ).format(n=len(points)),
                key="penalty.lambda",
            )

        lam, shape = points[0]

    start = time.perf_counter()
    deviations = [f"affinity: {cfg.affinity.describe()}"]
    logger.info(
        "running %s on %s (N=%d, k=%d, lambda=%g)",
        cfg.method.value,
        cfg.dataset_name,
        dataset.N,
        cfg.k,
        lam,
    )

    with _stage("affinity"):
        W = affinity(dataset.features, cfg.affinity)

    with _stage("laplacian"):
        L = normalized_laplacian(W)

    with _stage("baseline"):
        U = sc_baseline(L, cfg.k)

    trace = None
    penalty = cfg.penalty(lam, shape)

    if penalty is not None:
        with _stage("solver"):
            if cfg.warm_start:
                S = select_S(U)
                deviations.append(
                    "basis: S completes the SC eigenvectors by full QR, start at V = 0"
                )
            else:
                S = BasisMatrix.identity(dataset.N)
                deviations.append("basis: S = I, start at V = 0 without warm start")

            problem = SscProblem(L, cfg.k, penalty, S)
            trace = solver.run(problem, ParamPoint.zeros(dataset.N, cfg.k), cfg.solver)
            U = problem.point(trace.y)

    for deviation in deviations:
        logger.info("%s", deviation)

    with _stage("kmeans"):
        points, _zero_rows = row_normalize(U)
        clusters = kmeans(points, cfg.k, cfg.restarts, cfg.seed, workers)

    hyperparameters: t.Dict[str, t.Any] = {}

    if cfg.method is not Method.SC:
        hyperparameters["lambda"] = lam

    if cfg.method is Method.SSC_MCP:
        hyperparameters["beta"] = shape
    elif cfg.method is Method.SSC_SCAD:
        hyperparameters["a"] = shape

    with _stage("metrics"):
        report = ClusteringReport.score(
            clusters.labels,
            dataset.labels,
            dataset=cfg.dataset_name,
            method=cfg.method.value,
            k=cfg.k,
            hyperparameters=hyperparameters,
            trace_summary=None if trace is None else trace.summary(),
            deviations=deviations,
            seeds={"kmeans": cfg.seed, "subsample": cfg.subsample_seed},
            settings=cfg.to_info_dict(),
        )

    report.trace = trace
    report.runtime = time.perf_counter() - start
    logger.info(
        "NMI %.3f (%.3f), ARI %.3f (%.3f) in %.2fs",
        report.nmi_mean,
        report.nmi_std,
        report.ari_mean,
        report.ari_std,
        report.runtime,
    )
    return report


@dataclass
class GridRow:
    lam: float
    shape: t.Optional[float]
    report: t.Optional[ClusteringReport] = None
    error: t.Optional[str] = None
    best: bool = False

    @property
    def ok(self) -> bool:
        return self.report is not None

    @property
    def status(self) -> str:
        return "ok" if self.ok else f"error: {self.error}"


@dataclass
class GridResult:
    best: ClusteringReport
    rows: t.List[GridRow]

    def to_csv(self, file: t.TextIO) -> None:
        """One row per grid point, in grid order."""
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(GRID_COLUMNS)

        for row in self.rows:
            scores: t.List[t.Any] = ["", "", "", ""]

            if row.report is not None:
                scores = [
                    row.report.nmi_mean,
                    row.report.nmi_std,
                    row.report.ari_mean,
                    row.report.ari_std,
                ]

            shape = "" if row.shape is None else row.shape
            writer.writerow([row.lam, shape, *scores, row.status, int(row.best)])


def _run_point(
    cfg: ExperimentConfig, dataset: Dataset, lam: float, shape: t.Optional[float]
) -> GridRow:
    try:
        report = run_method(cfg, dataset, lam, shape)
    except VsmoothException as e:
        logger.warning("grid point lambda=%g shape=%s failed: %s", lam, shape, e)
        return GridRow(lam, shape, error=e.format_message())

    return GridRow(lam, shape, report)


def grid_search(
    cfg: ExperimentConfig,
    dataset: Dataset,
    workers: int = 1,
    on_result: t.Optional[t.Callable[[GridRow], None]] = None,
) -> GridResult:
    """Run every grid point of ``cfg`` and pick the best.

    The best point has the highest mean NMI, then the highest mean ARI,
    then the smallest ``lambda``. Failed points are kept in the table
    and skipped. Rows are in grid order however many workers run. The
    selection rule is added to the deviations of the best report.

    :param on_result: called with every finished row, in completion
        order.
    """
    points = cfg.grid_points()
    rows: t.List[t.Optional[GridRow]] = [None] * len(points)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(_run_point, cfg, dataset, lam, shape): index
            for index, (lam, shape) in enumerate(points)
        }

        for future in as_completed(futures):
            row = future.result()
            rows[futures[future]] = row

            if on_result is not None:
                on_result(row)

    done = t.cast(t.List[GridRow], rows)
    finished = [row for row in done if row.report is not None]

    if not finished:
        raise VsmoothException(
            _("every grid point failed, first error: {error}").format(
                error=done[0].error
            )
        )

    def rank(row: GridRow) -> t.Tuple[float, float, float]:
        assert row.report is not None
        return (row.report.nmi_mean, row.report.ari_mean, -row.lam)

    winner = max(finished, key=rank)
    winner.best = True
    assert winner.report is not None
    selection = (
        f"selection: {len(finished)} of {len(done)} grid points scored, best"
        " by mean NMI, then mean ARI, then smaller lambda"
    )
    winner.report.deviations.append(selection)
    logger.info("%s", selection)
    return GridResult(winner.report, done)


def report_entry(report: ClusteringReport) -> ScoreEntry:
    return ScoreEntry(
        report.method,
        report.dataset,
        report.nmi_mean,
        report.nmi_std,
        report.ari_mean,
        report.ari_std,
    )


def published_entries(
    datasets: t.Optional[t.Iterable[str]] = None,
) -> t.List[ScoreEntry]:
    """Published scores as reference table entries, limited to
    ``datasets`` if given.
    """
    wanted = None if datasets is None else set(datasets)
    entries = []

    for method, scores in PUBLISHED_SCORES.items():
        for dataset, (nmi, nmi_std, ari, ari_std) in scores.items():
            if wanted is None or dataset in wanted:
                entries.append(
                    ScoreEntry(method, dataset, nmi, nmi_std, ari, ari_std, True)
                )

    return entries


def render_text(report: ClusteringReport) -> str:
    formatter = TableFormatter()
    formatter.write_scores([report_entry(report)])

    if report.hyperparameters:
        with formatter.section(_("Hyperparameters")):
            for name, value in sorted(report.hyperparameters.items()):
                formatter.write(f"{'':>{formatter.current_indent}}{name} = {value:g}\n")

    if report.trace_summary:
        with formatter.section(_("Solver")):
            for name, value in report.trace_summary.items():
                text = f"{value:.6g}" if isinstance(value, float) else str(value)
                formatter.write(f"{'':>{formatter.current_indent}}{name}: {text}\n")

    with formatter.section(_("Deviations")):
        for deviation in report.deviations:
            formatter.write(f"{'':>{formatter.current_indent}}{deviation}\n")

    return formatter.getvalue()


def emit_report(
    report: ClusteringReport,
    fmt: str,
    file: t.TextIO,
    include_timing: bool = False,
) -> None:
    """Write ``report`` to ``file``.

    ``json``
        The full report, keys sorted. Identical runs give identical
        bytes unless ``include_timing`` adds the wall-clock time.
    ``text``
        The score table with the settings that produced it.
    ``csv``
        The solver trace, one row per iteration.
    """
    if fmt == "json":
        json.dump(report.to_info_dict(include_timing), file, sort_keys=True, indent=2)
        file.write("\n")
    elif fmt == "text":
        file.write(render_text(report))
    elif fmt == "csv":
        if report.trace is None:
            raise ConfigError(
                _("the {method} method runs no solver, there is no trace").format(
                    method=report.method
                ),
                key="format",
            )

        report.trace.to_csv(file)
    else:
        raise ConfigError(_("unknown format {fmt!r}").format(fmt=fmt), key="format")


def load_report(file: t.TextIO) -> ClusteringReport:
    """Read a report written by :func:`emit_report` as JSON."""
    try:
        return ClusteringReport.from_info_dict(json.load(file))
    except (ValueError, KeyError, TypeError) as e:
        name = getattr(file, "name", "<report>")
        raise ConfigError(
            _("{name} is not a report: {error}").format(name=name, error=e)
        ) from e
