"""The ``vsmooth`` command line."""
import logging
import sys
import typing as t
from gettext import gettext as _

import click

from . import __version__
from . import solver as solver_
from .clustering import AffinityParams
from .config import ExperimentConfig
from .config import Method
from .config import read_config_file
from .config import solver_config_from
from .config import SOLVER_PARAMS
from .exceptions import TraceTooShortError
from .experiment import emit_report
from .experiment import grid_search
from .experiment import GridRow
from .experiment import load_report
from .experiment import published_entries
from .experiment import report_entry
from .experiment import run_method
from .formatting import TableFormatter
from .penalties import SCAD_DEFAULT_A
from .problems import BUILTIN_PROBLEMS
from .problems import builtin_problem
from .testing import run_checks
from .types import AFFINITY
from .types import DEFAULT_GRID
from .types import GRID

F = t.TypeVar("F", bound=t.Callable[..., t.Any])

_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def solver_options(f: F) -> F:
    """Options mirroring :class:`~vsmooth.solver.SolverConfig`. Unset
    options keep the config defaults.
    """
    options = [
        click.option("--tau", type=float, help="Schedule constant, above 2."),
        click.option("--c", "c", type=float, help="Armijo constant in (0, 1)."),
        click.option("--kappa", type=float, help="Backtracking factor in (0, 1)."),
        click.option("--alpha", type=float, help="Schedule exponent, above 1."),
        click.option("--epsilon-step", type=float, help="Stepsize guess floor."),
        click.option("--gamma-first", type=float, help="First stepsize guess."),
        click.option("--max-iters", type=int, help="Iteration cap (500)."),
        click.option("--max-shrinks", type=int, help="Backtracking cap (60)."),
        click.option(
            "--grad-tol", type=float, help="Stop once the gradient norm is this small."
        ),
    ]

    for option in reversed(options):
        f = option(f)

    return f


def experiment_options(f: F) -> F:
    """Options mirroring :class:`~vsmooth.config.ExperimentConfig`."""
    options = [
        click.option(
            "--data",
            type=click.Path(exists=True, dir_okay=False),
            help="CSV file with a header row.",
        ),
        click.option(
            "--builtin",
            type=click.Choice(["iris", "blobs"]),
            help="Use a bundled dataset instead of a file.",
        ),
        click.option(
            "--label-column",
            default="label",
            show_default=True,
            help="Name of the ground truth column.",
        ),
        click.option(
            "--subsample",
            type=click.IntRange(min=0),
            default=0,
            help="Keep this many random rows, 0 keeps all.",
        ),
        click.option(
            "--subsample-seed", type=int, default=42, show_default=True
        ),
        click.option(
            "-k", "--clusters", type=click.IntRange(min=2), required=True
        ),
        click.option(
            "--affinity",
            type=AFFINITY,
            default="local:7",
            show_default=True,
            help="Gaussian kernel with local scaling or a fixed width.",
        ),
        click.option("--self-loops", is_flag=True, help="Keep the graph diagonal."),
        click.option(
            "--method",
            type=click.Choice([m.value for m in Method]),
            default="sc",
            show_default=True,
        ),
        click.option(
            "--warm-start/--no-warm-start",
            default=True,
            show_default=True,
            help="Start SSC at the SC solution.",
        ),
        click.option("--lambda", "lam", type=GRID, help="Penalty weight(s)."),
        click.option("--beta", type=GRID, help="MCP shape value(s)."),
        click.option("--scad-a", type=GRID, help="SCAD shape value(s)."),
        click.option(
            "--rho-floor",
            type=click.FloatRange(min=0, min_open=True),
            default=1.0,
            help="Schedule modulus for the l1 penalty.",
        ),
        solver_options,
        click.option(
            "--restarts",
            type=click.IntRange(min=1),
            default=100,
            show_default=True,
            help="k-means restarts.",
        ),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option(
            "--workers", type=click.IntRange(min=1), default=1, show_default=True
        ),
        click.option("-o", "--out", default="-", help="Report file, '-' for stdout."),
        click.option(
            "--format",
            "fmt",
            type=click.Choice(["json", "text", "csv"]),
            default="json",
            show_default=True,
        ),
        click.option(
            "--include-timing", is_flag=True, help="Add the runtime to JSON reports."
        ),
    ]

    for option in reversed(options):
        f = option(f)

    return f


def _build_config(
    params: t.Dict[str, t.Any],
    lambdas: t.Tuple[float, ...],
    shapes: t.Optional[t.Tuple[float, ...]],
) -> ExperimentConfig:
    affinity: AffinityParams = params["affinity"]

    if params["self_loops"]:
        affinity = AffinityParams(
            affinity.method, affinity.neighbor_index, affinity.sigma, True
        )

    return ExperimentConfig(
        k=params["clusters"],
        method=Method(params["method"]),
        data_path=params["data"],
        builtin=params["builtin"],
        label_column=params["label_column"],
        subsample=params["subsample"] or None,
        subsample_seed=params["subsample_seed"],
        affinity=affinity,
        lambdas=lambdas,
        shapes=shapes,
        rho_floor=params["rho_floor"],
        solver=solver_config_from(params),
        restarts=params["restarts"],
        seed=params["seed"],
        warm_start=params["warm_start"],
    )


def _shape_grid(params: t.Dict[str, t.Any]) -> t.Optional[t.Tuple[float, ...]]:
    method = Method(params["method"])

    if method is Method.SSC_MCP:
        return params["beta"]

    if method is Method.SSC_SCAD:
        return params["scad_a"]

    return None


def _write(report: t.Any, params: t.Dict[str, t.Any]) -> None:
    with click.open_file(params["out"], "w", atomic=True) as f:
        emit_report(report, params["fmt"], f, params["include_timing"])


@click.group()
@click.option(
    "-v", "--verbose", count=True, help="Log INFO, or DEBUG when given twice."
)
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    help="A key = value file providing option defaults.",
)
@click.version_option(__version__, prog_name="vsmooth")
@click.pass_context
def main(ctx: click.Context, verbose: int, config: t.Optional[str]) -> None:
    """Variable smoothing for nonsmooth problems on the Grassmannian,
    with sparse spectral clustering experiments.
    """
    logging.basicConfig(
        level=_LOG_LEVELS[min(verbose, len(_LOG_LEVELS) - 1)],
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if config is not None:
        values = read_config_file(config)
        # toy problems take only the solver settings
        ctx.default_map = {
            "solve": {k: v for k, v in values.items() if k in SOLVER_PARAMS},
            "ssc": values,
            "grid": values,
        }


@main.command()
@click.argument("problem", type=click.Choice(BUILTIN_PROBLEMS))
@click.option("--lambda", "lam", type=float, default=0.1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@solver_options
@click.option(
    "--envelope-start",
    type=click.IntRange(min=1),
    default=5,
    show_default=True,
    help="First iteration of the convergence envelope check.",
)
@click.option("--trace-out", help="Write the solver trace as CSV.")
def solve(**params: t.Any) -> None:
    """Minimize a built-in toy problem and summarize the run."""
    problem, y1 = builtin_problem(params["problem"], params["lam"], params["seed"])
    cfg = solver_config_from(params)
    trace = solver_.run(problem, y1, cfg)
    summary = trace.summary()

    for name, value in summary.items():
        text = f"{value:.6g}" if isinstance(value, float) else str(value)
        click.echo(f"{name}: {text}")

    try:
        check = solver_.rate_envelope_check(trace, cfg, params["envelope_start"])
    except TraceTooShortError as e:
        click.echo(_("envelope check skipped: {message}").format(message=e.message))
    else:
        mark = click.style("holds", fg="green") if check.holds else click.style(
            "violated", fg="red"
        )
        click.echo(f"envelope eta={check.eta:.6g} {mark}")

    if params["trace_out"]:
        with click.open_file(params["trace_out"], "w", atomic=True) as f:
            trace.to_csv(f)


@main.command()
@experiment_options
@click.option("--trace-out", help="Also write the solver trace as CSV.")
def ssc(**params: t.Any) -> None:
    """Cluster one dataset with one hyperparameter setting."""
    method = Method(params["method"])

    if method is not Method.SC and params["lam"] is None:
        raise click.UsageError(_("--lambda is required for the SSC methods."))

    lambdas = params["lam"] or (0.0,)
    cfg = _build_config(params, lambdas, _shape_grid(params))
    dataset = cfg.load_dataset()
    report = run_method(cfg, dataset, workers=params["workers"])
    _write(report, params)

    if params["trace_out"]:
        if report.trace is None:
            raise click.UsageError(_("The sc method runs no solver."))

        with click.open_file(params["trace_out"], "w", atomic=True) as f:
            report.trace.to_csv(f)


@main.command()
@experiment_options
@click.option("--table-out", help="Write the per point table as CSV.")
def grid(**params: t.Any) -> None:
    """Search the hyperparameter grid and report the best point.

    Grids default to 10^-i for i = 0..6, the SCAD shape to 3.7.
    """
    method = Method(params["method"])
    lambdas = params["lam"] or DEFAULT_GRID
    shapes = _shape_grid(params)

    if shapes is None and method is Method.SSC_MCP:
        shapes = DEFAULT_GRID
    elif shapes is None and method is Method.SSC_SCAD:
        shapes = (SCAD_DEFAULT_A,)

    cfg = _build_config(params, lambdas, shapes)
    dataset = cfg.load_dataset()
    points = cfg.grid_points()

    with click.progressbar(
        length=len(points), label=_("grid"), file=click.get_text_stream("stderr")
    ) as bar:

        def advance(row: GridRow) -> None:
            bar.update(1)

        result = grid_search(cfg, dataset, params["workers"], advance)

    failed = sum(not row.ok for row in result.rows)

    if failed:
        click.echo(
            _("{failed} of {total} grid points failed").format(
                failed=failed, total=len(result.rows)
            ),
            err=True,
        )

    best = result.best
    click.echo(
        _("best {hyperparameters}: NMI {nmi:.3f}, ARI {ari:.3f}").format(
            hyperparameters=best.hyperparameters, nmi=best.nmi_mean, ari=best.ari_mean
        ),
        err=True,
    )
    _write(best, params)

    if params["table_out"]:
        with click.open_file(params["table_out"], "w", atomic=True) as f:
            result.to_csv(f)


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--draws",
    type=click.IntRange(min=1),
    default=100,
    show_default=True,
    help="Random samples per check.",
)
@click.pass_context
def check(ctx: click.Context, seed: int, draws: int) -> None:
    """Compare prox, gradients and the parametrization against
    numerical oracles.
    """
    results = run_checks(seed, draws)
    width = max(len(r.name) for r in results)

    for r in results:
        mark = click.style("PASS", fg="green") if r.passed else click.style(
            "FAIL", fg="red", bold=True
        )
        click.echo(f"{mark}  {r.name:<{width}}  {r.worst:.2e} <= {r.tolerance:.0e}")

    if not all(r.passed for r in results):
        ctx.exit(1)


@main.command()
@click.argument("reports", nargs=-1, type=click.File("r"))
@click.option(
    "--published", is_flag=True, help="Add the published scores as reference rows."
)
def table(reports: t.Tuple[t.TextIO, ...], published: bool) -> None:
    """Merge JSON reports into one method x dataset score table."""
    entries = [report_entry(load_report(f)) for f in reports]

    if published:
        datasets = {e.dataset for e in entries} or None
        entries.extend(published_entries(datasets))

    if not entries:
        raise click.UsageError(_("Give at least one report or --published."))

    formatter = TableFormatter()
    formatter.write_scores(entries)
    click.echo(formatter.getvalue(), nl=False)
