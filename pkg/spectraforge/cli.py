"""
Command-line interface for spectraforge.

Every subcommand writes one report ``{"manifest": ..., "result": ...}`` to
standard output (or ``--out``); diagnostics go to standard error. Exit codes:
0 on success, 1 on usage, input or I/O errors, 2 on domain errors such as an
infeasible point or a matrix that is not PSD.
"""

import json
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click
import numpy as np
from pydantic import ValidationError as PydanticValidationError
from rich.console import Console
from rich.table import Table

from spectraforge import __version__
from spectraforge.applications.lowrank import SolverOptions, max_lambda1_lowrank
from spectraforge.applications.pca_cover import (
    IntervalCover,
    moments_from_covariance,
    pca_cover_constraints,
    rank_bound_summary,
)
from spectraforge.applications.quantum import min_entropy_rank2
from spectraforge.analysis.oracle import run_oracle_comparison
from spectraforge.config import settings
from spectraforge.constants import (
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_USAGE,
    FIELDS,
    REPORT_FORMATS,
    STUDY_PCA_COVER,
    STUDY_QUANTUM_MOMENTS,
)
from spectraforge.core.elliptope import (
    elliptope_extreme_test,
    hadamard_inequality_check,
    random_correlation,
)
from spectraforge.core.extremality import (
    bp_rank_bound,
    douglas_factor,
    extremality_rank_test,
    find_even_perturbation,
)
from spectraforge.core.linalg import numerical_rank, operator_norm
from spectraforge.core.models import RunManifest
from spectraforge.exceptions import DomainError, ShapeError, SpectraForgeError, ValidationError
from spectraforge.formatters import get_formatter
from spectraforge.logger import get_logger, setup_logger
from spectraforge.parser import (
    decode_matrix,
    decode_spectrahedron,
    encode_matrix,
    load_document,
    load_matrix,
    load_spectrahedron,
    validate_problem,
)

# Diagnostics only; standard output carries reports
err_console = Console(stderr=True)
logger = get_logger(__name__)

_FIELD_CHOICE = click.Choice(FIELDS)
_PATH = click.Path(dir_okay=False, path_type=Path)


def setup_cli_logging(verbose: bool = False) -> None:
    """Setup logging for CLI usage."""
    if verbose:
        setup_logger(level="DEBUG", log_format="simple", force=True)


class SpectraForgeGroup(click.Group):
    """Click group that maps package exceptions onto the exit-code contract."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else EXIT_OK
        except click.UsageError as e:
            e.show()
            code = EXIT_USAGE
        except click.ClickException as e:
            e.show()
            code = EXIT_USAGE
        except click.Abort:
            err_console.print("Aborted!")
            code = EXIT_USAGE
        except (DomainError, ShapeError) as e:
            err_console.print(f"[red]Domain error:[/red] {e}")
            code = EXIT_DOMAIN
        except SpectraForgeError as e:
            err_console.print(f"[red]Error:[/red] {e}")
            code = EXIT_USAGE
        except OSError as e:
            err_console.print(f"[red]I/O error:[/red] {e}")
            code = EXIT_USAGE
        if standalone_mode:
            sys.exit(code)
        return code


def _print_version(ctx: click.Context, _param: click.Parameter, value: bool) -> None:
    if not value or ctx.resilient_parsing:
        return
    click.echo(json.dumps(
        {"version": __version__, "tolerances": settings.tolerance_table()},
        indent=settings.output_indent or None,
        sort_keys=True
    ))
    ctx.exit(EXIT_OK)


def tolerance_options(f: Callable) -> Callable:
    f = click.option("--gram-tol", type=float, default=None,
                     help="Rank threshold for the Gram matrix (default: n * eps * sigma_max)")(f)
    f = click.option("--rank-tol", type=float, default=None,
                     help="Rank threshold for the point (default: n * eps * sigma_max)")(f)
    f = click.option("--tol", type=float, default=None,
                     help=f"Feasibility tolerance (default: {settings.feasibility_tol})")(f)
    return f


def output_options(f: Callable) -> Callable:
    f = click.option("--out", type=_PATH, default=None, help="Write the report to a file")(f)
    f = click.option("--format", "report_format", type=click.Choice(REPORT_FORMATS), default="json",
                     show_default=True, help="Report format; CSV is a lossy projection")(f)
    return f


def solver_options(f: Callable) -> Callable:
    f = click.option("--workers", type=click.IntRange(min=1), default=None, help="Thread pool size for restarts")(f)
    f = click.option("--max-iters", type=click.IntRange(min=1), default=None, help="Iterations per restart")(f)
    f = click.option("--restarts", type=click.IntRange(min=1), default=None, help="Number of restarts")(f)
    f = click.option("--seed", type=click.IntRange(min=0), default=None,
                     help=f"Base seed; restart i uses seed + i (default: {settings.default_seed})")(f)
    return f


def _tolerances(tol: Optional[float], **others: Optional[float]) -> Dict[str, Any]:
    table = {"tol": settings.feasibility_tol if tol is None else tol}
    table.update(others)
    return table


def emit(
    command: str,
    result: Any,
    started: float,
    report_format: str,
    out: Optional[Path],
    inputs: Optional[Dict[str, Optional[Path]]] = None,
    tolerances: Optional[Dict[str, Any]] = None,
    seeds: Optional[Dict[str, Optional[int]]] = None
) -> None:
    """Wrap a result in its manifest and write it out."""
    manifest = RunManifest(
        command=command,
        inputs={k: str(v) if v is not None else None for k, v in (inputs or {}).items()},
        tolerances=tolerances or {},
        seeds=seeds or {},
        version=__version__,
        duration_seconds=round(time.perf_counter() - started, 6)
    )
    report = {"manifest": manifest.model_dump(mode="json"), "result": result}
    formatter = get_formatter(report_format, output_path=out)
    if out is not None:
        formatter.write(report)
        err_console.print(f"[green]Report written to {out}[/green]")
    else:
        click.echo(formatter.format(report), nl=False)


def _solver_overrides(document: Dict[str, Any], **flags: Any) -> SolverOptions:
    values = dict(document.get("solver", {}))
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return SolverOptions(**values)
    except PydanticValidationError as e:
        raise ValidationError(f"Invalid solver options: {e}") from e


@click.group(cls=SpectraForgeGroup)
@click.option("--version", is_flag=True, expose_value=False, is_eager=True, callback=_print_version,
              help="Show the version and the default tolerance table")
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging on standard error")
def cli(verbose: bool) -> None:
    """spectraforge - extreme points of spectrahedra."""
    setup_cli_logging(verbose)


@cli.command("check-extreme")
@click.option("--spectrahedron", "spectrahedron_path", type=_PATH, required=True, help="Spectrahedron document")
@click.option("--point", "point_path", type=_PATH, required=True, help="Matrix document of the point")
@click.option("--field", type=_FIELD_CHOICE, default=None, help="Override the spectrahedron's field")
@tolerance_options
@output_options
def check_extreme(spectrahedron_path, point_path, field, tol, rank_tol, gram_tol, report_format, out) -> None:
    """Rank test for extremality of a feasible point."""
    started = time.perf_counter()
    spectrahedron = load_spectrahedron(spectrahedron_path)
    if field:
        spectrahedron = spectrahedron.with_field(field)
    report = extremality_rank_test(load_matrix(point_path), spectrahedron, tol, rank_tol, gram_tol)
    emit("check-extreme", report.model_dump(mode="json"), started, report_format, out,
         inputs={"spectrahedron": spectrahedron_path, "point": point_path},
         tolerances=_tolerances(tol, rank_tol=rank_tol, gram_tol=gram_tol))


@cli.command("facial-dim")
@click.option("--spectrahedron", "spectrahedron_path", type=_PATH, required=True, help="Spectrahedron document")
@click.option("--point", "point_path", type=_PATH, required=True, help="Matrix document of the point")
@click.option("--field", type=_FIELD_CHOICE, default=None, help="Override the spectrahedron's field")
@tolerance_options
@output_options
def facial_dim(spectrahedron_path, point_path, field, tol, rank_tol, gram_tol, report_format, out) -> None:
    """Dimension of the face of the spectrahedron containing the point in its relative interior."""
    started = time.perf_counter()
    spectrahedron = load_spectrahedron(spectrahedron_path)
    if field:
        spectrahedron = spectrahedron.with_field(field)
    report = extremality_rank_test(load_matrix(point_path), spectrahedron, tol, rank_tol, gram_tol)
    result = {
        "facial_dimension": report.facial_dimension,
        "dim_X": report.dim_X,
        "gram_rank": report.gram_rank,
        "rank_P": report.rank_P,
    }
    emit("facial-dim", result, started, report_format, out,
         inputs={"spectrahedron": spectrahedron_path, "point": point_path},
         tolerances=_tolerances(tol, rank_tol=rank_tol, gram_tol=gram_tol))


@cli.command("perturb")
@click.option("--spectrahedron", "spectrahedron_path", type=_PATH, required=True, help="Spectrahedron document")
@click.option("--point", "point_path", type=_PATH, required=True, help="Matrix document of the point")
@click.option("--field", type=_FIELD_CHOICE, default=None, help="Override the spectrahedron's field")
@tolerance_options
@output_options
def perturb(spectrahedron_path, point_path, field, tol, rank_tol, gram_tol, report_format, out) -> None:
    """Construct an even perturbation witnessing non-extremality."""
    started = time.perf_counter()
    spectrahedron = load_spectrahedron(spectrahedron_path)
    if field:
        spectrahedron = spectrahedron.with_field(field)
    witness = find_even_perturbation(load_matrix(point_path), spectrahedron, tol, rank_tol, gram_tol)
    result = {
        "is_extreme": witness is None,
        "witness": witness.to_dict() if witness is not None else None,
    }
    emit("perturb", result, started, report_format, out,
         inputs={"spectrahedron": spectrahedron_path, "point": point_path},
         tolerances=_tolerances(tol, rank_tol=rank_tol, gram_tol=gram_tol))


@cli.command("douglas-factor")
@click.option("--point", "point_path", type=_PATH, required=True, help="Matrix document of P")
@click.option("--perturbation", "perturbation_path", type=_PATH, required=True, help="Matrix document of H")
@click.option("--tol", type=float, default=None, help="PSD tolerance for P and P +/- H")
@click.option("--rank-tol", type=float, default=None, help="Rank threshold for P")
@output_options
def douglas(point_path, perturbation_path, tol, rank_tol, report_format, out) -> None:
    """Factor H = sqrt(P) X sqrt(P) for an even perturbation H."""
    started = time.perf_counter()
    x = douglas_factor(load_matrix(point_path), load_matrix(perturbation_path), tol, rank_tol)
    result = {"X": encode_matrix(x), "norm_X": operator_norm(x)}
    emit("douglas-factor", result, started, report_format, out,
         inputs={"point": point_path, "perturbation": perturbation_path},
         tolerances=_tolerances(tol, rank_tol=rank_tol))


@cli.command("elliptope-check")
@click.option("--point", "point_path", type=_PATH, required=True, help="Matrix document of the correlation matrix")
@click.option("--field", type=_FIELD_CHOICE, default=None, help="Field of the elliptope (default: the matrix's)")
@tolerance_options
@output_options
def elliptope_check(point_path, field, tol, rank_tol, gram_tol, report_format, out) -> None:
    """Extremality of a correlation matrix from the rank of its Hadamard square."""
    started = time.perf_counter()
    report = elliptope_extreme_test(load_matrix(point_path), field, tol, rank_tol, gram_tol)
    emit("elliptope-check", report.model_dump(mode="json"), started, report_format, out,
         inputs={"point": point_path},
         tolerances=_tolerances(tol, rank_tol=rank_tol, gram_tol=gram_tol))


@cli.command("hadamard-check")
@click.option("--matrix", "matrix_path", type=_PATH, required=True, help="Matrix document of a PSD matrix")
@click.option("--field", type=_FIELD_CHOICE, default=None, help="Read the matrix over this field")
@tolerance_options
@output_options
def hadamard_check(matrix_path, field, tol, rank_tol, gram_tol, report_format, out) -> None:
    """Hadamard rank inequality and its equality case."""
    started = time.perf_counter()
    report = hadamard_inequality_check(load_matrix(matrix_path), field, tol, rank_tol, gram_tol)
    emit("hadamard-check", report.model_dump(mode="json"), started, report_format, out,
         inputs={"matrix": matrix_path},
         tolerances=_tolerances(tol, rank_tol=rank_tol, gram_tol=gram_tol))


@cli.command("random-correlation")
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Dimension")
@click.option("--rank", type=click.IntRange(min=1), required=True, help="Target rank")
@click.option("--field", type=_FIELD_CHOICE, default="real", show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Generator seed")
@output_options
def random_correlation_command(n, rank, field, seed, report_format, out) -> None:
    """Sample a random correlation matrix of rank at most --rank."""
    started = time.perf_counter()
    seed = settings.default_seed if seed is None else seed
    correlation = random_correlation(n, rank, field, seed)
    result = {"matrix": encode_matrix(correlation.matrix), "rank": numerical_rank(correlation.matrix).rank}
    emit("random-correlation", result, started, report_format, out, seeds={"seed": seed})


@cli.command("bp-bound")
@click.option("--constraints", "n_constraints", type=click.IntRange(min=0), required=True,
              help="Number of constraints")
@click.option("--field", type=_FIELD_CHOICE, default="real", show_default=True)
@output_options
def bp_bound(n_constraints, field, report_format, out) -> None:
    """Largest rank an extreme point can have with the given number of constraints."""
    started = time.perf_counter()
    result = {"max_rank": bp_rank_bound(n_constraints, field), "n_constraints": n_constraints, "field": field}
    emit("bp-bound", result, started, report_format, out)


def _pca_problem(document: Dict[str, Any], rank_bound: Optional[int]):
    cover = IntervalCover.from_intervals(document["intervals"])
    p = document["p"]
    planted = decode_matrix(document["planted"]) if "planted" in document else None
    if planted is not None:
        trace_target, moments = moments_from_covariance(cover, p, planted)
    else:
        trace_target, moments = document["trace_target"], document["moments"]
    spectrahedron = pca_cover_constraints(cover, p, trace_target, moments)
    summary = rank_bound_summary(cover, p)
    bound = rank_bound or document.get("rank_bound") or summary.closed_form_rank
    return spectrahedron, min(bound, spectrahedron.n), summary, planted


@cli.command("solve-lambda1")
@click.option("--problem", "problem_path", type=_PATH, required=True,
              help="PCA cover problem document or spectrahedron document")
@click.option("--rank-bound", type=click.IntRange(min=1), default=None, help="Rank bound for the factor")
@click.option("--top-q", type=click.IntRange(min=1), default=None, help="Sum of the q largest eigenvalues")
@click.option("--tol", type=float, default=None, help="Feasibility tolerance")
@solver_options
@output_options
def solve_lambda1(problem_path, rank_bound, top_q, tol, seed, restarts, max_iters, workers,
                  report_format, out) -> None:
    """Rank-bounded maximization of the largest eigenvalue(s)."""
    started = time.perf_counter()
    document = load_document(problem_path)
    summary = None
    planted = None
    if "study" in document:
        validate_problem(document)
        if document["study"] != STUDY_PCA_COVER:
            raise ValidationError(f"solve-lambda1 expects a '{STUDY_PCA_COVER}' problem")
        spectrahedron, bound, summary, planted = _pca_problem(document, rank_bound)
    else:
        spectrahedron = decode_spectrahedron(document)
        bound = rank_bound or spectrahedron.n

    q = top_q or document.get("top_q", 1)
    options = _solver_overrides(document, seed=seed, restarts=restarts, max_iters=max_iters, tol=tol,
                                workers=workers)
    start = planted if planted is not None and numerical_rank(planted).rank <= bound else None
    solution = max_lambda1_lowrank(spectrahedron, bound, options, top_q=q, start=start)

    result = solution.to_dict()
    result["top_q"] = q
    if summary is not None:
        result["rank_bounds"] = summary.model_dump(mode="json")
    if planted is not None:
        eigenvalues = np.sort(np.linalg.eigvalsh(planted.data))[::-1]
        result["planted_objective"] = float(np.sum(eigenvalues[:q]))
    emit("solve-lambda1", result, started, report_format, out,
         inputs={"problem": problem_path},
         tolerances=_tolerances(options.tol),
         seeds={"base_seed": options.base_seed})


def _parse_moments(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise click.BadParameter(f"moments must be comma-separated numbers: {e}") from e


@cli.command("solve-entropy")
@click.option("--problem", "problem_path", type=_PATH, default=None, help="Quantum moment problem document")
@click.option("--moments", type=str, default=None, help="Comma-separated m_1,..,m_J")
@click.option("--basis-size", type=click.IntRange(min=2), default=None, help="Number of Legendre functions")
@click.option("--field", type=_FIELD_CHOICE, default=None, help="Real or complex wave functions")
@click.option("--rank-one", is_flag=True, default=False, help="Restrict to pure states")
@click.option("--tol", type=float, default=None, help="Constraint tolerance")
@solver_options
@output_options
def solve_entropy(problem_path, moments, basis_size, field, rank_one, tol, seed, restarts, max_iters, workers,
                  report_format, out) -> None:
    """Minimum-entropy rank-2 state with prescribed position moments."""
    started = time.perf_counter()
    document: Dict[str, Any] = {}
    if problem_path is not None:
        document = validate_problem(load_document(problem_path))
        if document["study"] != STUDY_QUANTUM_MOMENTS:
            raise ValidationError(f"solve-entropy expects a '{STUDY_QUANTUM_MOMENTS}' problem")

    targets = _parse_moments(moments) if moments else document.get("moments")
    size = basis_size or document.get("basis_size")
    if not targets or size is None:
        raise click.UsageError("Give --problem, or both --moments and --basis-size")

    options = _solver_overrides(document, seed=seed, restarts=restarts, max_iters=max_iters, tol=tol,
                                workers=workers)
    result = min_entropy_rank2(
        targets, size, options,
        field=field or document.get("field", "real"),
        rank_one=rank_one or bool(document.get("rank_one", False))
    )
    emit("solve-entropy", result.to_dict(), started, report_format, out,
         inputs={"problem": problem_path},
         tolerances=_tolerances(options.tol),
         seeds={"base_seed": options.base_seed})


@cli.command("oracle-compare")
@click.option("--instances", type=click.IntRange(min=1), default=None,
              help=f"Number of random instances (default: {settings.oracle_instances})")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Base seed; instance i uses seed + i")
@click.option("--max-dim", type=click.IntRange(min=2), default=None,
              help=f"Largest ambient dimension (default: {settings.oracle_max_dim})")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Thread pool size")
@click.option("--details", is_flag=True, default=False, help="Include every instance outcome")
@output_options
def oracle_compare(instances, seed, max_dim, workers, details, report_format, out) -> None:
    """Batch comparison of the rank test against the witness search."""
    started = time.perf_counter()
    summary = run_oracle_comparison(instances, seed, max_dim, workers)
    result = summary.model_dump(mode="json", exclude=None if details else {"outcomes"})
    result["agreement_rate"] = summary.agreement_rate
    result["passed"] = summary.passed
    if not summary.passed:
        err_console.print(
            f"[yellow]{len(summary.disagreements)} disagreements, "
            f"{len(summary.witness_failures)} witness failures, "
            f"{len(summary.bp_violations)} rank-bound violations[/yellow]"
        )
    emit("oracle-compare", result, started, report_format, out, seeds={"base_seed": summary.base_seed})


@cli.command()
def info() -> None:
    """Show the effective settings."""
    table = Table(title="spectraforge settings", show_header=True)
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")

    table.add_row("Version", __version__)
    table.add_row("Python", sys.version.split()[0])
    for name, value in settings.model_dump().items():
        table.add_row(name, str(value))

    Console().print(table)


def main() -> None:
    """Main entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
