"""The ``kantian`` command: frontier sweeps, shift plans and equilibrium checks."""

import functools
import logging
from collections import Counter
from collections.abc import Callable
from pathlib import Path
from typing import Annotated, TypeVar

import numpy as np
import typer

from app.core.config import settings
from app.core.exceptions import (
    EmptyAdmissibleSetError,
    GameValidationError,
    InputError,
    KantianError,
    NonInteriorError,
    NotEfficientError,
    VerticalTangentError,
)
from app.core.logging import setup_logging
from app.models import (
    Criterion,
    CriterionKind,
    EquilibriumReport,
    RunConfig,
    SolverConfig,
)
from app.services.export import (
    batch_frame,
    frontier_frame,
    plan_frame,
    report_frame,
    report_summary,
    to_csv_text,
    write_csv,
)
from app.services.games import Game, load_game
from app.services.kantian import compare_nash_mke, solve_nash, verify_mke
from app.services.pareto import sweep_frontier
from app.services.select import resolve_target
from app.services.shift import ShiftedGame, build_shift, shift_frontier, tangent_line_2d
from app.services.validation import validate_game

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_INPUT = 2

# Errors that mean the request itself cannot be honoured
INPUT_ERRORS = (InputError, NotEfficientError, NonInteriorError, EmptyAdmissibleSetError)

cli = typer.Typer(
    name="kantian",
    help="Kantian equilibria and the shifts that realize Pareto-efficient outcomes.",
    no_args_is_help=True,
    add_completion=False,
    pretty_exceptions_enable=False,
)

GameOpt = Annotated[Path, typer.Option("--game", help="Game spec (JSON).")]
OutOpt = Annotated[Path | None, typer.Option("--out", help="CSV output path; stdout when omitted.")]
SeedOpt = Annotated[int | None, typer.Option("--seed", help="Random seed.")]
TolOpt = Annotated[float | None, typer.Option("--tol", help="Relative residual tolerance.")]
ThetaOpt = Annotated[float | None, typer.Option("--theta", help="Fraction of the maximal shift step.")]
AHiOpt = Annotated[float | None, typer.Option("--a-hi", help="Upper end of the scaling interval.")]
PointOpt = Annotated[str | None, typer.Option("--point", help="Profile x1,..,xn.")]
CritOpt = Annotated[
    CriterionKind | None, typer.Option("--criterion", help="Selection criterion.")
]
WeightsOpt = Annotated[str | None, typer.Option("--weights", help="Scalarization weights m1,..,mn.")]
COpt = Annotated[str | None, typer.Option("--c", help="Reference vector c1,..,cn.")]

F = TypeVar("F", bound=Callable[..., None])


def parse_vector(text: str, n: int, name: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise InputError(f"--{name} expects comma-separated numbers, got '{text}'")
    if len(values) != n:
        raise InputError(f"--{name} needs {n} components, got {len(values)}")
    return values


def solver_config(seed: int | None, tol: float | None) -> SolverConfig:
    overrides: dict[str, float | int] = {}
    if seed is not None:
        overrides["seed"] = seed
    if tol is not None:
        overrides["residual_tol"] = tol
    return SolverConfig(**overrides)


def load_checked_game(path: Path, seed: int) -> Game:
    """Load a spec and refuse games outside the supported class."""
    game = load_game(path)
    report = validate_game(game, settings.VALIDATION_SAMPLES, seed)
    if not report.passed:
        kinds = Counter(v.kind.value for v in report.violations)
        summary = ", ".join(f"{kind} ({count})" for kind, count in sorted(kinds.items()))
        raise GameValidationError(f"Game '{path}' failed validation: {summary}", report)
    return game


def emit(text: str, out: Path | None) -> None:
    if out is None:
        typer.echo(text, nl=False)
    else:
        write_csv(text, out)


def exit_codes(command: F) -> F:
    """Translate toolkit errors into the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args: object, **kwargs: object) -> None:
        try:
            command(*args, **kwargs)
        except INPUT_ERRORS as exc:
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(EXIT_INPUT)
        except KantianError as exc:
            logger.exception("Run failed")
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(EXIT_FAILED)

    return wrapper  # type: ignore[return-value]


def _fmt(values: list[float]) -> str:
    return "(" + ", ".join(f"{v:.12g}" for v in values) + ")"


def _echo_report(report: EquilibriumReport) -> None:
    typer.echo(f"{report.kind.value} profile: {_fmt(report.x)}")
    typer.echo(f"payoffs: {_fmt(report.payoffs)}")
    typer.echo(f"residuals: {_fmt(report.residuals)}")
    typer.echo(f"oracle argmax: {_fmt(report.oracle_argmax)}")
    typer.echo(f"verdict: {report.verdict.value}")


@cli.command()
@exit_codes
def validate(game: GameOpt, seed: SeedOpt = None) -> None:
    """Check a game spec against the structural assumptions."""
    seed = settings.SEED if seed is None else seed
    report = validate_game(load_game(game), settings.VALIDATION_SAMPLES, seed)
    typer.echo(report.model_dump_json(indent=2))
    if not report.passed:
        raise typer.Exit(EXIT_INPUT)


@cli.command()
@exit_codes
def frontier(
    game: GameOpt,
    points: Annotated[int, typer.Option("--points", help="Number of weight vectors.")] = 11,
    out: OutOpt = None,
    seed: SeedOpt = None,
    tol: TolOpt = None,
) -> None:
    """Sweep the interior Pareto frontier by weighted-sum scalarization."""
    cfg = solver_config(seed, tol)
    model = load_checked_game(game, cfg.seed)
    run = RunConfig(
        command="frontier", game_path=str(game), out=_str(out), seed=cfg.seed, tol=tol, points=points
    )
    sweep = sweep_frontier(model, points, cfg)
    emit(to_csv_text(frontier_frame(sweep), run), out)
    typer.echo(
        f"{len(sweep.points)} interior points, {sweep.boundary_rejections} boundary rejections, "
        f"{sweep.duplicates} duplicates (spread {sweep.spread:.6g})",
        err=out is None,
    )


@cli.command()
@exit_codes
def realize(
    game: GameOpt,
    criterion: CritOpt = None,
    weights: WeightsOpt = None,
    point: PointOpt = None,
    theta: ThetaOpt = None,
    points: Annotated[int, typer.Option("--points", help="Frontier samples for selection.")] = 25,
    a_hi: AHiOpt = None,
    out: OutOpt = None,
    seed: SeedOpt = None,
    tol: TolOpt = None,
) -> None:
    """Select a Pareto point and build the reference vector that makes it an MKE."""
    cfg = solver_config(seed, tol)
    model = load_checked_game(game, cfg.seed)
    theta = settings.THETA if theta is None else theta
    a_hi = settings.A_HI if a_hi is None else a_hi

    target = resolve_target(
        model,
        criterion=None if criterion is None else Criterion(kind=criterion),
        weights=None if weights is None else parse_vector(weights, model.n, "weights"),
        point=None if point is None else parse_vector(point, model.n, "point"),
        k=points,
        cfg=cfg,
    )

    run = RunConfig(
        command="realize",
        game_path=str(game),
        out=_str(out),
        seed=cfg.seed,
        tol=tol,
        points=points if criterion is not None else None,
        theta=theta,
        a_hi=a_hi,
        criterion=criterion,
        weights=target.m if weights is not None else None,
        point=target.x if point is not None else None,
    )
    plan = build_shift(model, target, theta, cfg, a_hi)
    emit(to_csv_text(plan_frame([plan]), run), out)

    typer.echo(f"x_p: {_fmt(plan.x_p)}", err=out is None)
    typer.echo(f"c: {_fmt(plan.c)}", err=out is None)
    typer.echo(f"eps: {plan.eps:.12g} (theta {plan.theta:.6g} of {plan.eps_max:.12g})", err=out is None)
    if model.n == 2:
        try:
            slope, intercept = tangent_line_2d(model, target)
            typer.echo(f"tangent: x_1 = {slope:.12g} * x_2 + {intercept:.12g}", err=out is None)
        except VerticalTangentError:
            typer.echo("tangent: vertical in these coordinates", err=out is None)
    typer.echo(f"oracle argmax: {_fmt(plan.verification.oracle_argmax)}", err=out is None)
    typer.echo(f"verdict: {plan.verification.verdict.value}", err=out is None)


@cli.command()
@exit_codes
def verify(
    game: GameOpt,
    profile: Annotated[
        str | None, typer.Option("--profile", "--point", help="Profile x1,..,xn.")
    ] = None,
    c: COpt = None,
    a_hi: AHiOpt = None,
    out: OutOpt = None,
    seed: SeedOpt = None,
    tol: TolOpt = None,
) -> None:
    """Check the MKE definition at a profile, optionally in coordinates z = x - c."""
    if profile is None:
        raise InputError("verify needs --profile")
    cfg = solver_config(seed, tol)
    model = load_checked_game(game, cfg.seed)
    x = np.asarray(parse_vector(profile, model.n, "profile"))
    c_vec = np.zeros(model.n) if c is None else np.asarray(parse_vector(c, model.n, "c"))
    if np.any(x < c_vec):
        raise InputError("Profile must not fall below the reference vector c")
    a_hi = settings.A_HI if a_hi is None else a_hi
    run = RunConfig(
        command="verify",
        game_path=str(game),
        out=_str(out),
        seed=cfg.seed,
        tol=tol,
        a_hi=a_hi,
        point=x.tolist(),
        c=c_vec.tolist() if c is not None else None,
    )
    report = verify_mke(ShiftedGame.of(model, c_vec), x - c_vec, a_hi, cfg)
    _finish_report(report, run, out)


@cli.command()
@exit_codes
def nash(
    game: GameOpt,
    point: PointOpt = None,
    out: OutOpt = None,
    seed: SeedOpt = None,
    tol: TolOpt = None,
) -> None:
    """Nash equilibrium by iterated best response."""
    cfg = solver_config(seed, tol)
    model = load_checked_game(game, cfg.seed)
    start = None if point is None else parse_vector(point, model.n, "point")
    run = RunConfig(
        command="nash", game_path=str(game), out=_str(out), seed=cfg.seed, tol=tol, point=start
    )
    _finish_report(solve_nash(model, start, cfg), run, out)


@cli.command()
@exit_codes
def mke(
    game: GameOpt,
    point: PointOpt = None,
    a_hi: AHiOpt = None,
    out: OutOpt = None,
    seed: SeedOpt = None,
    tol: TolOpt = None,
) -> None:
    """Strictly positive MKE by damped Newton, compared with the Nash baseline."""
    cfg = solver_config(seed, tol)
    model = load_checked_game(game, cfg.seed)
    start = np.ones(model.n) if point is None else parse_vector(point, model.n, "point")
    run = RunConfig(
        command="mke",
        game_path=str(game),
        out=_str(out),
        seed=cfg.seed,
        tol=tol,
        a_hi=settings.A_HI if a_hi is None else a_hi,
        point=list(np.asarray(start, dtype=float).tolist()),
    )
    comparison = compare_nash_mke(model, start, cfg, run.a_hi)
    typer.echo(f"Nash payoffs: {_fmt(comparison.nash.payoffs)}", err=out is None)
    typer.echo(f"MKE strictly dominates Nash: {'yes' if comparison.mke_dominates else 'no'}", err=out is None)
    _finish_report(comparison.mke, run, out)


@cli.command("sweep-realize")
@exit_codes
def sweep_realize(
    game: GameOpt,
    points: Annotated[int, typer.Option("--points", help="Number of frontier points.")] = 25,
    theta: ThetaOpt = None,
    out: OutOpt = None,
    seed: SeedOpt = None,
    tol: TolOpt = None,
) -> None:
    """Build and verify a shift plan for every swept frontier point."""
    cfg = solver_config(seed, tol)
    model = load_checked_game(game, cfg.seed)
    theta = settings.THETA if theta is None else theta
    run = RunConfig(
        command="sweep-realize",
        game_path=str(game),
        out=_str(out),
        seed=cfg.seed,
        tol=tol,
        points=points,
        theta=theta,
    )
    sweep = sweep_frontier(model, points, cfg)
    batch = shift_frontier(model, sweep.points, theta, cfg)
    emit(to_csv_text(batch_frame(batch, model.n), run), out)
    typer.echo(
        f"{batch.verified_count}/{batch.total} verified ({100.0 * batch.pass_rate:.1f}%), "
        f"{sweep.boundary_rejections} boundary rejections",
        err=out is None,
    )
    if batch.total == 0 or batch.verified_count != batch.total:
        raise typer.Exit(EXIT_FAILED)


def _finish_report(report: EquilibriumReport, run: RunConfig, out: Path | None) -> None:
    emit(to_csv_text(report_frame(report), run, [report_summary(report)]), out)
    if out is not None:
        _echo_report(report)
    if not report.verified:
        raise typer.Exit(EXIT_FAILED)


def _str(path: Path | None) -> str | None:
    return None if path is None else str(path)


def main() -> None:
    setup_logging()
    cli()


if __name__ == "__main__":
    main()
