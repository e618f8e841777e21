import math
import sys
from contextlib import contextmanager
from typing import List, Optional

import numpy as np
import typer

try:  # typer >= 0.2x bundles its own click; catch the exceptions it raises
    from typer import _click as click
except ImportError:
    import click
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

import ncphase
from ncphase import dynamics, oracles, qinfo, thermo, wigner
from ncphase.errors import NumericalError, ValidationError
from ncphase.nc_core import NCParams, derive_sw_params, nc_coefficients
from ncphase.numerics import QuadratureSpec, SeriesControl
from ncphase.cli import config
from ncphase.cli.table import parse_grid, parse_vector, write_table

app = typer.Typer(pretty_exceptions_show_locals=False)
app.add_typer(config.app, name="config")

stderr = Console(stderr=True)

OUTPUT_HELP = "Output file (default standard output)"
FORMAT_HELP = "Output format, csv or json"


@contextmanager
def handle_errors():
    '''Maps validation errors to exit code 2 and numerical failures to exit code 3'''
    try:
        yield
    except ValidationError as err:
        typer.echo(f"Error: {err}", err=True)
        raise typer.Exit(code=2)
    except NumericalError as err:
        typer.echo(f"Error: {err}", err=True)
        raise typer.Exit(code=3)


@contextmanager
def spinner(description: str):
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=stderr,
        transient = True,
    ) as progress:
        progress.add_task(description=description, total=None)
        yield


def _free_particle(gamma: Optional[float], mass: Optional[float]):
    '''Returns gamma, mass and hbar; gamma defaults to eta / (2 m hbar) of the configuration'''
    nc_config = config.settings("nc")
    hbar = float(nc_config.get("hbar", 1.0))
    mass = float(nc_config.get("mass", 1.0)) if mass is None else mass
    if gamma is None:
        nc = NCParams(
            theta=float(nc_config.get("theta", 0.0)),
            eta=float(nc_config.get("eta", 0.0)),
            hbar=hbar,
            mass=mass,
        )
        sw = derive_sw_params(nc, float(nc_config.get("mu", 1.0)))
        gamma = nc_coefficients(nc, sw).gamma
    return gamma, mass, hbar


def _box(a: Optional[float]) -> float:
    return float(config.settings("wigner").get("a", wigner.DEFAULT_BOX)) if a is None else a


def _quad(abs_tol: Optional[float], rel_tol: Optional[float]) -> QuadratureSpec:
    return QuadratureSpec.from_config(config.settings("quadrature"), abs_tol=abs_tol, rel_tol=rel_tol)


def _series(rel_tol: Optional[float], max_terms: Optional[int]) -> SeriesControl:
    return SeriesControl.from_config(config.settings("series"), rel_tol=rel_tol, max_terms=max_terms)


def _time_grid(t_max: float, steps: int) -> np.ndarray:
    if steps < 1 or not t_max > 0:
        raise ValidationError("Invalid time grid, t-max and steps must be positive")
    return np.linspace(0.0, t_max, steps + 1)


@app.callback()
def main_options(
    config_file: str = typer.Option(None, "--config", help="Run configuration file (key=value or YAML)"),
    verbose: bool = typer.Option(False, "--verbose", help="Enable debug messages"),
    jobs: int = typer.Option(None, "--jobs", help="Maximum number of workers (default NCPHASE_JOBS)"),
) -> None:
    '''Phase-space noncommutative quantum mechanics'''
    with handle_errors():
        if verbose:
            ncphase.debug()
        if jobs is not None:
            ncphase.set_max_workers(jobs)
        config.load(config_file)


@app.command()
def trajectory(
    gamma: float = typer.Option(None, help="Characteristic frequency (default eta / 2 m hbar)"),
    ic: str = typer.Option("0.5,0.5,0.5,0.5", help="Initial conditions x,y,pi_x,pi_y"),
    t_max: float = typer.Option(math.pi, help="Final time"),
    steps: int = typer.Option(64, help="Number of time steps"),
    mass: float = typer.Option(None, help="Mass (default from configuration)"),
    output: str = typer.Option(None, help=OUTPUT_HELP),
    fmt: str = typer.Option("csv", "--format", help=FORMAT_HELP),
) -> None:
    '''Sample the closed-form trajectory of the free particle

    Rows are t, Q1, Q2, Pi1, Pi2 and the constant of motion Omega.

    Examples: \n
        >>> ncphase trajectory --gamma 1 --ic 0.5,0.5,0.5,0.5 --t-max 3.1416 --steps 64
    '''
    with handle_errors():
        gamma, mass, hbar = _free_particle(gamma, mass)
        start = dynamics.initial_conditions(*parse_vector(ic, 4, "initial conditions"))
        result = dynamics.sample_trajectory(start, gamma, mass, _time_grid(t_max, steps), hbar)
        write_table(["t", "Q1", "Q2", "Pi1", "Pi2", "Omega"], result.as_array().tolist(), output, fmt)


@app.command("wigner-map")
def wigner_map(
    gamma: float = typer.Option(None, help="Characteristic frequency (default eta / 2 m hbar)"),
    t: float = typer.Option(0.0, help="Time"),
    axis: int = typer.Option(1, help="Kept phase-space sector, 1 or 2"),
    a: float = typer.Option(None, help="Half-width of the position box (default from configuration)"),
    pi0: str = typer.Option("0,0", help="Momentum centre pi_x,pi_y of the Gaussian state"),
    centre: str = typer.Option("0,0", help="Position box centre x,y"),
    q_grid: str = typer.Option(None, help="Position grid, start:stop:Nlin or a comma list (default the box)"),
    pi_grid: str = typer.Option(None, help="Momentum grid, start:stop:Nlin or a comma list"),
    mass: float = typer.Option(None, help="Mass (default from configuration)"),
    abs_tol: float = typer.Option(None, help="Absolute quadrature tolerance"),
    rel_tol: float = typer.Option(None, help="Relative quadrature tolerance"),
    output: str = typer.Option(None, help=OUTPUT_HELP),
    fmt: str = typer.Option("csv", "--format", help=FORMAT_HELP),
) -> None:
    '''Evaluate the reduced Wigner function of a Gaussian state on a grid'''
    with handle_errors():
        gamma, mass, hbar = _free_particle(gamma, mass)
        pix, piy = parse_vector(pi0, 2, "momentum centre")
        x, y = parse_vector(centre, 2, "box centre")
        state = wigner.GaussianState(_box(a), pix, piy, x, y)
        q_vals, pi_vals = wigner.default_grid(state, axis)
        if q_grid:
            q_vals = parse_grid(q_grid)
        if pi_grid:
            pi_vals = parse_grid(pi_grid)

        with spinner("Evaluating reduced Wigner function"):
            reduced = wigner.reduce_wigner(state, axis, gamma, mass, t, (q_vals, pi_vals), _quad(abs_tol, rel_tol))

        comments = ["t=%.17g" % t, f"axis={axis}"]
        write_table(["Q", "Pi", "value"], reduced.rows(), output, fmt, comments)


@app.command()
def marginal(
    n: int = typer.Option(0, help="Quantum number of the star-genstate"),
    gamma: float = typer.Option(None, help="Characteristic frequency (default eta / 2 m hbar)"),
    y: float = typer.Option(0.0, help="Centre of the integrated Q2 window"),
    x: float = typer.Option(0.0, help="Position Q1"),
    piy: float = typer.Option(0.0, help="Initial momentum pi_y"),
    a: float = typer.Option(None, help="Half-width of the position box (default from configuration)"),
    pi_grid: str = typer.Option("-6:6:121lin", help="Momentum grid, start:stop:Nlin or a comma list"),
    mass: float = typer.Option(None, help="Mass (default from configuration)"),
    abs_tol: float = typer.Option(None, help="Absolute quadrature tolerance"),
    rel_tol: float = typer.Option(None, help="Relative quadrature tolerance"),
    output: str = typer.Option(None, help=OUTPUT_HELP),
    fmt: str = typer.Option("csv", "--format", help=FORMAT_HELP),
) -> None:
    '''Compute the stationary momentum distribution of a star-genstate'''
    with handle_errors():
        gamma, mass, hbar = _free_particle(gamma, mass)
        quad = _quad(abs_tol, rel_tol)
        coeff = dynamics.free_particle_coefficients(gamma, mass, hbar)
        pi_vals = parse_grid(pi_grid)

        with spinner(f"Integrating star-genstate {n}"):
            state = wigner.stargen_state(n, coeff, _box(a), hbar, quad)
            density = wigner.momentum_marginal(state, y, pi_vals, x, piy, quad)

        write_table(["Pi1", "density"], zip(pi_vals.tolist(), density.tolist()), output, fmt)


@app.command()
def entropy(
    gamma: float = typer.Option(None, help="Characteristic frequency (default eta / 2 m hbar)"),
    t_max: float = typer.Option(2.0 * math.pi, help="Final time"),
    steps: int = typer.Option(50, help="Number of time steps"),
    a: float = typer.Option(None, help="Half-width of the position box (default from configuration)"),
    pi0: str = typer.Option("0,0", help="Momentum centre pi_x,pi_y of the Gaussian state"),
    mass: float = typer.Option(None, help="Mass (default from configuration)"),
    abs_tol: float = typer.Option(None, help="Absolute quadrature tolerance"),
    rel_tol: float = typer.Option(None, help="Relative quadrature tolerance"),
    output: str = typer.Option(None, help=OUTPUT_HELP),
    fmt: str = typer.Option("csv", "--format", help=FORMAT_HELP),
) -> None:
    '''Compute linear entropies and mutual information of a Gaussian state

    Numeric values are followed by their closed forms (_cf columns).
    '''
    with handle_errors():
        gamma, mass, hbar = _free_particle(gamma, mass)
        pix, piy = parse_vector(pi0, 2, "momentum centre")
        state = wigner.GaussianState(_box(a), pix, piy)
        times = _time_grid(t_max, steps)

        with spinner("Integrating purities"):
            series = qinfo.entropy_series(state, gamma, mass, times, _quad(abs_tol, rel_tol), hbar)

        rows = []
        for item in series:
            closed = qinfo.closed_form_entropies(gamma, item.t)
            rows.append([
                gamma * item.t, item.s1, item.s2, item.s12, item.i12,
                closed.s1, closed.s2, closed.s12, qinfo.mutual_information(gamma, item.t),
            ])
        header = ["gamma_t", "S1", "S2", "S12", "I12", "S1_cf", "S2_cf", "S12_cf", "I12_cf"]
        write_table(header, rows, output, fmt)


@app.command("thermo")
def thermo_point(
    model: str = typer.Option("rotor2d-nc", help="Model, one of " + ", ".join(m.value for m in thermo.ModelId)),
    sigma: float = typer.Option(1.0, help="Inverse temperature hbar gamma / k_B T"),
    lam: float = typer.Option(1.0, "--lambda", help="Inertia R^2 eta / hbar^2"),
    deform: float = typer.Option(1.0, help="Scale of the noncommutative terms in [0, 1]"),
    box: float = typer.Option(1.0, help="Half-width of the z box of free3d-nc"),
    rel_tol: float = typer.Option(None, help="Relative series tolerance"),
    max_terms: int = typer.Option(None, help="Maximum number of series terms"),
    output: str = typer.Option(None, help=OUTPUT_HELP),
    fmt: str = typer.Option("csv", "--format", help=FORMAT_HELP),
) -> None:
    '''Compute partition function and thermodynamic variables at one point'''
    with handle_errors():
        gamma, mass, hbar = _free_particle(None, None)
        point = thermo.thermo_variables(
            thermo.ModelId.parse(model), sigma, lam, _series(rel_tol, max_terms), deform,
            a=box, mass=mass, hbar=hbar, gamma=gamma,
        )
        row = [point.sigma, point.lam, point.model, point.z, point.log_z, point.u, point.s, point.cv, point.terms]
        write_table(["sigma", "lambda", "model", "Z", "lnZ", "U", "S", "Cv", "terms"], [row], output, fmt)


@app.command()
def sweep(
    models: str = typer.Option("rotor2d-nc,rotor2d-std", help="Comma-separated models"),
    sigma: str = typer.Option("0.1:20:60log", help="Sigma grid, start:stop:Nlog or a comma list"),
    lam: str = typer.Option("0.01,0.1,1", "--lambda", help="Lambda grid, start:stop:Nlog or a comma list"),
    deform: float = typer.Option(1.0, help="Scale of the noncommutative terms in [0, 1]"),
    rel_tol: float = typer.Option(None, help="Relative series tolerance"),
    max_terms: int = typer.Option(None, help="Maximum number of series terms"),
    output: str = typer.Option(None, help=OUTPUT_HELP),
    fmt: str = typer.Option("csv", "--format", help=FORMAT_HELP),
) -> None:
    '''Sweep thermodynamic variables over sigma and lambda grids

    Noncommutative rotors carry dU, dS and dCv against the standard model.

    Examples: \n
        >>> ncphase sweep --models rotor2d-nc,rotor2d-std --sigma 0.1:20:60log --lambda 0.01,0.1,1
    '''
    with handle_errors():
        model_ids = [thermo.ModelId.parse(name) for name in models.split(",") if name.strip()]
        gamma, mass, hbar = _free_particle(None, None)

        with spinner("Sweeping models"):
            rows = thermo.sweep(
                model_ids, parse_grid(sigma), parse_grid(lam), _series(rel_tol, max_terms), deform,
                mass=mass, hbar=hbar, gamma=gamma,
            )

        table = []
        for row in rows:
            point = row.point
            vals = [point.z, point.u, point.s, point.cv] if point else [None] * 4
            table.append([row.sigma, row.lam, row.model] + vals + [row.du, row.ds, row.dcv, row.err])
        header = ["sigma", "lambda", "model", "Z", "U", "S", "Cv", "dU", "dS", "dCv", "err"]
        write_table(header, table, output, fmt)


@app.command()
def selftest(
    suite: List[str] = typer.Option(None, help="Suite to run (default all), " + ", ".join(oracles.SUITES)),
) -> None:
    '''Run the oracle suites and print a pass/fail table'''
    with handle_errors():
        with spinner("Running self-tests"):
            checks = oracles.run_selftest(suite)

    table = Table(title="ncphase self-test")
    for column in ("suite", "check", "error", "tolerance", "status"):
        table.add_column(column)
    for check in checks:
        status = "[green]pass[/green]" if check.passed else "[red]FAIL[/red]"
        table.add_row(check.suite, check.name, "%.3g" % check.error, "%.0e" % check.tolerance, status)
        if check.message:
            typer.echo(f"{check.suite}: {check.message}", err=True)
    Console().print(table)

    if not all(check.passed for check in checks):
        raise typer.Exit(code=3)


def run(argv: Optional[List[str]] = None) -> int:
    '''Runs the command-line interface and returns its exit code

    0 on success, 2 on usage or validation errors and 3 on numerical failures.
    '''
    try:
        code = app(args=argv, prog_name="ncphase", standalone_mode=False)
    except click.exceptions.ClickException as err:
        err.show()
        return err.exit_code
    except click.exceptions.Abort:
        typer.echo("Aborted!", err=True)
        return 1
    return code if isinstance(code, int) else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
