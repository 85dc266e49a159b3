"""Command-line front end: instance generation, solving, furnace simulation
and tabulation, identification, and the benchmark harness.

Exit codes: 0 success, 2 infeasible instance, 3 parse/validation error,
4 numeric failure.
"""

from __future__ import annotations

import csv
import functools
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import baseline as bl
from . import energy_functions as ef
from . import furnace as fn
from . import instances as inst
from . import scheduler as sched
from .errors import (
    IdleSchedError,
    InfeasibleOrder,
    InvalidSchedule,
    NoPath,
    NonConcaveFunction,
    NotAdmissible,
    OutOfRange,
    SingularSystem,
    TooShortSeries,
)

EXIT_INFEASIBLE = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (InfeasibleOrder, NoPath)):
        return EXIT_INFEASIBLE
    if isinstance(exc, (ValueError, InvalidSchedule, OSError)):
        return EXIT_PARSE
    if isinstance(exc, (NonConcaveFunction, NotAdmissible, OutOfRange,
                        SingularSystem, TooShortSeries, IdleSchedError)):
        return EXIT_NUMERIC
    raise exc


def _guard(fun):
    @functools.wraps(fun)
    def wrapper(*args, **kwargs):
        try:
            return fun(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - mapped to exit codes
            click.echo(f"error: {exc}", err=True)
            sys.exit(_exit_code(exc))

    return wrapper


def _model_options(fun):
    fun = click.option("--alpha", default=fn.CASE_STUDY_ALPHA, show_default=True)(fun)
    fun = click.option("--beta", default=fn.CASE_STUDY_BETA, show_default=True)(fun)
    fun = click.option("--rho", default=fn.CASE_STUDY_RHO, show_default=True)(fun)
    fun = click.option("--u-max", default=fn.CASE_STUDY_U_MAX, show_default=True)(fun)
    fun = click.option("--operating", default=fn.CASE_STUDY_OPERATING_C,
                       show_default=True, help="Operating temperature [°C].")(fun)
    fun = click.option("--ambient", default=fn.CASE_STUDY_AMBIENT_C,
                       show_default=True, help="Ambient temperature [°C].")(fun)
    return fun


def _make_model(alpha, beta, rho, u_max, operating, ambient) -> fn.BilinearFurnaceModel:
    return fn.BilinearFurnaceModel(
        alpha=alpha, beta=beta, rho=rho, u_max=u_max,
        x0=operating - ambient, ambient=ambient,
    )


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Minimum-idle-energy scheduling for a single machine."""


@main.command()
@click.option("-n", "n", type=int, required=True, help="Number of tasks.")
@click.option("--p-min", default=1, show_default=True)
@click.option("--p-max", default=300, show_default=True)
@click.option("--gamma", type=float, required=True, help="Release-gap scale.")
@click.option("--delta", type=float, required=True, help="Deadline-slack scale.")
@click.option("--count", default=1, show_default=True, help="Number of instances.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True)
@_guard
def generate(n, p_min, p_max, gamma, delta, count, seed, out_dir) -> None:
    """Write COUNT random instance CSVs with seeds seed, seed+1, ..."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for k in range(count):
        cfg = inst.GeneratorConfig(n=n, p_min=p_min, p_max=p_max,
                                   gamma=gamma, delta=delta, seed=seed + k)
        instance = inst.generate_instance(cfg)
        path = out_dir / f"instance_n{n}_g{gamma:g}_d{delta:g}_s{seed + k}.csv"
        inst.save_instance(instance, path, comments=[
            f"idlesched {__version__}",
            f"generator: n={n} p_min={p_min} p_max={p_max} "
            f"gamma={gamma} delta={delta} seed={seed + k}",
        ])
        click.echo(str(path))


@main.command()
@click.argument("instance_file", type=click.Path(exists=True, path_type=Path))
@click.option("--function-file", type=click.Path(exists=True, path_type=Path),
              help="Piecewise-linear concave energy function CSV.")
@click.option("--transition-graph", type=click.Path(exists=True, path_type=Path),
              help="Solve with the time-indexed DP over this transition graph.")
@click.option("--step", default=1, show_default=True,
              help="DP discretisation step (transition-graph mode).")
@click.option("--t-f-max", default=2000.0, show_default=True,
              help="Tabulation range for the default furnace function.")
@click.option("--out", "out_path", type=click.Path(path_type=Path),
              default=Path("schedule.csv"), show_default=True)
@_model_options
@_guard
def solve(instance_file, function_file, transition_graph, step, t_f_max,
          out_path, alpha, beta, rho, u_max, operating, ambient) -> None:
    """Solve one instance; without an explicit energy source the tabulated
    furnace function with the default (case-study) parameters is used."""
    instance = inst.propagate_windows(inst.load_instance(instance_file))
    t0 = time.perf_counter()
    if transition_graph is not None:
        graph = bl.load_transition_graph(transition_graph)
        schedule, energy = bl.dp_solve(instance, graph, step=step)
        source = f"dp:{transition_graph}"
    else:
        if function_file is not None:
            f = ef.load_function(function_file)
            source = str(function_file)
        else:
            model = _make_model(alpha, beta, rho, u_max, operating, ambient)
            f = fn.tabulate(model, t_f_max=t_f_max, step=1.0)
            source = "furnace-defaults"
        schedule, energy = sched.solve(instance, f)
    wall = time.perf_counter() - t0
    inst.save_schedule(instance, schedule, out_path, comments=[
        f"idlesched {__version__}",
        f"instance={instance_file} energy_source={source}",
        f"energy={energy!r}",
    ])
    pbar = bl.average_idle_power(instance, energy) \
        if instance.horizon > instance.total_processing else float("nan")
    click.echo(f"energy={energy:.6f} pbar={pbar:.6f} wall_time_s={wall:.6f}")


@main.command()
@click.option("--t-f", type=float, required=True, help="Idle period length [min].")
@click.option("--sample-step", default=1.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path),
              default=Path("trajectory.csv"), show_default=True)
@click.option("--plot", "plot_path", type=click.Path(path_type=Path),
              help="Also render the trajectory figure to this file.")
@_model_options
@_guard
def simulate(t_f, sample_step, out_path, plot_path,
             alpha, beta, rho, u_max, operating, ambient) -> None:
    """Simulate the energy-optimal bang-bang control over one idle period."""
    model = _make_model(alpha, beta, rho, u_max, operating, ambient)
    model.require_admissible()
    if t_f == 0.0:
        traj = fn.Trajectory(times=np.array([0.0]), x=np.array([model.x0]),
                             power=np.array([0.0]), energy=0.0)
    else:
        traj = fn.simulate(model, model.x0, fn.bang_bang_segments(model, t_f),
                           sample_step=sample_step)
    cum = traj.cumulative_energy()
    with out_path.open("w", newline="") as fh:
        fh.write(f"# idlesched {__version__} simulate t_f={t_f!r}\n")
        writer = csv.writer(fh)
        writer.writerow(["time", "temperature", "power", "energy"])
        for t, x, u, e in zip(traj.times, traj.x, traj.power, cum):
            writer.writerow([repr(float(t)), repr(float(x + model.ambient)),
                             repr(float(u)), repr(float(e))])
    if plot_path is not None:
        from .plotting import plot_trajectory

        plot_trajectory(traj, model, plot_path)
    click.echo(f"energy={traj.energy:.6f} final_temperature="
               f"{traj.final_x + model.ambient:.4f}")


@main.command()
@click.option("--t-f-max", default=2000.0, show_default=True)
@click.option("--step", default=1.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path),
              default=Path("energy_function.csv"), show_default=True)
@click.option("--plot", "plot_path", type=click.Path(path_type=Path),
              help="Also render the energy-function figure to this file.")
@_model_options
@_guard
def tabulate(t_f_max, step, out_path, plot_path,
             alpha, beta, rho, u_max, operating, ambient) -> None:
    """Tabulate the furnace idle energy function as breakpoint rows."""
    model = _make_model(alpha, beta, rho, u_max, operating, ambient)
    f = fn.tabulate(model, t_f_max=t_f_max, step=step)
    verdict = ef.check_concavity(f, grid_step=step, delta_max=t_f_max)
    if not verdict:
        raise NonConcaveFunction(
            f"tabulated function failed the concavity check at "
            f"delta={verdict.violation_at}"
        )
    ef.save_function(f, out_path, comments=[
        f"idlesched {__version__} tabulate t_f_max={t_f_max!r} step={step!r}",
        f"model: alpha={alpha!r} beta={beta!r} rho={rho!r} u_max={u_max!r} "
        f"operating={operating!r} ambient={ambient!r}",
    ])
    if plot_path is not None:
        from .plotting import plot_energy_function

        plot_energy_function(f, plot_path, delta_max=t_f_max,
                             bound=fn.full_reheat_energy(model))
    click.echo(str(out_path))


@main.command()
@click.argument("measurements_file", type=click.Path(exists=True, path_type=Path))
@click.option("--window", default=5, show_default=True)
@click.option("--degree", default=2, show_default=True)
@click.option("--ambient", default=fn.CASE_STUDY_AMBIENT_C, show_default=True)
@click.option("--u-max", default=fn.CASE_STUDY_U_MAX, show_default=True)
@_guard
def identify(measurements_file, window, degree, ambient, u_max) -> None:
    """Least-squares identification from a time,temperature,power CSV."""
    series = fn.load_measurements(measurements_file, ambient=ambient)
    with_derivs = fn.estimate_derivatives(
        [(t, x) for t, x, _ in series], window=window, degree=degree
    )
    samples = [(x, dx, u) for (_, x, dx), (_, _, u) in zip(with_derivs, series)]
    alpha, beta, rho = fn.fit_parameters(samples)
    x0 = max(x for _, x, _ in series)
    model = fn.BilinearFurnaceModel(alpha=alpha, beta=beta, rho=rho,
                                    u_max=u_max, x0=x0, ambient=ambient)
    err = fn.mape(model, series)
    click.echo(f"alpha={alpha!r} beta={beta!r} rho={rho!r} mape_percent={err:.4f}")


@dataclass(frozen=True)
class BenchmarkRecord:
    """One (instance, machine model) result of the comparison harness."""

    instance: str
    n: int
    utilization: float
    model: str
    energy: float
    pbar: float
    wall_time_s: float

    @property
    def bucket(self) -> float:
        """Upper edge of the utilisation decile bucket, e.g. 0.3 for (0.2, 0.3]."""
        return math.ceil(self.utilization * 10 - 1e-12) / 10


BENCHMARK_MODELS = ("E_cont", "G_600", "G_700", "G_600_700")


@functools.lru_cache(maxsize=None)
def _case_study_setup(t_f_max: float):
    model = fn.BilinearFurnaceModel.case_study()
    e_cont = fn.tabulate(model, t_f_max=t_f_max, step=1.0)
    graphs = {
        "G_600": bl.derive_transition_graph(model, [600.0]),
        "G_700": bl.derive_transition_graph(model, [700.0]),
        "G_600_700": bl.derive_transition_graph(model, [600.0, 700.0]),
    }
    return e_cont, graphs


def _benchmark_one(args: tuple[str, float]) -> list[BenchmarkRecord]:
    path, t_f_max = args
    e_cont, graphs = _case_study_setup(t_f_max)
    instance = inst.propagate_windows(inst.load_instance(path))
    util = inst.utilization(instance)
    records = []
    t0 = time.perf_counter()
    _, energy = sched.solve(instance, e_cont)
    records.append(BenchmarkRecord(
        instance=Path(path).name, n=instance.n, utilization=util,
        model="E_cont", energy=energy,
        pbar=bl.average_idle_power(instance, energy),
        wall_time_s=time.perf_counter() - t0,
    ))
    for label, graph in graphs.items():
        t0 = time.perf_counter()
        _, energy = bl.dp_solve(instance, graph, step=1)
        records.append(BenchmarkRecord(
            instance=Path(path).name, n=instance.n, utilization=util,
            model=label, energy=energy,
            pbar=bl.average_idle_power(instance, energy),
            wall_time_s=time.perf_counter() - t0,
        ))
    return records


@main.command()
@click.argument("instance_dir", type=click.Path(exists=True, file_okay=False,
                                                path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path),
              default=Path("benchmark.csv"), show_default=True)
@click.option("--t-f-max", default=2000.0, show_default=True)
@click.option("--jobs", default=1, show_default=True,
              help="Parallel workers; results merge deterministically.")
@click.option("--plot", "plot_path", type=click.Path(path_type=Path),
              help="Also render the comparison boxplot to this file.")
@_guard
def benchmark(instance_dir, out_path, t_f_max, jobs, plot_path) -> None:
    """Solve every instance CSV in a directory with the furnace idle energy
    function and the G_600 / G_700 / G_600_700 transition-graph DP, and write
    per-instance records plus per-utilisation-bucket aggregates."""
    files = sorted(str(p) for p in Path(instance_dir).glob("*.csv"))
    if not files:
        raise ValueError(f"no instance CSVs in {instance_dir}")
    work = [(f, t_f_max) for f in files]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_benchmark_one, work))
    else:
        chunks = [_benchmark_one(w) for w in work]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda rec: (rec.instance, rec.model))
    with out_path.open("w", newline="") as fh:
        fh.write(f"# idlesched {__version__} benchmark t_f_max={t_f_max!r}\n")
        writer = csv.writer(fh)
        writer.writerow(["instance", "n", "utilization", "model", "energy",
                         "pbar", "wall_time_s"])
        for rec in records:
            writer.writerow([rec.instance, rec.n, f"{rec.utilization:.6f}",
                             rec.model, repr(rec.energy), repr(rec.pbar),
                             f"{rec.wall_time_s:.6f}"])
    buckets_path = out_path.with_name(out_path.stem + "_buckets" + out_path.suffix)
    with buckets_path.open("w", newline="") as fh:
        fh.write(f"# idlesched {__version__} benchmark bucket aggregates\n")
        writer = csv.writer(fh)
        writer.writerow(["bucket_low", "bucket_high", "model", "mean_pbar", "count"])
        keys = sorted({(rec.bucket, rec.model) for rec in records})
        for bucket, model in keys:
            vals = [r.pbar for r in records
                    if r.bucket == bucket and r.model == model]
            writer.writerow([f"{bucket - 0.1:.1f}", f"{bucket:.1f}", model,
                             repr(float(np.mean(vals))), len(vals)])
    if plot_path is not None:
        from .plotting import plot_benchmark

        plot_benchmark(records, plot_path)
    click.echo(f"{out_path} ({len(records)} records)")
    click.echo(str(buckets_path))


if __name__ == "__main__":
    main()
