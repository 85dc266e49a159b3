"""Bilinear furnace model: closed-form simulation, energy-optimal bang-bang
idle control, switching-time root finding, idle-energy tabulation, and
least-squares parameter identification.

State x is the deviation of the furnace temperature from the ambient
temperature; dynamics are dx/dt = -alpha*x + beta*u - rho*x*u with input
power u in [0, u_max]. Time is in minutes, power in kW, energy in kW*min
(divide by 60 for kWh).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .energy_functions import PiecewiseLinearConcave
from .errors import (
    DivisionByZeroTemperature,
    NotAdmissible,
    OutOfRange,
    SingularSystem,
    TooShortSeries,
)

# Identified parameters of the case-study steel-hardening furnace and its
# operating regime (960 degC at ~35 degC ambient, 160 kW maximum power).
CASE_STUDY_ALPHA = 0.003821964
CASE_STUDY_BETA = 0.175187494
CASE_STUDY_RHO = 0.000094367
CASE_STUDY_U_MAX = 160.0
CASE_STUDY_OPERATING_C = 960.0
CASE_STUDY_AMBIENT_C = 35.0

BISECTION_MAX_ITER = 200


@dataclass(frozen=True)
class BilinearFurnaceModel:
    alpha: float
    beta: float
    rho: float
    u_max: float
    x0: float
    ambient: float = CASE_STUDY_AMBIENT_C

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "rho", "u_max", "x0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def admissible(self) -> bool:
        """Trim power at x0 must stay below the maximum applicable power."""
        return (self.beta - self.rho * self.x0) * self.u_max - self.alpha * self.x0 > 0

    def require_admissible(self) -> None:
        if not self.admissible:
            raise NotAdmissible(
                "(beta - rho*x0)*u_max - alpha*x0 must be positive; trim power "
                "at the operating point exceeds u_max"
            )

    @property
    def x_saturation(self) -> float:
        """Steady state reached under permanent maximum power."""
        return self.beta * self.u_max / (self.alpha + self.rho * self.u_max)

    @property
    def operating_temperature(self) -> float:
        return self.ambient + self.x0

    @classmethod
    def case_study(cls) -> "BilinearFurnaceModel":
        return cls(
            alpha=CASE_STUDY_ALPHA,
            beta=CASE_STUDY_BETA,
            rho=CASE_STUDY_RHO,
            u_max=CASE_STUDY_U_MAX,
            x0=CASE_STUDY_OPERATING_C - CASE_STUDY_AMBIENT_C,
            ambient=CASE_STUDY_AMBIENT_C,
        )


@dataclass(frozen=True)
class ControlSegment:
    duration: float
    power: float

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ValueError("segment duration must be >= 0")
        if self.power < 0:
            raise ValueError("segment power must be >= 0")


@dataclass(frozen=True)
class Trajectory:
    """Sampled (time, temperature deviation, applied power) triples."""

    times: np.ndarray
    x: np.ndarray
    power: np.ndarray
    energy: float

    @property
    def final_x(self) -> float:
        return float(self.x[-1])

    def temperatures(self, ambient: float) -> np.ndarray:
        return self.x + ambient

    def cumulative_energy(self) -> np.ndarray:
        """Energy consumed up to each sample (trapezoid-free: power is
        piecewise constant between samples)."""
        dt = np.diff(self.times)
        steps = self.power[:-1] * dt
        return np.concatenate(([0.0], np.cumsum(steps)))


def _segment_state(model: BilinearFurnaceModel, x_start: float, u: float,
                   t: float | np.ndarray):
    """Closed-form state under constant power u, t after the segment start."""
    k = model.alpha + model.rho * u
    x_inf = model.beta * u / k
    return np.exp(-k * np.asarray(t, dtype=float)) * (x_start - x_inf) + x_inf


def simulate(
    model: BilinearFurnaceModel,
    x_init: float,
    segments: Sequence[ControlSegment],
    sample_step: float = 1.0,
) -> Trajectory:
    """Piecewise closed-form simulation; the state stays continuous across
    segment boundaries and energy is sum of power*duration."""
    if x_init < 0:
        raise ValueError("x_init must be >= 0")
    if sample_step <= 0:
        raise ValueError("sample_step must be positive")
    times = [0.0]
    xs = [float(x_init)]
    powers = [segments[0].power if segments else 0.0]
    t_base = 0.0
    x_entry = float(x_init)
    for seg in segments:
        local = np.arange(sample_step, seg.duration, sample_step)
        local = np.append(local, seg.duration)
        local = local[local <= seg.duration + 1e-12]
        if seg.duration == 0.0:
            continue
        # boundary samples carry the incoming segment's power, so the
        # piecewise-constant integral of the power column is the energy
        powers[-1] = seg.power
        vals = _segment_state(model, x_entry, seg.power, local)
        times.extend((t_base + local).tolist())
        xs.extend(vals.tolist())
        powers.extend([seg.power] * len(local))
        t_base += seg.duration
        x_entry = float(vals[-1])
    energy = float(sum(s.power * s.duration for s in segments))
    return Trajectory(
        times=np.array(times), x=np.array(xs), power=np.array(powers), energy=energy
    )


def trim_power(model: BilinearFurnaceModel, x: float) -> float:
    """Constant input holding deviation x as an equilibrium: alpha*x/(beta - rho*x)."""
    if x <= 0:
        if x == 0:
            return 0.0
        raise OutOfRange("deviation must be positive")
    denom = model.beta - model.rho * x
    if denom <= 0:
        raise OutOfRange(f"deviation {x} outside the controllable range")
    return model.alpha * x / denom


def _reheat_residual(model: BilinearFurnaceModel, t_sw: float, t_f: float) -> float:
    """State after cooling for t_sw then heating at u_max until t_f, minus x0.

    Strictly decreasing in t_sw; positive at t_sw = 0, negative at t_sw = t_f.
    """
    k = model.alpha + model.rho * model.u_max
    x_inf = model.x_saturation
    x_sw = model.x0 * math.exp(-model.alpha * t_sw)
    return math.exp(-k * (t_f - t_sw)) * (x_sw - x_inf) + x_inf - model.x0


def switching_time(model: BilinearFurnaceModel, t_f: float) -> float:
    """Unique switch-off-to-full-power time of the bang-bang idle control.

    Found by bisection on [0, t_f]; the bracketing function is strictly
    decreasing in t_sw, so convergence is unconditional.
    """
    if t_f < 0:
        raise ValueError("t_f must be >= 0")
    model.require_admissible()
    if t_f == 0.0:
        return 0.0
    lo, hi = 0.0, float(t_f)
    width_tol = 1e-15 * max(1.0, t_f)
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if _reheat_residual(model, mid, t_f) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= width_tol:
            break
    return 0.5 * (lo + hi)


def switching_time_derivative(model: BilinearFurnaceModel, t_sw: float) -> float:
    """d t_sw / d t_f at the given switching time; lies in (0, 1) under
    admissibility."""
    if t_sw < 0:
        raise ValueError("t_sw must be >= 0")
    denom = (model.rho * model.x0 - model.beta * math.exp(model.alpha * t_sw)) * model.u_max
    return 1.0 + model.alpha * model.x0 / denom


def idle_energy(model: BilinearFurnaceModel, t_f: float) -> float:
    """Minimum energy over an idle period of length t_f: u_max * (t_f - t_sw)."""
    return model.u_max * (t_f - switching_time(model, t_f))


def heat_up_time(model: BilinearFurnaceModel, x_from: float) -> float:
    """Time to heat from deviation x_from to x0 under maximum power."""
    model.require_admissible()
    x_inf = model.x_saturation
    if not (0 <= x_from <= model.x0):
        raise OutOfRange("x_from must lie in [0, x0]")
    k = model.alpha + model.rho * model.u_max
    return math.log((x_inf - x_from) / (x_inf - model.x0)) / k


def full_reheat_energy(model: BilinearFurnaceModel) -> float:
    """Energy to heat from ambient to the operating temperature; the upper
    bound the idle energy function approaches for long idle periods."""
    return model.u_max * heat_up_time(model, 0.0)


def tabulate(
    model: BilinearFurnaceModel, t_f_max: float, step: float = 1.0
) -> PiecewiseLinearConcave:
    """Sample the idle energy function on a uniform grid.

    Once the value comes within 1e-6 (relative) of the full-reheat-from-ambient
    bound, the table is extended flat instead of resolving sub-noise increments.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if t_f_max < step:
        raise ValueError("t_f_max must be at least one step")
    model.require_admissible()
    bound = full_reheat_energy(model)
    n_steps = math.ceil(t_f_max / step)
    pts: list[tuple[float, float]] = [(0.0, 0.0)]
    capped = None
    for k in range(1, n_steps + 1):
        t = k * step
        if capped is not None:
            pts.append((t, capped))
            continue
        e = idle_energy(model, t)
        if bound - e <= 1e-6 * bound:
            capped = e
        pts.append((t, e))
    return PiecewiseLinearConcave(pts)


def bang_bang_segments(model: BilinearFurnaceModel, t_f: float) -> list[ControlSegment]:
    """Optimal idle-period control: zero power until t_sw, u_max afterwards."""
    t_sw = switching_time(model, t_f)
    return [ControlSegment(t_sw, 0.0), ControlSegment(t_f - t_sw, model.u_max)]


def kw_min_to_kwh(energy: float) -> float:
    return energy / 60.0


# ---------------------------------------------------------------------------
# Identification


def fit_parameters(
    samples: Sequence[tuple[float, float, float]]
) -> tuple[float, float, float]:
    """Ordinary least squares for (alpha, beta, rho) on dx/dt = -a*x + b*u - r*x*u.

    Each sample is (x, dx/dt, u). Raises SingularSystem when the regressor
    matrix is rank deficient (e.g. all inputs zero).
    """
    if len(samples) < 3:
        raise SingularSystem("need at least 3 samples")
    x = np.array([s[0] for s in samples], dtype=float)
    dx = np.array([s[1] for s in samples], dtype=float)
    u = np.array([s[2] for s in samples], dtype=float)
    regressors = np.column_stack([-x, u, -x * u])
    if np.linalg.matrix_rank(regressors) < 3:
        raise SingularSystem("regressor matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(regressors, dx, rcond=None)
    return float(coef[0]), float(coef[1]), float(coef[2])


def estimate_derivatives(
    series: Sequence[tuple[float, float]], window: int = 5, degree: int = 2
) -> list[tuple[float, float, float]]:
    """Per-point local polynomial fit; derivative of the fit at the point.

    Interior points use a centred window; endpoints use the nearest one-sided
    window of the same width. The series must be uniformly sampled.
    """
    if window % 2 == 0 or window <= degree or degree < 1:
        raise ValueError("need odd window > degree >= 1")
    if len(series) < window:
        raise TooShortSeries(f"need at least {window} samples, got {len(series)}")
    t = np.array([s[0] for s in series], dtype=float)
    x = np.array([s[1] for s in series], dtype=float)
    half = window // 2
    out: list[tuple[float, float, float]] = []
    for i in range(len(series)):
        lo = min(max(i - half, 0), len(series) - window)
        sl = slice(lo, lo + window)
        # fit around the evaluation point so the linear coefficient is d/dt there
        coeffs = np.polyfit(t[sl] - t[i], x[sl], degree)
        out.append((float(t[i]), float(x[i]), float(coeffs[-2])))
    return out


def mape(
    model: BilinearFurnaceModel,
    measured: Sequence[tuple[float, float, float]],
) -> float:
    """Mean absolute percentage error of the simulated deviation against a
    measured (time, deviation, power) series with piecewise-constant input."""
    if not measured:
        raise ValueError("measured series is empty")
    t = np.array([s[0] for s in measured], dtype=float)
    x_meas = np.array([s[1] for s in measured], dtype=float)
    u = np.array([s[2] for s in measured], dtype=float)
    if np.any(x_meas == 0.0):
        raise DivisionByZeroTemperature("measured series contains zero temperature")
    x_sim = np.empty_like(x_meas)
    x_sim[0] = x_meas[0]
    for i in range(1, len(t)):
        x_sim[i] = float(_segment_state(model, x_sim[i - 1], u[i - 1], t[i] - t[i - 1]))
    return float(np.mean(np.abs(x_sim - x_meas) / np.abs(x_meas)) * 100.0)


# ---------------------------------------------------------------------------
# CSV interface


def load_measurements(
    path: str | Path, ambient: float = CASE_STUDY_AMBIENT_C
) -> list[tuple[float, float, float]]:
    """Read `time,temperature,power` rows; temperatures in degC are converted
    to deviation from the ambient."""
    with Path(path).open(newline="") as fh:
        rows = [row for row in csv.reader(fh)
                if row and not row[0].lstrip().startswith("#")]
    if not rows or [h.strip() for h in rows[0]] != ["time", "temperature", "power"]:
        raise ValueError(f"{path}: expected header time,temperature,power")
    return [
        (float(r[0]), float(r[1]) - ambient, float(r[2])) for r in rows[1:]
    ]


def save_measurements(
    series: Iterable[tuple[float, float, float]],
    path: str | Path,
    ambient: float = CASE_STUDY_AMBIENT_C,
) -> None:
    """Write (time, deviation, power) triples as `time,temperature,power`."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "temperature", "power"])
        for t, x, u in series:
            writer.writerow([repr(float(t)), repr(float(x + ambient)), repr(float(u))])
