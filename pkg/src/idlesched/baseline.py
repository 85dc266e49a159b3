"""State-of-the-art baseline: finite machine-mode transition graphs, the gap
cost they induce, and the adapted time-indexed DP with O(|H|^2 n) complexity.

A transition graph has one processing mode plus standby modes; transitions
carry a duration and an energy. A gap of length delta is priced at the
cheapest applicable option: stay in the processing mode, or switch down to a
standby (feasible once the gap covers the down and up transitions), hold,
and switch back.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import FullyUtilised, InfeasibleOrder, NoPath, OutOfRange
from .furnace import BilinearFurnaceModel, heat_up_time, trim_power
from .instances import Instance, Schedule, propagate_windows


@dataclass(frozen=True)
class Mode:
    name: str
    hold_power: float


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    duration: float
    energy: float


@dataclass(frozen=True)
class StandbyOption:
    """A standby mode folded together with its down/up transitions."""

    name: str
    power: float
    t_down: float
    t_up: float
    e_down: float
    e_up: float

    @property
    def threshold(self) -> float:
        return self.t_down + self.t_up


@dataclass(frozen=True)
class TransitionGraph:
    """Machine modes with hold powers and timed, energy-costed transitions.

    The first mode is the processing mode.
    """

    modes: tuple[Mode, ...]
    transitions: tuple[Transition, ...]
    processing_mode: int = 0

    def __post_init__(self) -> None:
        names = [m.name for m in self.modes]
        if len(set(names)) != len(names):
            raise ValueError("mode names must be unique")
        for m in self.modes:
            if m.hold_power < 0:
                raise ValueError(f"mode {m.name}: hold power must be >= 0")
        for t in self.transitions:
            if t.duration <= 0:
                raise ValueError(f"transition {t.source}->{t.target}: duration must be > 0")
            if t.energy < 0:
                raise ValueError(f"transition {t.source}->{t.target}: energy must be >= 0")
            if t.source not in names or t.target not in names:
                raise ValueError(f"transition {t.source}->{t.target}: unknown mode")
        # every standby mode must be reachable from and back to processing
        if not self.standby_modes():
            raise ValueError("graph needs at least one standby mode")

    @property
    def processing_power(self) -> float:
        return self.modes[self.processing_mode].hold_power

    def standby_modes(self) -> list[StandbyOption]:
        on = self.modes[self.processing_mode].name
        down = {t.target: t for t in self.transitions if t.source == on}
        up = {t.source: t for t in self.transitions if t.target == on}
        options = []
        for idx, m in enumerate(self.modes):
            if idx == self.processing_mode:
                continue
            if m.name not in down or m.name not in up:
                raise ValueError(
                    f"standby mode {m.name} must have transitions from and to "
                    f"the processing mode"
                )
            options.append(
                StandbyOption(
                    name=m.name,
                    power=m.hold_power,
                    t_down=down[m.name].duration,
                    t_up=up[m.name].duration,
                    e_down=down[m.name].energy,
                    e_up=up[m.name].energy,
                )
            )
        return options

    def gap_cost_many(self, deltas: np.ndarray) -> np.ndarray:
        d = np.asarray(deltas, dtype=float)
        out = self.processing_power * d
        for opt in self.standby_modes():
            cost = opt.e_down + opt.e_up + opt.power * (d - opt.threshold)
            out = np.where(d >= opt.threshold, np.minimum(out, cost), out)
        return out


def gap_cost(g: TransitionGraph, delta: float) -> float:
    """Cheapest energy for bridging a gap of the given length."""
    if delta < 0:
        raise ValueError("gap length must be >= 0")
    return float(g.gap_cost_many(np.array([delta]))[0])


def derive_transition_graph(
    model: BilinearFurnaceModel, standby_temps: Sequence[float]
) -> TransitionGraph:
    """Transition graph for the furnace: one standby mode per temperature.

    Cooling to a standby temperature costs no energy and takes
    ln(x0/x_s)/alpha; heating back runs at maximum power for the segment
    closed-form duration. Hold powers are the trim powers.
    """
    modes = [Mode("on", trim_power(model, model.x0))]
    transitions = []
    for temp in standby_temps:
        x_s = temp - model.ambient
        if not (0 < x_s < model.x0):
            raise OutOfRange(
                f"standby temperature {temp} must lie strictly between the "
                f"ambient ({model.ambient}) and operating "
                f"({model.operating_temperature}) temperatures"
            )
        name = f"standby_{temp:g}"
        t_down = math.log(model.x0 / x_s) / model.alpha
        t_up = heat_up_time(model, x_s)
        modes.append(Mode(name, trim_power(model, x_s)))
        transitions.append(Transition("on", name, t_down, 0.0))
        transitions.append(Transition(name, "on", t_up, model.u_max * t_up))
    return TransitionGraph(modes=tuple(modes), transitions=tuple(transitions))


def dp_solve(
    instance: Instance, g: TransitionGraph, step: int = 1
) -> tuple[Schedule, float]:
    """Adapted time-indexed DP over (discretised time, tasks completed).

    Tasks collapse to single processing units; the gap between consecutive
    tasks is priced by gap_cost, which is precomputed per gap length. Ties
    break toward earlier starts. Worst-case O(|H|^2 n) in the number of
    discretisation intervals |H|.
    """
    if not instance.propagated:
        instance = propagate_windows(instance)
    if step < 1:
        raise ValueError("step must be a positive integer")
    r, d, p = instance.releases, instance.deadlines, instance.processings
    if step > 1 and (np.any(r % step) or np.any(d % step) or np.any(p % step)):
        raise ValueError("step must divide all task data")
    ru, du, pu = r // step, d // step, p // step
    n = instance.n
    if np.any(du - ru < pu):
        raise InfeasibleOrder("a window is shorter than its processing time")

    max_gap = 0
    for i in range(n - 1):
        max_gap = max(max_gap, int((du[i + 1] - pu[i + 1]) - (ru[i] + pu[i])))
    gapc = g.gap_cost_many(np.arange(max_gap + 1) * float(step))

    start_grids = [np.arange(ru[i], du[i] - pu[i] + 1) for i in range(n)]
    dp = np.zeros(len(start_grids[0]))
    backptr: list[np.ndarray] = []
    for i in range(1, n):
        completions = start_grids[i - 1] + pu[i - 1]
        starts = start_grids[i]
        diff = starts[None, :] - completions[:, None]
        cost = np.where(
            diff >= 0, dp[:, None] + gapc[np.clip(diff, 0, max_gap)], np.inf
        )
        backptr.append(np.argmin(cost, axis=0))
        dp = np.min(cost, axis=0)
    best = int(np.argmin(dp))
    energy = float(dp[best])
    if not np.isfinite(energy):
        raise NoPath("time-indexed DP found no feasible schedule")
    cols = [best]
    for arg in reversed(backptr):
        cols.append(int(arg[cols[-1]]))
    cols.reverse()
    starts = tuple(
        float(start_grids[i][cols[i]] * step) for i in range(n)
    )
    return Schedule(starts), energy


def average_idle_power(instance: Instance, energy: float) -> float:
    """Idle energy divided by the idle capacity of the horizon."""
    capacity = instance.horizon - instance.total_processing
    if capacity <= 0:
        raise FullyUtilised("machine has no idle capacity")
    return energy / capacity


# ---------------------------------------------------------------------------
# CSV interface


def save_transition_graph(g: TransitionGraph, path: str | Path,
                          comments: Iterable[str] = ()) -> None:
    """Two CSV sections; the first mode row is the processing mode."""
    with Path(path).open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write("modes: name,power\n")
        writer = csv.writer(fh)
        order = [g.modes[g.processing_mode]] + [
            m for i, m in enumerate(g.modes) if i != g.processing_mode
        ]
        for m in order:
            writer.writerow([m.name, repr(m.hold_power)])
        fh.write("transitions: from,to,duration,energy\n")
        for t in g.transitions:
            writer.writerow([t.source, t.target, repr(t.duration), repr(t.energy)])


def load_transition_graph(path: str | Path) -> TransitionGraph:
    modes: list[Mode] = []
    transitions: list[Transition] = []
    section = None
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("modes:"):
                section = "modes"
                continue
            if line.startswith("transitions:"):
                section = "transitions"
                continue
            row = next(csv.reader([line]))
            if section == "modes":
                modes.append(Mode(row[0], float(row[1])))
            elif section == "transitions":
                transitions.append(
                    Transition(row[0], row[1], float(row[2]), float(row[3]))
                )
            else:
                raise ValueError(f"{path}: row outside any section: {line!r}")
    if not modes:
        raise ValueError(f"{path}: no modes found")
    return TransitionGraph(modes=tuple(modes), transitions=tuple(transitions))
