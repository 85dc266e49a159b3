"""Task/instance data model, window propagation, schedule validation and
objective evaluation, plus the randomized instance generator.

Instances carry integer task data; schedules carry real start times. All
objects are immutable after construction.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .errors import DegenerateHorizon, InfeasibleOrder, InvalidSchedule

# Feasibility slack for real-valued start-time comparisons.
TIME_TOL = 1e-9


@dataclass(frozen=True)
class Task:
    """One task: release time, deadline and processing time (integers)."""

    release: int
    deadline: int
    processing: int

    def __post_init__(self) -> None:
        if self.release < 0:
            raise ValueError(f"release must be non-negative, got {self.release}")
        if self.processing <= 0:
            raise ValueError(f"processing must be positive, got {self.processing}")
        if self.release + self.processing > self.deadline:
            raise ValueError(
                f"window [{self.release}, {self.deadline}] shorter than "
                f"processing time {self.processing}"
            )


@dataclass(frozen=True)
class Instance:
    """Ordered task list; the index is the fixed processing order."""

    tasks: tuple[Task, ...]
    propagated: bool = False

    def __post_init__(self) -> None:
        if not self.tasks:
            raise ValueError("instance must contain at least one task")
        object.__setattr__(self, "tasks", tuple(self.tasks))

    @property
    def n(self) -> int:
        return len(self.tasks)

    @functools.cached_property
    def releases(self) -> np.ndarray:
        return np.array([t.release for t in self.tasks], dtype=np.int64)

    @functools.cached_property
    def deadlines(self) -> np.ndarray:
        return np.array([t.deadline for t in self.tasks], dtype=np.int64)

    @functools.cached_property
    def processings(self) -> np.ndarray:
        return np.array([t.processing for t in self.tasks], dtype=np.int64)

    @property
    def total_processing(self) -> int:
        return int(sum(t.processing for t in self.tasks))

    @property
    def horizon(self) -> int:
        """Length of the scheduling horizon, last deadline minus first release."""
        return self.tasks[-1].deadline - self.tasks[0].release


@dataclass(frozen=True)
class Schedule:
    """Start times, one per task, in task order."""

    starts: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "starts", tuple(float(s) for s in self.starts))


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the randomized instance generator."""

    n: int
    p_min: int = 1
    p_max: int = 300
    gamma: float = 1.0
    delta: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not (1 <= self.p_min <= self.p_max):
            raise ValueError("need 1 <= p_min <= p_max")
        if self.gamma <= 0 or self.delta <= 0:
            raise ValueError("gamma and delta must be positive")


def propagate_windows(instance: Instance) -> Instance:
    """Tighten release times left-to-right and deadlines right-to-left.

    Raises InfeasibleOrder if some propagated window becomes shorter than
    the task's processing time. Idempotent.
    """
    r = [t.release for t in instance.tasks]
    d = [t.deadline for t in instance.tasks]
    p = [t.processing for t in instance.tasks]
    n = instance.n
    for i in range(1, n):
        r[i] = max(r[i - 1] + p[i - 1], r[i])
    for i in range(n - 2, -1, -1):
        d[i] = min(d[i + 1] - p[i + 1], d[i])
    for i in range(n):
        if d[i] - r[i] < p[i]:
            raise InfeasibleOrder(
                f"task {i + 1}: propagated window [{r[i]}, {d[i]}] is shorter "
                f"than processing time {p[i]}"
            )
    tasks = tuple(Task(r[i], d[i], p[i]) for i in range(n))
    return Instance(tasks=tasks, propagated=True)


def validate_schedule(instance: Instance, schedule: Schedule) -> bool:
    """True iff the schedule respects windows, order and non-overlap."""
    if len(schedule.starts) != instance.n:
        return False
    s = schedule.starts
    for i, task in enumerate(instance.tasks):
        if s[i] < task.release - TIME_TOL:
            return False
        if s[i] + task.processing > task.deadline + TIME_TOL:
            return False
        if i > 0 and s[i - 1] + instance.tasks[i - 1].processing > s[i] + TIME_TOL:
            return False
    return True


def left_aligned_schedule(instance: Instance) -> Schedule:
    """Each task starts as early as its release and predecessor allow."""
    starts: list[float] = []
    for i, task in enumerate(instance.tasks):
        if i == 0:
            starts.append(float(task.release))
        else:
            prev_end = starts[-1] + instance.tasks[i - 1].processing
            starts.append(max(float(task.release), prev_end))
    return Schedule(tuple(starts))


def idle_gaps(instance: Instance, schedule: Schedule) -> list[float]:
    """Idle-period lengths between consecutive tasks (n-1 values)."""
    s = schedule.starts
    return [
        max(0.0, s[i + 1] - (s[i] + instance.tasks[i].processing))
        for i in range(instance.n - 1)
    ]


def total_idle_energy(
    instance: Instance, schedule: Schedule, f: Callable[[float], float]
) -> float:
    """Sum of f over the idle gaps; nothing is charged before the first task
    or after the last one."""
    if not validate_schedule(instance, schedule):
        raise InvalidSchedule("schedule fails feasibility checks")
    return float(sum(f(gap) for gap in idle_gaps(instance, schedule)))


def generate_instance(config: GeneratorConfig) -> Instance:
    """Draw a random instance with reproducible, platform-independent seeding
    (numpy PCG64).

    Processing times are integer uniform on [p_min, p_max]; release gaps and
    deadline slacks are exponential with scales gamma*mean(p) and
    delta*mean(p), ceiled. Deadlines are propagated right-to-left; releases
    are already propagated by construction. The left-aligned schedule is
    feasible by construction.
    """
    rng = np.random.default_rng(config.seed)
    n = config.n
    p = rng.integers(config.p_min, config.p_max + 1, size=n).tolist()
    mean_p = float(np.mean(p))
    r = [0]
    d = [math.ceil(r[0] + p[0] + rng.exponential(config.delta * mean_p))]
    for i in range(1, n):
        r.append(math.ceil(r[i - 1] + p[i - 1] + rng.exponential(config.gamma * mean_p)))
        d.append(math.ceil(r[i] + p[i] + rng.exponential(config.delta * mean_p)))
    for i in range(n - 2, -1, -1):
        d[i] = min(d[i + 1] - p[i + 1], d[i])
    tasks = tuple(Task(r[i], d[i], p[i]) for i in range(n))
    return Instance(tasks=tasks, propagated=True)


def utilization(instance: Instance) -> float:
    """Sum of processing times over the horizon length."""
    horizon = instance.horizon
    if horizon <= 0:
        raise DegenerateHorizon("last deadline equals first release")
    return instance.total_processing / horizon


def scale_instance(instance: Instance, factor: int) -> Instance:
    """Multiply all releases, deadlines and processing times by an integer."""
    if factor < 1:
        raise ValueError("factor must be a positive integer")
    tasks = tuple(
        Task(t.release * factor, t.deadline * factor, t.processing * factor)
        for t in instance.tasks
    )
    return replace(instance, tasks=tasks)


# ---------------------------------------------------------------------------
# CSV interfaces


def save_instance(instance: Instance, path: str | Path, comments: Iterable[str] = ()) -> None:
    """Write `release,deadline,processing` rows, one per task in order.

    Lines in `comments` are emitted as leading `#` lines so parameter and
    seed provenance travels with the file.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["release", "deadline", "processing"])
        for t in instance.tasks:
            writer.writerow([t.release, t.deadline, t.processing])


def load_instance(path: str | Path) -> Instance:
    """Read an instance CSV written by save_instance."""
    rows = _read_csv_rows(path)
    header = rows[0]
    if [h.strip() for h in header] != ["release", "deadline", "processing"]:
        raise ValueError(f"{path}: expected header release,deadline,processing")
    tasks = tuple(Task(int(row[0]), int(row[1]), int(row[2])) for row in rows[1:])
    return Instance(tasks=tasks, propagated=False)


def save_schedule(instance: Instance, schedule: Schedule, path: str | Path,
                  comments: Iterable[str] = ()) -> None:
    """Write `task,start` rows, tasks 1-indexed."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["task", "start"])
        for i, s in enumerate(schedule.starts, start=1):
            writer.writerow([i, _format_time(s)])


def load_schedule(path: str | Path) -> Schedule:
    rows = _read_csv_rows(path)
    if [h.strip() for h in rows[0]] != ["task", "start"]:
        raise ValueError(f"{path}: expected header task,start")
    starts = [float(row[1]) for row in rows[1:]]
    return Schedule(tuple(starts))


def _format_time(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(value)


def _read_csv_rows(path: str | Path) -> list[list[str]]:
    with Path(path).open(newline="") as fh:
        rows = [row for row in csv.reader(fh)
                if row and not row[0].lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty file")
    return rows
