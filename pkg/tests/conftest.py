import numpy as np
import pytest

from idlesched import furnace as fn
from idlesched import instances as inst

# Collected by tests/test_acceptance.py, printed once at session end.
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {status} - {detail}")


@pytest.fixture(scope="session")
def case_study() -> fn.BilinearFurnaceModel:
    return fn.BilinearFurnaceModel.case_study()


def random_small_instance(rng: np.random.Generator, n_max: int = 6,
                          horizon_max: int = 200) -> inst.Instance:
    """Random feasible instance with small n and a bounded horizon."""
    n = int(rng.integers(1, n_max + 1))
    while True:
        p = rng.integers(1, 11, size=n)
        r = np.zeros(n, dtype=int)
        for i in range(1, n):
            r[i] = r[i - 1] + p[i - 1] + int(rng.integers(0, 12))
        d = r + p + rng.integers(0, 15, size=n)
        for i in range(n - 2, -1, -1):
            d[i] = min(d[i], d[i + 1] - p[i + 1])
        tasks = tuple(inst.Task(int(r[i]), int(d[i]), int(p[i]))
                      for i in range(n))
        instance = inst.Instance(tasks)
        if instance.horizon <= horizon_max:
            return inst.propagate_windows(instance)


def random_valid_schedule(rng: np.random.Generator,
                          instance: inst.Instance) -> inst.Schedule:
    """Uniform sequential start-time draw; always valid after propagation."""
    starts = []
    prev_end = -np.inf
    for t in instance.tasks:
        lo = max(float(t.release), prev_end)
        hi = float(t.deadline - t.processing)
        s = lo if hi <= lo else float(rng.uniform(lo, hi))
        starts.append(s)
        prev_end = s + t.processing
    return inst.Schedule(tuple(starts))


def random_concave_pl(rng: np.random.Generator, segments: int = 4):
    """Random increasing piecewise-linear concave function through (0, 0).

    Breakpoints are integers and slopes dyadic (multiples of 1/8), so values
    at integer arguments and their short sums are exact in floating point;
    the exact-equality oracle comparison stays meaningful.
    """
    from idlesched import energy_functions as ef

    xs = np.cumsum(rng.integers(1, 51, size=segments))
    slopes = np.sort(rng.integers(1, 81, size=segments))[::-1] / 8.0
    pts = [(0.0, 0.0)]
    y = 0.0
    x_prev = 0.0
    for x, s in zip(xs, slopes):
        y += s * (x - x_prev)
        pts.append((float(x), float(y)))
        x_prev = float(x)
    return ef.PiecewiseLinearConcave(pts)


def dense_instance(n: int, window: int = 5, proc: int = 3,
                   scale: int = 1) -> inst.Instance:
    """Back-to-back releases with a constant-slack deadline chain; every
    candidate edge of the energy graph triggers a full feasibility scan."""
    tasks = []
    r = 0
    for _ in range(n):
        tasks.append(inst.Task(r * scale, (r + proc + window) * scale,
                               proc * scale))
        r += proc
    return inst.propagate_windows(inst.Instance(tuple(tasks)))
