"""Idle-energy functions: the abstract contract, a piecewise-linear concave
representation, the grid concavity check, and the function induced by a
finite machine-mode transition graph.

An idle energy function maps the length of an idle period to the minimum
energy the machine consumes over it. The scheduler requires concavity, so a
verifier is provided instead of trusting the construction.
"""

from __future__ import annotations

import csv
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import NegativeDuration, NonConcaveInduced

if TYPE_CHECKING:  # pragma: no cover
    from .baseline import TransitionGraph

CONCAVITY_TOL = 1e-9


@dataclass(frozen=True)
class ConcavityVerdict:
    ok: bool
    violation_at: float | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


class IdleEnergyFunction(ABC):
    """Contract: eval(0) = 0, non-decreasing, concave on the domain."""

    #: optional upper bound on queried idle lengths
    domain_max: float | None = None

    @abstractmethod
    def eval(self, delta: float) -> float:
        """Energy consumed over an idle period of length delta >= 0."""

    def eval_many(self, deltas: np.ndarray) -> np.ndarray:
        """Vectorised evaluation; the default falls back to a loop."""
        return np.array([self.eval(d) for d in np.asarray(deltas, dtype=float).ravel()]
                        ).reshape(np.shape(deltas))

    def __call__(self, delta: float) -> float:
        return self.eval(delta)


class PiecewiseLinear(IdleEnergyFunction):
    """Linear interpolation between breakpoints, linear extrapolation of the
    last segment beyond the final breakpoint.

    This base class does not require concavity; the scheduler only accepts
    the PiecewiseLinearConcave subclass (or functions passing the check).
    """

    def __init__(self, breakpoints: Sequence[tuple[float, float]]):
        pts = sorted((float(x), float(y)) for x, y in breakpoints)
        if len(pts) < 1:
            raise ValueError("at least one breakpoint required")
        xs = np.array([x for x, _ in pts])
        ys = np.array([y for _, y in pts])
        if np.any(np.diff(xs) <= 0):
            raise ValueError("breakpoint abscissae must be strictly increasing")
        if xs[0] != 0.0 or ys[0] != 0.0:
            raise ValueError("breakpoints must start at (0, 0)")
        self._x = xs
        self._y = ys
        if len(xs) > 1:
            self._slopes = np.diff(ys) / np.diff(xs)
        else:
            self._slopes = np.array([0.0])
        self.domain_max = None

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self._x.tolist(), self._y.tolist()))

    def eval(self, delta: float) -> float:
        if delta < 0:
            raise NegativeDuration(f"idle length must be >= 0, got {delta}")
        return float(self.eval_many(np.array([delta]))[0])

    def eval_many(self, deltas: np.ndarray) -> np.ndarray:
        d = np.asarray(deltas, dtype=float)
        if np.any(d < 0):
            raise NegativeDuration("idle length must be >= 0")
        # segment index: the breakpoint at or left of d (last segment extrapolates)
        idx = np.clip(np.searchsorted(self._x, d, side="right") - 1, 0,
                      max(len(self._x) - 2, 0))
        return self._y[idx] + self._slopes[idx] * (d - self._x[idx])

    @classmethod
    def linear(cls, slope: float) -> "PiecewiseLinear":
        return cls([(0.0, 0.0), (1.0, float(slope))])


class PiecewiseLinearConcave(PiecewiseLinear):
    """Piecewise-linear function with non-negative, non-increasing slopes."""

    def __init__(self, breakpoints: Sequence[tuple[float, float]]):
        super().__init__(breakpoints)
        slopes = self._slopes
        if np.any(slopes < -CONCAVITY_TOL):
            raise ValueError("segment slopes must be non-negative")
        if np.any(np.diff(slopes) > CONCAVITY_TOL):
            raise ValueError("segment slopes must be non-increasing (concavity)")

    @classmethod
    def identity(cls) -> "PiecewiseLinearConcave":
        return cls([(0.0, 0.0), (1.0, 1.0)])

    @classmethod
    def linear(cls, slope: float) -> "PiecewiseLinearConcave":
        return cls([(0.0, 0.0), (1.0, float(slope))])


def check_concavity(
    f: IdleEnergyFunction,
    grid_step: float,
    delta_max: float,
    tol: float = CONCAVITY_TOL,
) -> ConcavityVerdict:
    """Grid check of monotonicity (first differences) and concavity (second
    differences) on [0, delta_max]."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    grid = np.arange(0.0, delta_max + grid_step / 2, grid_step)
    values = f.eval_many(grid)
    first = np.diff(values)
    bad = np.nonzero(first < -tol)[0]
    if bad.size:
        return ConcavityVerdict(False, float(grid[bad[0] + 1]), "not non-decreasing")
    second = values[:-2] + values[2:] - 2.0 * values[1:-1]
    bad = np.nonzero(second > tol)[0]
    if bad.size:
        return ConcavityVerdict(False, float(grid[bad[0] + 1]), "convex kink")
    return ConcavityVerdict(True)


def from_transition_graph(
    g: "TransitionGraph", require_concave: bool = True
) -> PiecewiseLinear:
    """Piecewise-linear pointwise minimum over the machine modes applicable
    at each gap length.

    Staying in the processing mode prices a gap at P_on * delta; a standby
    mode m is feasible once delta >= t_down(m) + t_up(m) and then prices it
    at E_down + E_up + P_m * (delta - t_down - t_up). Feasibility is kept
    exact: just below a mode's threshold the mode is unavailable, which can
    make the induced function drop discontinuously at the threshold. Such a
    function fails the concavity check; with require_concave it raises
    NonConcaveInduced (the graph is still usable by the baseline DP), else
    the non-concave piecewise-linear minimum is returned.
    """
    p_on = g.processing_power
    # candidate kinks: mode feasibility thresholds and pairwise line crossings
    lines = [(0.0, 0.0, p_on)]  # (threshold, value at threshold, slope)
    for mode in g.standby_modes():
        tau = mode.t_down + mode.t_up
        lines.append((tau, mode.e_down + mode.e_up, mode.power))
    xs = {0.0}
    for tau, val, slope in lines:
        xs.add(tau)
        if tau > 0:
            # represent the drop at the threshold with a near-duplicate point
            xs.add(tau - 1e-9 * max(1.0, tau))
    for a in range(len(lines)):
        for b in range(a + 1, len(lines)):
            t1, v1, s1 = lines[a]
            t2, v2, s2 = lines[b]
            if s1 == s2:
                continue
            # intersection of the two cost lines, valid past both thresholds
            x = (v2 - s2 * t2 - v1 + s1 * t1) / (s1 - s2)
            if x > max(t1, t2):
                xs.add(x)
    # anchor past the last kink so extrapolation uses the asymptotic slope
    xs.add(max(xs) + max(1.0, max(xs)))
    grid = np.array(sorted(xs))
    values = g.gap_cost_many(grid)
    pts = [(0.0, 0.0)]
    for x, y in zip(grid[1:], values[1:]):
        pts.append((float(x), float(y)))
    induced = PiecewiseLinear(pts)
    verdict = check_concavity(induced, grid_step=max(grid[-1], 1.0) / 2048,
                              delta_max=float(grid[-1]) * 1.5 + 1.0)
    if not verdict and require_concave:
        raise NonConcaveInduced(
            f"induced gap cost is not concave ({verdict.reason} at "
            f"delta={verdict.violation_at})"
        )
    if verdict:
        return PiecewiseLinearConcave(pts)
    return induced


# ---------------------------------------------------------------------------
# CSV interface


def save_function(f: PiecewiseLinear, path: str | Path,
                  comments: Iterable[str] = ()) -> None:
    """Write breakpoints as `delta,energy` rows."""
    with Path(path).open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["delta", "energy"])
        for x, y in f.breakpoints:
            writer.writerow([repr(x), repr(y)])


def load_function(path: str | Path) -> PiecewiseLinearConcave:
    with Path(path).open(newline="") as fh:
        rows = [row for row in csv.reader(fh)
                if row and not row[0].lstrip().startswith("#")]
    if not rows or [h.strip() for h in rows[0]] != ["delta", "energy"]:
        raise ValueError(f"{path}: expected header delta,energy")
    pts = [(float(row[0]), float(row[1])) for row in rows[1:]]
    return PiecewiseLinearConcave(pts)
