"""Energy-graph scheduler: block-form normalization, graph construction,
DAG shortest path, schedule extraction, and test oracles.

Candidate supports (task at its release, or ending at its deadline) become
vertices; an edge between two supports exists when the tasks in between can
be packed against them, and it costs the idle energy of the gap. The
shortest source-to-sink path gives the energy-optimal schedule in O(n^3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np

from . import _kernels
from .energy_functions import (
    IdleEnergyFunction,
    PiecewiseLinearConcave,
    check_concavity,
)
from .errors import (
    InvalidSchedule,
    NoPath,
    NonConcaveFunction,
    NotATaskVertex,
    TooLarge,
)
from .instances import (
    TIME_TOL,
    Instance,
    Schedule,
    propagate_windows,
    total_idle_energy,
    validate_schedule,
)


@dataclass(frozen=True, order=True)
class SupportVertex:
    """Graph vertex: source, sink, or a task fixed at one end of its window.

    Task numbers are 1-based, matching the usual task numbering.
    """

    kind: str  # "source" | "sink" | "release" | "deadline"
    task: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind in ("source", "sink"):
            if self.task is not None:
                raise ValueError(f"{self.kind} vertex carries no task")
        elif self.kind in ("release", "deadline"):
            if self.task is None or self.task < 1:
                raise ValueError("task vertices need a 1-based task index")
        else:
            raise ValueError(f"unknown vertex kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}:{self.task if self.task is not None else '-'}"


SOURCE = SupportVertex("source")
SINK = SupportVertex("sink")


def release_vertex(task: int) -> SupportVertex:
    return SupportVertex("release", task)


def deadline_vertex(task: int) -> SupportVertex:
    return SupportVertex("deadline", task)


def fixed_start(instance: Instance, v: SupportVertex) -> float:
    """Start time the vertex pins its task to: r_i, or deadline minus
    processing."""
    if v.task is None:
        raise NotATaskVertex(f"{v} has no start time")
    t = instance.tasks[v.task - 1]
    return float(t.release if v.kind == "release" else t.deadline - t.processing)


def idle_gap(v1: SupportVertex, v2: SupportVertex, instance: Instance) -> float:
    """Idle-period length between the blocks supported by v1 and v2; may be
    negative, in which case the pair cannot be consecutive supports."""
    if v1.task is None or v2.task is None:
        raise NotATaskVertex("idle_gap is defined between task vertices")
    if v1.task >= v2.task:
        raise ValueError("v1 must belong to an earlier task than v2")
    p = instance.processings
    between = int(p[v1.task: v2.task - 1].sum())
    return (
        fixed_start(instance, v2)
        - (fixed_start(instance, v1) + int(p[v1.task - 1]))
        - between
    )


def edge_feasible(
    v1: SupportVertex, v2: SupportVertex, instance: Instance
) -> Optional[int]:
    """Linear-time feasibility check for one candidate edge.

    For support-to-support edges returns the recorded split k (1-based, the
    largest feasible left-packed prefix) or None. Source/sink edges return 0
    or None (no split applies).
    """
    r, d, p = instance.releases, instance.deadlines, instance.processings
    n = instance.n

    def window_ok(task0: int, start: float) -> bool:
        return (r[task0] - TIME_TOL <= start
                <= d[task0] - p[task0] + TIME_TOL)

    if v1.kind == "source":
        if v2.task is None:
            raise NotATaskVertex("source connects to task vertices only")
        st = fixed_start(instance, v2)
        j = v2.task - 1
        pos = st
        for x in range(j - 1, -1, -1):
            pos -= p[x]
            if not window_ok(x, pos):
                return None
        return 0
    if v2.kind == "sink":
        if v1.task is None:
            raise NotATaskVertex("sink connects from task vertices only")
        st = fixed_start(instance, v1)
        i = v1.task - 1
        pos = st
        for x in range(i + 1, n):
            pos += p[x - 1]
            if not window_ok(x, pos):
                return None
        return 0

    gap = idle_gap(v1, v2, instance)
    if gap < 0:
        return None
    i, j = v1.task - 1, v2.task - 1
    reach_a = i
    pos = fixed_start(instance, v1)
    for x in range(i + 1, j):
        pos += p[x - 1]
        if not window_ok(x, pos):
            break
        reach_a = x
    reach_b = j
    pos = fixed_start(instance, v2)
    for x in range(j - 1, i, -1):
        pos -= p[x]
        if not window_ok(x, pos):
            break
        reach_b = x
    if reach_b > reach_a + 1:
        return None
    return min(reach_a, j - 1) + 1  # back to 1-based task numbering


@dataclass(frozen=True)
class EnergyGraph:
    """Dense DAG over source, task vertices (by task, release before
    deadline) and sink. Missing edges carry an infinite cost."""

    instance: Instance
    cost: np.ndarray       # (V, V) with np.inf where no edge exists
    delta: np.ndarray      # idle gap per support-to-support edge, else -1
    split: np.ndarray      # recorded split index (0-based task), else -1
    feasible: np.ndarray   # boolean adjacency

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def num_vertices(self) -> int:
        return 2 * self.n + 2

    def vertex(self, idx: int) -> SupportVertex:
        if idx == 0:
            return SOURCE
        if idx == self.num_vertices - 1:
            return SINK
        task = (idx - 1) // 2 + 1
        return release_vertex(task) if (idx - 1) % 2 == 0 else deadline_vertex(task)

    def vertex_index(self, v: SupportVertex) -> int:
        if v.kind == "source":
            return 0
        if v.kind == "sink":
            return self.num_vertices - 1
        assert v.task is not None
        return 1 + 2 * (v.task - 1) + (0 if v.kind == "release" else 1)

    def has_edge(self, v1: SupportVertex, v2: SupportVertex) -> bool:
        return bool(self.feasible[self.vertex_index(v1), self.vertex_index(v2)])

    def edges(self) -> Iterator[tuple[SupportVertex, SupportVertex, float, int]]:
        """Yield (from, to, cost, split) for every edge, in index order."""
        rows, cols = np.nonzero(self.feasible)
        for a, b in zip(rows.tolist(), cols.tolist()):
            yield (
                self.vertex(a),
                self.vertex(b),
                float(self.cost[a, b]),
                int(self.split[a, b]),
            )

    def dump(self) -> str:
        """Edge-list text format for debugging and golden tests."""
        lines = []
        for v1, v2, cost, split in self.edges():
            split_txt = split + 1 if split >= 0 else "-"
            lines.append(f"{v1} -> {v2} cost={cost:g} split={split_txt}")
        return "\n".join(lines)


@dataclass(frozen=True)
class GraphPath:
    """Source-to-sink path: the supports of the blocks, plus total cost."""

    vertices: tuple[SupportVertex, ...]
    cost: float

    @property
    def supports(self) -> tuple[SupportVertex, ...]:
        return self.vertices[1:-1]


def _require_concave(f: IdleEnergyFunction, horizon: float) -> None:
    if isinstance(f, PiecewiseLinearConcave):
        return  # concavity enforced at construction
    verdict = check_concavity(f, grid_step=max(horizon, 1.0) / 4096,
                              delta_max=max(horizon, 1.0))
    if not verdict:
        raise NonConcaveFunction(
            f"energy function fails the concavity check: {verdict.reason} "
            f"at delta={verdict.violation_at}"
        )


def _build_graph(
    instance: Instance, edge_cost: Callable[[np.ndarray], np.ndarray]
) -> EnergyGraph:
    if not instance.propagated:
        raise ValueError("instance must be propagated (see propagate_windows)")
    n = instance.n
    r = instance.releases.astype(np.float64)
    d = instance.deadlines.astype(np.float64)
    p = instance.processings.astype(np.float64)
    ps = np.concatenate(([0.0], np.cumsum(p)))
    vtask = np.repeat(np.arange(n, dtype=np.int64), 2)
    vstart = np.empty(2 * n, dtype=np.float64)
    vstart[0::2] = r
    vstart[1::2] = d - p
    delta_m, split_m, feas_m, source_ok, sink_ok = _kernels.edge_scan(
        r, d, p, ps, vtask, vstart
    )
    num_v = 2 * n + 2
    cost = np.full((num_v, num_v), np.inf)
    delta = np.full((num_v, num_v), -1.0)
    split = np.full((num_v, num_v), -1, dtype=np.int64)
    feasible = np.zeros((num_v, num_v), dtype=bool)
    feasible[1:-1, 1:-1] = feas_m
    delta[1:-1, 1:-1] = delta_m
    split[1:-1, 1:-1] = split_m
    feasible[0, 1:-1] = source_ok
    feasible[1:-1, -1] = sink_ok
    cost[0, 1:-1] = np.where(source_ok, 0.0, np.inf)
    cost[1:-1, -1] = np.where(sink_ok, 0.0, np.inf)
    inner = cost[1:-1, 1:-1]
    if feas_m.any():
        inner[feas_m] = edge_cost(delta_m[feas_m])
    return EnergyGraph(instance=instance, cost=cost, delta=delta, split=split,
                       feasible=feasible)


def build_energy_graph(instance: Instance, f: IdleEnergyFunction) -> EnergyGraph:
    """Construct the energy graph; support-to-support edges cost f(gap)."""
    _require_concave(f, float(instance.horizon))
    return _build_graph(instance, f.eval_many)


def shortest_path(graph: EnergyGraph) -> tuple[GraphPath, float]:
    """Single-pass DP in topological order (vertex index order).

    Among equal-cost predecessors the lexicographically smallest
    (task index, release before deadline) wins, so the output is
    deterministic.
    """
    num_v = graph.num_vertices
    dist = np.full(num_v, np.inf)
    dist[0] = 0.0
    pred = np.full(num_v, -1, dtype=np.int64)
    cost = graph.cost
    for v in range(1, num_v):
        cand = dist + cost[:, v]
        u = int(np.argmin(cand))
        if np.isfinite(cand[u]):
            dist[v] = cand[u]
            pred[v] = u
    if not np.isfinite(dist[-1]):
        raise NoPath("no feasible block-form schedule")
    idx = [num_v - 1]
    while idx[-1] != 0:
        idx.append(int(pred[idx[-1]]))
    idx.reverse()
    path = GraphPath(
        vertices=tuple(graph.vertex(i) for i in idx), cost=float(dist[-1])
    )
    return path, path.cost


def extract_schedule(
    instance: Instance, path: GraphPath, graph: Optional[EnergyGraph] = None
) -> Schedule:
    """Materialise start times from the supports on the path.

    Tasks before the first support pack right-aligned against it; tasks
    after the last pack left-aligned; between consecutive supports the
    recorded split sends a prefix left and a suffix right. Passing the
    graph the path came from reuses its stored splits.
    """
    n = instance.n
    p = instance.processings
    starts = np.full(n, np.nan)
    supports = [v for v in path.vertices if v.task is not None]
    if not supports:
        raise ValueError("path contains no task vertices")
    for v in supports:
        starts[v.task - 1] = fixed_start(instance, v)
    first, last = supports[0], supports[-1]
    pos = fixed_start(instance, first)
    for x in range(first.task - 2, -1, -1):
        pos -= p[x]
        starts[x] = pos
    pos = fixed_start(instance, last)
    for x in range(last.task, n):
        pos += p[x - 1]
        starts[x] = pos
    for v1, v2 in zip(supports, supports[1:]):
        if graph is not None:
            k = int(graph.split[graph.vertex_index(v1), graph.vertex_index(v2)]) + 1
            if k <= 0:
                raise InvalidSchedule(f"path edge {v1} -> {v2} is not feasible")
        else:
            k = edge_feasible(v1, v2, instance)
            if k is None:
                raise InvalidSchedule(f"path edge {v1} -> {v2} is not feasible")
        pos = fixed_start(instance, v1)
        for x in range(v1.task, k):
            pos += p[x - 1]
            starts[x] = pos
        pos = fixed_start(instance, v2)
        for x in range(v2.task - 2, k - 1, -1):
            pos -= p[x]
            starts[x] = pos
    return Schedule(tuple(starts.tolist()))


def solve(
    instance: Instance, f: IdleEnergyFunction
) -> tuple[Schedule, float]:
    """Propagate, build the energy graph, take the shortest path, extract.

    The returned energy is the global optimum of the idle-energy objective
    over all feasible schedules.
    """
    if not instance.propagated:
        instance = propagate_windows(instance)
    graph = build_energy_graph(instance, f)
    path, cost = shortest_path(graph)
    return extract_schedule(instance, path, graph), cost


def min_switches_solve(instance: Instance) -> tuple[Schedule, int]:
    """Minimise the number of idle periods longer than zero.

    Same graph, but a support-to-support edge costs 1 when its gap is
    positive (a zero gap merges the blocks and costs nothing).
    """
    if not instance.propagated:
        instance = propagate_windows(instance)
    graph = _build_graph(instance, lambda gaps: (gaps > 0).astype(float))
    path, cost = shortest_path(graph)
    return extract_schedule(instance, path, graph), int(round(cost))


def normalize_to_block_form(
    instance: Instance,
    schedule: Schedule,
    f: Optional[Callable[[float], float]] = None,
) -> Schedule:
    """Shift support-less blocks until every block has one.

    Each shift moves a block toward its shorter neighbouring idle period
    (right on ties; the leftmost/rightmost block moves right/left since the
    outside idle periods count as infinite), which never increases the idle
    energy for a concave f. Terminates within n shifts.
    """
    if not validate_schedule(instance, schedule):
        raise InvalidSchedule("input schedule fails feasibility checks")
    del f  # direction rule depends only on gap lengths (concavity lemma)
    r, d, p = instance.releases, instance.deadlines, instance.processings
    s = np.array(schedule.starts, dtype=float)
    n = instance.n
    for _ in range(n + 1):
        blocks = _find_blocks(s, p)
        free = None
        for lo, hi in blocks:
            if not _block_has_support(s, r, d, p, lo, hi):
                free = (lo, hi)
                break
        if free is None:
            break
        lo, hi = free
        b_idx = blocks.index(free)
        left_gap = (
            s[lo] - (s[blocks[b_idx - 1][1]] + p[blocks[b_idx - 1][1]])
            if b_idx > 0 else math.inf
        )
        right_gap = (
            s[blocks[b_idx + 1][0]] - (s[hi] + p[hi])
            if b_idx + 1 < len(blocks) else math.inf
        )
        tasks = slice(lo, hi + 1)
        if right_gap <= left_gap:
            shift = min(right_gap, float(np.min(d[tasks] - p[tasks] - s[tasks])))
            s[tasks] += shift
        else:
            shift = min(left_gap, float(np.min(s[tasks] - r[tasks])))
            s[tasks] -= shift
    return Schedule(tuple(s.tolist()))


def _find_blocks(s: np.ndarray, p: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of back-to-back tasks, as (first, last) index pairs."""
    blocks = []
    lo = 0
    for i in range(len(s) - 1):
        if abs(s[i] + p[i] - s[i + 1]) > TIME_TOL:
            blocks.append((lo, i))
            lo = i + 1
    blocks.append((lo, len(s) - 1))
    return blocks


def _block_has_support(s, r, d, p, lo: int, hi: int) -> bool:
    for a in range(lo, hi + 1):
        if abs(s[a] - r[a]) <= TIME_TOL or abs(s[a] + p[a] - d[a]) <= TIME_TOL:
            return True
    return False


def brute_force_solve(
    instance: Instance,
    f: Callable[[float], float],
    max_n: int = 8,
    max_horizon: int = 200,
) -> tuple[Schedule, float]:
    """Exact optimum by DP over integer start times; test oracle only.

    Independent of the energy graph: enumerates completion times on the
    propagated windows directly.
    """
    if not instance.propagated:
        instance = propagate_windows(instance)
    if instance.n > max_n or instance.horizon > max_horizon:
        raise TooLarge(
            f"n={instance.n}, horizon={instance.horizon} exceeds the "
            f"brute-force guard ({max_n}, {max_horizon})"
        )
    r, d, p = instance.releases, instance.deadlines, instance.processings
    # states: completion time of the given task -> (cost, own start, prev completion)
    states: dict[int, tuple[float, int, Optional[int]]] = {}
    for s0 in range(int(r[0]), int(d[0] - p[0]) + 1):
        states[s0 + int(p[0])] = (0.0, s0, None)
    layers = [states]
    for i in range(1, instance.n):
        nxt: dict[int, tuple[float, int, Optional[int]]] = {}
        for c_prev, (w, _, _) in layers[-1].items():
            for s in range(max(int(r[i]), c_prev), int(d[i] - p[i]) + 1):
                cost = w + f(float(s - c_prev))
                c_new = s + int(p[i])
                if c_new not in nxt or cost < nxt[c_new][0]:
                    nxt[c_new] = (cost, s, c_prev)
        layers.append(nxt)
    final = layers[-1]
    if not final:
        raise NoPath("no feasible integer schedule")
    c_best = min(final, key=lambda c: (final[c][0], c))
    best_cost = final[c_best][0]
    starts = []
    c: Optional[int] = c_best
    for i in range(instance.n - 1, -1, -1):
        assert c is not None
        _, s, c_prev = layers[i][c]
        starts.append(float(s))
        c = c_prev
    starts.reverse()
    return Schedule(tuple(starts)), float(best_cost)
