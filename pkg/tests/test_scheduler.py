import numpy as np
import pytest

from idlesched import (
    Instance,
    PiecewiseLinearConcave,
    Schedule,
    Task,
    brute_force_solve,
    build_energy_graph,
    edge_feasible,
    extract_schedule,
    idle_gap,
    idle_gaps,
    min_switches_solve,
    normalize_to_block_form,
    propagate_windows,
    shortest_path,
    solve,
    total_idle_energy,
    validate_schedule,
)
from idlesched.errors import (
    NoPath,
    NonConcaveFunction,
    NotATaskVertex,
    TooLarge,
)
from idlesched.energy_functions import PiecewiseLinear
from idlesched.scheduler import (
    SINK,
    SOURCE,
    SupportVertex,
    deadline_vertex,
    fixed_start,
    release_vertex,
)

from conftest import random_small_instance, random_concave_pl, random_valid_schedule


def make(rows):
    return propagate_windows(Instance(tuple(Task(*row) for row in rows)))


EXAMPLE = make([(0, 20, 10), (15, 40, 15), (45, 70, 5), (80, 100, 10)])
IDENTITY = PiecewiseLinearConcave.identity()


def test_vertex_fixed_starts():
    assert fixed_start(EXAMPLE, release_vertex(1)) == 0
    assert fixed_start(EXAMPLE, deadline_vertex(1)) == 10
    assert fixed_start(EXAMPLE, release_vertex(4)) == 80
    assert fixed_start(EXAMPLE, deadline_vertex(4)) == 90
    with pytest.raises(NotATaskVertex):
        fixed_start(EXAMPLE, SOURCE)


def test_idle_gap():
    # deadline(1) start 10, release(3) start 45: task 2 (p=15) in between
    assert idle_gap(deadline_vertex(1), release_vertex(3), EXAMPLE) == 10
    assert idle_gap(release_vertex(1), deadline_vertex(2), EXAMPLE) == 15


def test_edge_feasibility_and_missing_edge():
    assert edge_feasible(deadline_vertex(1), release_vertex(3), EXAMPLE) == 2
    # release(3) starts at 45; right-packing tasks 1-2 before it would put
    # task 1 at start 20 past its propagated deadline window
    assert edge_feasible(SOURCE, release_vertex(3), EXAMPLE) is None
    assert edge_feasible(SOURCE, release_vertex(1), EXAMPLE) == 0
    assert edge_feasible(release_vertex(4), SINK, EXAMPLE) == 0


def test_graph_edges_match_direct_enumeration():
    rng = np.random.default_rng(42)
    for _ in range(40):
        instance = random_small_instance(rng)
        graph = build_energy_graph(instance, IDENTITY)
        n = instance.n
        verts = [SOURCE, SINK]
        for t in range(1, n + 1):
            verts += [release_vertex(t), deadline_vertex(t)]
        for v1 in verts:
            for v2 in verts:
                want = None
                if v1 != v2:
                    try:
                        want = edge_feasible(v1, v2, instance)
                    except (ValueError, NotATaskVertex):
                        want = None
                have = graph.has_edge(v1, v2)
                assert have == (want is not None), (v1, v2, instance)


def test_worked_example_energy_and_schedule():
    schedule, energy = solve(EXAMPLE, IDENTITY)
    assert energy == 40.0
    assert schedule.starts == (10.0, 20.0, 45.0, 80.0)
    assert idle_gaps(EXAMPLE, schedule) == [0.0, 10.0, 30.0]


def test_rejects_non_concave_function():
    convex = PiecewiseLinear([(0, 0), (1, 1), (2, 3)])
    with pytest.raises(NonConcaveFunction):
        solve(EXAMPLE, convex)


def test_single_task():
    instance = make([(5, 20, 10)])
    schedule, energy = solve(instance, IDENTITY)
    assert energy == 0.0
    assert validate_schedule(instance, schedule)


def test_no_idle_needed():
    instance = make([(0, 10, 10), (10, 20, 10)])
    schedule, energy = solve(instance, IDENTITY)
    assert energy == 0.0
    assert schedule.starts == (0.0, 10.0)


def test_solution_always_valid_and_matches_objective():
    rng = np.random.default_rng(7)
    for _ in range(60):
        instance = random_small_instance(rng, n_max=8, horizon_max=400)
        f = random_concave_pl(rng)
        schedule, energy = solve(instance, f)
        assert validate_schedule(instance, schedule), instance
        assert total_idle_energy(instance, schedule, f) == pytest.approx(energy)


def test_matches_brute_force_identity():
    rng = np.random.default_rng(50)
    for _ in range(60):
        instance = random_small_instance(rng, n_max=5, horizon_max=80)
        _, energy = solve(instance, IDENTITY)
        _, want = brute_force_solve(instance, IDENTITY)
        assert energy == want, instance


def test_brute_force_guards():
    rng = np.random.default_rng(1)
    big = random_small_instance(rng, n_max=6)
    with pytest.raises(TooLarge):
        brute_force_solve(big, IDENTITY, max_n=2)


def test_min_switches_worked_example():
    schedule, switches = min_switches_solve(EXAMPLE)
    assert switches == 2
    assert validate_schedule(EXAMPLE, schedule)
    gaps = [g for g in idle_gaps(EXAMPLE, schedule) if g > 0]
    assert len(gaps) == 2


def test_min_switches_zero_when_packable():
    instance = make([(0, 30, 10), (0, 30, 10), (0, 30, 10)])
    _, switches = min_switches_solve(instance)
    assert switches == 0


def test_extract_schedule_with_and_without_graph():
    graph = build_energy_graph(EXAMPLE, IDENTITY)
    path, _ = shortest_path(graph)
    assert extract_schedule(EXAMPLE, path).starts == \
        extract_schedule(EXAMPLE, path, graph).starts


def test_graph_dump_mentions_all_edges():
    graph = build_energy_graph(EXAMPLE, IDENTITY)
    dump = graph.dump()
    assert "source:- -> release:1 cost=0" in dump
    assert "deadline:1 -> release:3 cost=10 split=2" in dump
    assert "source:- -> release:3" not in dump


def test_normalize_reaches_block_form():
    rng = np.random.default_rng(9)
    for _ in range(50):
        instance = random_small_instance(rng, n_max=7, horizon_max=300)
        schedule = random_valid_schedule(rng, instance)
        f = random_concave_pl(rng)
        before = total_idle_energy(instance, schedule, f)
        out = normalize_to_block_form(instance, schedule, f)
        assert validate_schedule(instance, out)
        after = total_idle_energy(instance, out, f)
        assert after <= before + 1e-9
        _assert_block_form(instance, out)


def _assert_block_form(instance, schedule):
    starts = schedule.starts
    p = instance.processings
    blocks = []
    current = [0]
    for i in range(1, instance.n):
        if starts[i] - (starts[i - 1] + p[i - 1]) <= 1e-9:
            current.append(i)
        else:
            blocks.append(current)
            current = [i]
    blocks.append(current)
    for block in blocks:
        has_support = any(
            abs(starts[i] - instance.tasks[i].release) <= 1e-9
            or abs(starts[i] + p[i] - instance.tasks[i].deadline) <= 1e-9
            for i in block
        )
        assert has_support, (instance, schedule, block)


def test_vertex_ordering_and_str():
    assert str(release_vertex(3)) == "release:3"
    assert str(SOURCE) == "source:-"
    assert release_vertex(2) != deadline_vertex(2)
    assert SupportVertex("release", 2) == release_vertex(2)
