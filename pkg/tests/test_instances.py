import numpy as np
import pytest

from idlesched import (
    GeneratorConfig,
    Instance,
    Schedule,
    Task,
    generate_instance,
    idle_gaps,
    left_aligned_schedule,
    load_instance,
    load_schedule,
    propagate_windows,
    save_instance,
    save_schedule,
    total_idle_energy,
    utilization,
    validate_schedule,
)
from idlesched.errors import InfeasibleOrder, InvalidSchedule


def make(rows):
    return Instance(tuple(Task(*row) for row in rows))


EXAMPLE = make([(0, 20, 10), (15, 40, 15), (45, 70, 5), (80, 100, 10)])


def test_task_invariants():
    with pytest.raises(ValueError):
        Task(0, 5, 10)  # window shorter than processing
    with pytest.raises(ValueError):
        Task(0, 10, 0)
    with pytest.raises(ValueError):
        Task(-1, 10, 5)


def test_propagation_tightens_both_directions():
    instance = make([(0, 100, 10), (0, 100, 10), (0, 25, 5)])
    out = propagate_windows(instance)
    assert out.releases.tolist() == [0, 10, 20]
    assert out.deadlines.tolist() == [10, 20, 25]
    assert out.propagated


def test_propagation_idempotent():
    once = propagate_windows(EXAMPLE)
    twice = propagate_windows(once)
    assert once.releases.tolist() == twice.releases.tolist()
    assert once.deadlines.tolist() == twice.deadlines.tolist()


def test_propagation_detects_infeasible_order():
    with pytest.raises(InfeasibleOrder):
        propagate_windows(make([(0, 12, 10), (0, 15, 10)]))


def test_validate_schedule():
    instance = propagate_windows(EXAMPLE)
    assert validate_schedule(instance, Schedule((10, 20, 45, 80)))
    assert not validate_schedule(instance, Schedule((0, 9, 45, 80)))  # overlap
    assert not validate_schedule(instance, Schedule((10, 20, 44, 80)))  # early
    assert not validate_schedule(instance, Schedule((10, 26, 45, 80)))  # late


def test_left_aligned_always_valid_for_generated():
    for seed in range(50):
        cfg = GeneratorConfig(n=12, gamma=0.5, delta=1.5, seed=seed)
        instance = generate_instance(cfg)
        assert validate_schedule(instance, left_aligned_schedule(instance))


def test_generator_deterministic():
    cfg = GeneratorConfig(n=8, gamma=1.0, delta=1.0, seed=11)
    a = generate_instance(cfg)
    b = generate_instance(cfg)
    assert a == b


def test_idle_gaps_and_energy():
    instance = propagate_windows(EXAMPLE)
    schedule = Schedule((10, 20, 45, 80))
    assert idle_gaps(instance, schedule) == [0.0, 10.0, 30.0]
    assert total_idle_energy(instance, schedule, lambda d: d) == 40.0
    with pytest.raises(InvalidSchedule):
        total_idle_energy(instance, Schedule((0, 9, 45, 80)), lambda d: d)


def test_utilization():
    instance = propagate_windows(EXAMPLE)
    assert utilization(instance) == pytest.approx(40 / 100)


def test_instance_round_trip(tmp_path):
    path = tmp_path / "inst.csv"
    save_instance(EXAMPLE, path, comments=["round trip"])
    again = load_instance(path)
    assert again.tasks == EXAMPLE.tasks


def test_schedule_round_trip(tmp_path):
    instance = propagate_windows(EXAMPLE)
    schedule = Schedule((10, 20, 45, 80))
    path = tmp_path / "sched.csv"
    save_schedule(instance, schedule, path)
    assert load_schedule(path).starts == schedule.starts


def test_generated_instances_respect_bounds():
    cfg = GeneratorConfig(n=40, p_min=3, p_max=9, gamma=0.7, delta=0.9, seed=5)
    instance = generate_instance(cfg)
    p = instance.processings
    assert np.all((p >= 3) & (p <= 9))
    assert instance.releases[0] == 0
    assert np.all(np.diff(instance.releases) >= p[:-1])
    assert instance.propagated
