import numpy as np
import pytest

from idlesched import (
    PiecewiseLinear,
    PiecewiseLinearConcave,
    check_concavity,
    from_transition_graph,
    derive_transition_graph,
    gap_cost,
    load_function,
    save_function,
)
from idlesched.errors import NegativeDuration, NonConcaveInduced
from idlesched.furnace import BilinearFurnaceModel

from conftest import random_concave_pl


def test_identity():
    f = PiecewiseLinearConcave.identity()
    assert f(0.0) == 0.0
    assert f(3.5) == 3.5
    assert f(1000.0) == 1000.0  # extrapolates the last segment


def test_interpolation_and_extrapolation():
    f = PiecewiseLinearConcave([(0, 0), (10, 20), (30, 30)])
    assert f(5.0) == 10.0
    assert f(20.0) == 25.0
    assert f(50.0) == 40.0


def test_eval_many_matches_eval():
    rng = np.random.default_rng(0)
    f = random_concave_pl(rng)
    xs = rng.uniform(0, 300, size=64)
    np.testing.assert_allclose(f.eval_many(xs), [f(x) for x in xs])


def test_rejects_negative_duration():
    f = PiecewiseLinearConcave.identity()
    with pytest.raises(NegativeDuration):
        f(-1.0)
    with pytest.raises(NegativeDuration):
        f.eval_many(np.array([1.0, -0.5]))


def test_breakpoint_validation():
    with pytest.raises(ValueError):
        PiecewiseLinear([(1, 0), (2, 1)])  # must start at (0, 0)
    with pytest.raises(ValueError):
        PiecewiseLinear([(0, 0), (0, 1)])  # strictly increasing abscissae
    with pytest.raises(ValueError):
        PiecewiseLinearConcave([(0, 0), (1, 1), (2, 3)])  # convex kink
    with pytest.raises(ValueError):
        PiecewiseLinearConcave([(0, 0), (1, -1)])  # decreasing


def test_check_concavity_flags_violations():
    convex = PiecewiseLinear([(0, 0), (1, 1), (2, 3)])
    verdict = check_concavity(convex, grid_step=0.25, delta_max=3.0)
    assert not verdict
    assert verdict.reason == "convex kink"
    decreasing = PiecewiseLinear([(0, 0), (1, 1), (2, 0.5)])
    verdict = check_concavity(decreasing, grid_step=0.25, delta_max=3.0)
    assert not verdict
    assert verdict.reason == "not non-decreasing"
    ok = check_concavity(PiecewiseLinearConcave.identity(), 0.5, 10.0)
    assert ok and ok.violation_at is None


def test_random_concave_pass_check():
    rng = np.random.default_rng(7)
    for _ in range(20):
        f = random_concave_pl(rng)
        assert check_concavity(f, grid_step=0.5, delta_max=250.0)


def test_induced_function_matches_gap_cost_pointwise():
    model = BilinearFurnaceModel.case_study()
    for temps in ([600.0], [700.0], [600.0, 700.0]):
        g = derive_transition_graph(model, temps)
        f = from_transition_graph(g, require_concave=False)
        grid = np.linspace(0.0, 3000.0, 6001)
        want = np.array([gap_cost(g, d) for d in grid])
        np.testing.assert_allclose(f.eval_many(grid), want, atol=1e-9)


def test_induced_function_not_concave_in_strict_mode():
    # the standby mode becomes available only past its transition threshold,
    # so the pointwise minimum drops there and cannot be concave
    model = BilinearFurnaceModel.case_study()
    g = derive_transition_graph(model, [600.0])
    with pytest.raises(NonConcaveInduced):
        from_transition_graph(g)


def test_function_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    f = random_concave_pl(rng)
    path = tmp_path / "f.csv"
    save_function(f, path, comments=["test"])
    again = load_function(path)
    assert again.breakpoints == f.breakpoints
