import random

import pytest

from skipgrid.evaluation import (EvalRecord, LearningCurve, UnreachableGoalError, evaluate_greedy,
                                 first_success, greedy_path, mean_decisions, normalized_auc,
                                 shortest_path, value_iteration)
from skipgrid.gridworld import Action, builtin_grid, load_grid
from skipgrid.qtables import BehaviourQ, SkipQ


def curve(rewards, decisions=None):
    decisions = decisions or [1] * len(rewards)
    return LearningCurve(list(range(1, len(rewards) + 1)),
                         [EvalRecord(r, d, d) for r, d in zip(rewards, decisions)])


@pytest.mark.parametrize("rewards, auc", [([1.0] * 5, 1.0), ([-1.0] * 3, 0.0), ([-1.0, 0.0, 1.0], 0.5)])
def test_normalized_auc(rewards, auc):
    assert normalized_auc(curve(rewards)) == auc


def test_normalized_auc_affine_invariance():
    rewards = [-1.0, 0.0, 1.0, 1.0, 0.5]
    base = normalized_auc(curve(rewards))
    scaled = curve([3 * r + 2 for r in rewards])
    assert normalized_auc(scaled, r_min=-1.0, r_max=5.0) == pytest.approx(base, abs=1e-15)


def test_metric_errors():
    empty = LearningCurve([], [])
    with pytest.raises(ValueError):
        normalized_auc(empty)
    with pytest.raises(ValueError):
        mean_decisions(empty)
    with pytest.raises(ValueError):
        normalized_auc(curve([0.0]), r_min=1.0, r_max=1.0)
    with pytest.raises(ValueError):
        LearningCurve([2, 1], [EvalRecord(0, 1, 1)] * 2)


@pytest.mark.parametrize("decisions, mean", [([5] * 7, 5.0), ([15, 5], 10.0)])
def test_mean_decisions(decisions, mean):
    assert mean_decisions(curve([0.0] * len(decisions), decisions)) == mean


def test_first_success():
    c = curve([-1.0, 0.0, 0.5, 1.0, 1.0])
    assert first_success(c) == 4
    assert first_success(c, 0.5) == 3
    assert first_success(curve([0.0])) is None


@pytest.mark.parametrize("name, dist", [("zigzag", 20), ("bridge", 13), ("cliff", 15)])
def test_shortest_path(name, dist):
    assert shortest_path(builtin_grid(name)) == dist


def test_shortest_path_unreachable():
    with pytest.raises(UnreachableGoalError):
        shortest_path(load_grid("S#G"))


def test_value_iteration_one_step():
    q = value_iteration(load_grid("SG"), 0.99)
    assert q.values[0][Action.RIGHT] == 1.0


def test_value_iteration_cliff():
    spec = builtin_grid("cliff")
    q = value_iteration(spec, 0.99, 1e-12)
    start = spec.index(spec.start)
    assert q.values[start][Action.UP] == pytest.approx(0.99 ** 14, abs=1e-10)
    assert max(q.values[start]) == pytest.approx(0.99 ** 14, abs=1e-10)


@pytest.mark.parametrize("name", ["cliff", "bridge", "zigzag", "open23"])
def test_value_iteration_greedy_is_shortest(name):
    spec = builtin_grid(name)
    q = value_iteration(spec, 0.99)
    assert len(greedy_path(spec, q)) - 1 == shortest_path(spec)


def test_evaluate_sg():
    spec = load_grid("SG")
    q = value_iteration(spec, 0.99)
    assert evaluate_greedy(spec, q, random.Random(0)) == (1.0, 1, 1)


def test_evaluate_cliff_oracle_vanilla():
    spec = builtin_grid("cliff")
    q = value_iteration(spec, 0.99)
    assert evaluate_greedy(spec, q, random.Random(0)) == (1.0, 15, 15)


def test_evaluate_cliff_skip_policy():
    # hand-built tables: up 3, right 7, right 2, down 3
    spec = builtin_grid("cliff")
    q, sq = BehaviourQ(spec.n_states), SkipQ(spec.n_states, 7)
    plan = {(0, 0): (Action.UP, 3), (3, 0): (Action.RIGHT, 7), (3, 7): (Action.RIGHT, 2),
            (3, 9): (Action.DOWN, 3)}
    for cell, (a, j) in plan.items():
        q.values[spec.index(cell)][a] = 1.0
        sq.values[spec.index(cell)][a][j - 1] = 1.0
    assert evaluate_greedy(spec, q, random.Random(0), skip_q=sq) == (1.0, 15, 4)


def test_evaluate_timeout_has_zero_reward():
    spec = load_grid("limit=5\nS..G")
    q = BehaviourQ(spec.n_states)
    for row in q.values:
        row[Action.LEFT] = 1.0
    assert evaluate_greedy(spec, q, random.Random(0)) == (0.0, 5, 5)
