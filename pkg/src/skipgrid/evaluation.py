"""Greedy evaluation rollouts, learning-curve metrics and exact oracles."""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence

import numpy as np

from .gridworld import N_ACTIONS, GridEnv, GridSpec
from .qtables import BehaviourQ, SkipQ, select_action, select_skip


class UnreachableGoalError(ValueError):
    """No path from the start to any goal cell avoids the cliffs."""


class EvalRecord(NamedTuple):
    reward: float
    steps: float
    decisions: float


@dataclass
class LearningCurve:
    episodes: List[int]
    records: List[EvalRecord]

    def __post_init__(self) -> None:
        if len(self.episodes) != len(self.records):
            raise ValueError("episodes and records differ in length")
        if any(b <= a for a, b in zip(self.episodes, self.episodes[1:])):
            raise ValueError("episode indices must be strictly increasing")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def rewards(self) -> List[float]:
        return [r.reward for r in self.records]

    @property
    def decisions(self) -> List[float]:
        return [r.decisions for r in self.records]


def evaluate_greedy(spec: GridSpec, q: BehaviourQ, rng: random.Random,
                    skip_q: Optional[SkipQ] = None, env: Optional[GridEnv] = None) -> EvalRecord:
    """Roll out the epsilon=0 policy once.

    With ``skip_q`` every decision picks an action and a skip length and the
    skip runs to completion unless the episode ends; decisions then count
    ``(action, skip)`` queries rather than steps.  Ties are broken with ``rng``.
    """
    env = env if env is not None else GridEnv(spec)
    s = env.reset_index()
    total = 0.0
    decisions = 0
    while not env.done:
        a = select_action(q, s, 0.0, rng)
        j = select_skip(skip_q, s, a, 0.0, rng) if skip_q is not None else 1
        decisions += 1
        for _ in range(j):
            s, r, terminal, timeout = env.step_index(a)
            total += r
            if terminal or timeout:
                break
    return EvalRecord(total, env.steps, decisions)


def normalized_auc(curve, r_min: float = -1.0, r_max: float = 1.0) -> float:
    """Mean checkpoint reward rescaled from ``[r_min, r_max]`` to ``[0, 1]``."""
    rewards = curve.rewards if isinstance(curve, LearningCurve) else [
        getattr(r, "reward", r) for r in curve]
    if len(rewards) == 0:
        raise ValueError("empty learning curve")
    if not r_max > r_min:
        raise ValueError("r_max must exceed r_min")
    span = r_max - r_min
    return sum((r - r_min) / span for r in rewards) / len(rewards)


def mean_decisions(curve) -> float:
    decisions = curve.decisions if isinstance(curve, LearningCurve) else [
        getattr(r, "decisions", r) for r in curve]
    if len(decisions) == 0:
        raise ValueError("empty learning curve")
    return sum(decisions) / len(decisions)


def first_success(curve: LearningCurve, threshold: float = 1.0) -> Optional[int]:
    """Episode index of the first checkpoint whose reward reaches ``threshold``."""
    for ep, rec in zip(curve.episodes, curve.records):
        if rec.reward >= threshold:
            return ep
    return None


def shortest_path(spec: GridSpec) -> int:
    """BFS step count from start to the nearest goal, never entering a cliff."""
    start = spec.start
    dist = {start: 0}
    frontier = deque([start])
    while frontier:
        cell = frontier.popleft()
        for a in range(N_ACTIONS):
            nxt = spec.move(cell, a)
            if nxt in dist or nxt in spec.cliff_cells:
                continue
            if nxt in spec.goal_cells:
                return dist[cell] + 1
            dist[nxt] = dist[cell] + 1
            frontier.append(nxt)
    raise UnreachableGoalError(f"goal unreachable in grid {spec.name!r}")


def value_iteration(spec: GridSpec, gamma: float = 0.99, tolerance: float = 1e-12,
                    max_iter: int = 100_000) -> BehaviourQ:
    """Optimal ``Q*`` of the deterministic grid by synchronous Bellman backups."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("value iteration needs 0 < gamma < 1")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    tables = spec.tables()
    nxt = np.array(tables.next_state)                   # (S, A)
    reward = np.array(tables.reward)[nxt]               # reward on entering next state
    cont = ~np.array(tables.terminal)[nxt]              # bootstrap only if non-terminal
    q = np.zeros((spec.n_states, N_ACTIONS))
    # converged backup error e implies |Q - Q*| <= e * gamma / (1 - gamma)
    stop = tolerance * (1.0 - gamma) / gamma
    for _ in range(max_iter):
        v = q.max(axis=1)
        q_new = reward + gamma * v[nxt] * cont
        delta = np.abs(q_new - q).max()
        q = q_new
        if delta <= stop:
            break
    return BehaviourQ.from_array(q)


def greedy_path(spec: GridSpec, q: BehaviourQ) -> List[int]:
    """State indices visited by the deterministic first-maximiser policy."""
    env = GridEnv(spec)
    s = env.reset_index()
    path = [s]
    while not env.done:
        row = q.values[s]
        s, _, _, _ = env.step_index(row.index(max(row)))
        path.append(s)
    return path


def aggregate(values: Iterable[float]) -> dict:
    arr = np.asarray(list(values), dtype=float)
    return {"mean": float(arr.mean()), "std": float(arr.std())}
