"""Tabular behaviour / skip value stores, epsilon-greedy selection and TD updates.

States are flat indices (``GridSpec.index``).  Tables are plain nested lists;
the learners touch single entries millions of times and list indexing is far
cheaper than numpy scalar access.  ``to_array``/``from_array`` convert.

RNG draw order per decision (``random.Random``):

1. action epsilon test (skipped when epsilon is 0)
2. random action, or tie-break among maximisers (only if several)
3. skip epsilon test, 4. random skip or tie-break -- both skipped when J == 1
"""
from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass
from typing import List

import numpy as np

from .gridworld import N_ACTIONS
from .skip import SkipConnection


@dataclass(frozen=True)
class AgentConfig:
    alpha: float = 0.1
    gamma: float = 0.99
    max_skip: int = 7
    q_init: float = 0.0
    # temporally-extended epsilon-greedy: duration distribution and its cap
    te_duration: str = "zeta"
    te_cap: int = 100
    te_exponent: float = 2.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.max_skip < 1:
            raise ValueError(f"max_skip must be >= 1, got {self.max_skip}")
        if not math.isfinite(self.q_init):
            raise ValueError("q_init must be finite")
        if self.te_duration not in ("zeta", "uniform"):
            raise ValueError(f"unknown te_duration {self.te_duration!r}")
        if self.te_cap < 1:
            raise ValueError("te_cap must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


class BehaviourQ:
    """``Q(s, a)`` as ``values[s][a]``."""

    def __init__(self, n_states: int, init_value: float = 0.0) -> None:
        self.n_states = n_states
        self.init_value = init_value
        self.values: List[List[float]] = [[init_value] * N_ACTIONS for _ in range(n_states)]

    def to_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float).reshape(self.n_states, N_ACTIONS)

    @classmethod
    def from_array(cls, arr, init_value: float = 0.0) -> "BehaviourQ":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != N_ACTIONS:
            raise ValueError(f"expected shape (n_states, {N_ACTIONS}), got {arr.shape}")
        q = cls(arr.shape[0], init_value)
        q.values = arr.tolist()
        return q

    def max_value(self, s: int) -> float:
        return max(self.values[s])

    def __eq__(self, other) -> bool:
        return isinstance(other, BehaviourQ) and self.values == other.values

    def __repr__(self) -> str:
        return f"BehaviourQ(n_states={self.n_states})"


class SkipQ:
    """``Q(s, j | a)`` as ``values[s][a][j - 1]`` for ``j`` in ``1..max_skip``."""

    def __init__(self, n_states: int, max_skip: int, init_value: float = 0.0) -> None:
        if max_skip < 1:
            raise ValueError("max_skip must be >= 1")
        self.n_states = n_states
        self.max_skip = max_skip
        self.init_value = init_value
        self.values: List[List[List[float]]] = [
            [[init_value] * max_skip for _ in range(N_ACTIONS)] for _ in range(n_states)
        ]

    def to_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float).reshape(self.n_states, N_ACTIONS, self.max_skip)

    @classmethod
    def from_array(cls, arr, init_value: float = 0.0) -> "SkipQ":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 3 or arr.shape[1] != N_ACTIONS or arr.shape[2] < 1:
            raise ValueError(f"expected shape (n_states, {N_ACTIONS}, J), got {arr.shape}")
        q = cls(arr.shape[0], arr.shape[2], init_value)
        q.values = arr.tolist()
        return q

    def __eq__(self, other) -> bool:
        return isinstance(other, SkipQ) and self.values == other.values

    def __repr__(self) -> str:
        return f"SkipQ(n_states={self.n_states}, max_skip={self.max_skip})"


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")


def _argmax_random(row: List[float], rng: random.Random) -> int:
    best = max(row)
    winners = [i for i, v in enumerate(row) if v == best]
    if len(winners) == 1:
        return winners[0]
    return winners[rng.randrange(len(winners))]


def select_action(q: BehaviourQ, s: int, epsilon: float, rng: random.Random) -> int:
    _check_epsilon(epsilon)
    if epsilon > 0.0 and rng.random() < epsilon:
        return rng.randrange(N_ACTIONS)
    return _argmax_random(q.values[s], rng)


def select_skip(sq: SkipQ, s: int, a: int, epsilon: float, rng: random.Random) -> int:
    """Epsilon-greedy skip length in ``1..J`` for action ``a``; ties broken at random."""
    _check_epsilon(epsilon)
    if sq.max_skip == 1:
        return 1
    if epsilon > 0.0 and rng.random() < epsilon:
        return rng.randrange(sq.max_skip) + 1
    return _argmax_random(sq.values[s][a], rng) + 1


def td_update(q: BehaviourQ, s: int, a: int, r: float, s_next: int,
              terminal: bool, cfg: AgentConfig) -> float:
    """One-step Q-learning update of ``Q(s, a)``; returns the new value."""
    target = r if terminal else r + cfg.gamma * max(q.values[s_next])
    row = q.values[s]
    row[a] += cfg.alpha * (target - row[a])
    return row[a]


def td_update_skip(sq: SkipQ, q: BehaviourQ, conn: SkipConnection, cfg: AgentConfig) -> float:
    """Update ``Q(s, j | a)`` from one observed skip connection.

    The bootstrap term reads the *behaviour* table at the end state, never the
    skip table, so stacked skips cannot inflate each other.
    """
    j = conn.length
    if not 1 <= j <= sq.max_skip:
        raise ValueError(f"connection length {j} outside [1, {sq.max_skip}]")
    target = conn.discounted_reward
    if not conn.end_terminal:
        target += cfg.gamma ** j * max(q.values[conn.end_state])
    row = sq.values[conn.start_state][conn.action]
    row[j - 1] += cfg.alpha * (target - row[j - 1])
    return row[j - 1]
