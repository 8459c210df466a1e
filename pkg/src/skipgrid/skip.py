"""Skip transitions: repeating one action, and the sub-skips it reveals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, List, Optional, Sequence

from .gridworld import GridEnv


@dataclass
class SkipTrajectory:
    """States ``s_0..s_m`` and one-step rewards ``r_0..r_{m-1}`` of one skip."""

    action: int
    states: List[Hashable]
    rewards: List[float]
    terminated: bool = False
    timed_out: bool = False

    @property
    def length(self) -> int:
        return len(self.rewards)


@dataclass(frozen=True)
class SkipConnection:
    start_state: Hashable
    action: int
    length: int
    discounted_reward: float
    end_state: Hashable
    end_terminal: bool


StepCallback = Callable[[Hashable, int, float, Hashable, bool], None]


def execute_skip(
    env: GridEnv,
    action: int,
    j: int,
    max_skip: Optional[int] = None,
    *,
    as_index: bool = False,
    on_step: Optional[StepCallback] = None,
) -> SkipTrajectory:
    """Play ``action`` ``j`` times, stopping early if the episode ends.

    ``on_step(s, a, r, s_next, terminal)`` is called after every one-step
    transition, before the next repeat.  With ``as_index`` the trajectory
    holds flat state indices instead of ``(row, col)`` cells.
    """
    if j < 1 or (max_skip is not None and j > max_skip):
        raise ValueError(f"skip length {j} outside [1, {max_skip or 'inf'}]")
    if env.done:
        raise ValueError("cannot skip in a finished episode")
    if as_index:
        s = env.index
        states = [s]
        rewards = []
        terminal = timeout = False
        for _ in range(j):
            s_next, r, terminal, timeout = env.step_index(action)
            states.append(s_next)
            rewards.append(r)
            if on_step is not None:
                on_step(s, action, r, s_next, terminal)
            s = s_next
            if terminal or timeout:
                break
    else:
        s = env.state
        states = [s]
        rewards = []
        terminal = timeout = False
        for _ in range(j):
            out = env.step(action)
            states.append(out.next_state)
            rewards.append(out.reward)
            terminal, timeout = out.terminal, out.timeout
            if on_step is not None:
                on_step(s, action, out.reward, out.next_state, terminal)
            s = out.next_state
            if terminal or timeout:
                break
    return SkipTrajectory(action, states, rewards, terminal, timeout)


def discounted_skip_reward(rewards: Sequence[float], gamma: float) -> float:
    """``sum_k gamma**k * rewards[k]``."""
    if len(rewards) == 0:
        raise ValueError("rewards must be non-empty")
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    total = 0.0
    for r in reversed(rewards):
        total = r + gamma * total
    return total


def build_connectedness_graph(traj: SkipTrajectory, gamma: float) -> List[SkipConnection]:
    """Every sub-skip ``i -> k`` (``0 <= i < k <= m``) of one trajectory.

    A trajectory with ``m`` transitions yields ``m * (m + 1) / 2`` connections.
    Only connections ending in the final state of a terminated trajectory are
    marked terminal; a timeout is not an environment terminal.
    """
    m = traj.length
    if m < 1:
        raise ValueError("trajectory holds no transitions")
    states, rewards, a = traj.states, traj.rewards, traj.action
    out = []
    for k in range(1, m + 1):
        end_terminal = traj.terminated and k == m
        # accumulate backwards so each start i reuses the suffix sum i+1..k-1
        g = 0.0
        for i in range(k - 1, -1, -1):
            g = rewards[i] + gamma * g
            out.append(SkipConnection(states[i], a, k - i, g, states[k], end_terminal))
    return out


def terminal_completions(traj: SkipTrajectory, j: int, gamma: float) -> List[SkipConnection]:
    """Sub-skips that overshoot the terminal state of a skip cut short at ``m < j``.

    Treating the terminal state as absorbing (zero reward, no movement), the
    requested ``j``-skip is a length-``j`` trajectory whose tail sits in the
    terminal.  Every sub-skip ``<s_i, a, L>`` with ``i < m`` and
    ``m - i < L <= j - i`` therefore has the same outcome as the ``(m - i)``-skip
    and is observed as well.  Without these, skip lengths that run past a
    terminal are never updated and keep their initial value.  Timeouts are not
    outcomes of the skip and yield nothing.
    """
    m = traj.length
    if not traj.terminated or m >= j:
        return []
    states, rewards, a = traj.states, traj.rewards, traj.action
    out = []
    g = 0.0
    for i in range(m - 1, -1, -1):
        g = rewards[i] + gamma * g
        for length in range(m - i + 1, j - i + 1):
            out.append(SkipConnection(states[i], a, length, g, states[m], True))
    return out
