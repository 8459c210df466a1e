"""Training loops: vanilla Q-learning, skip Q-learning and te-epsilon-greedy Q-learning.

Every trainer owns a single ``random.Random(seed)`` for exploration and for
evaluation tie-breaks, so a given ``(spec, cfg, schedule, episodes, seed)``
reproduces bit-identical tables and logs.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Tuple

from .evaluation import EvalRecord, LearningCurve, evaluate_greedy
from .exploration import Schedule, epsilon_at
from .gridworld import N_ACTIONS, GridEnv, GridSpec
from .qtables import (AgentConfig, BehaviourQ, SkipQ, select_action, select_skip,
                      td_update, td_update_skip)
from .skip import build_connectedness_graph, execute_skip, terminal_completions


class Checkpoint(NamedTuple):
    episode: int
    reward: float
    steps: float
    decisions: float
    epsilon: float


@dataclass
class TrainLog:
    checkpoints: List[Checkpoint] = field(default_factory=list)

    def append(self, cp: Checkpoint) -> None:
        if self.checkpoints and cp.episode <= self.checkpoints[-1].episode:
            raise ValueError("checkpoint episodes must increase")
        self.checkpoints.append(cp)

    def __len__(self) -> int:
        return len(self.checkpoints)

    def __iter__(self):
        return iter(self.checkpoints)

    def curve(self) -> LearningCurve:
        return LearningCurve([c.episode for c in self.checkpoints],
                             [EvalRecord(c.reward, c.steps, c.decisions) for c in self.checkpoints])


EpisodeFn = Callable[[GridEnv, float, random.Random], None]


def _train(spec: GridSpec, schedule: Schedule, episodes: int, eval_every: int,
           rng: random.Random, run_episode: EpisodeFn,
           evaluate: Callable[[GridEnv, random.Random], EvalRecord],
           eval_repeats: int = 1) -> TrainLog:
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    if eval_every < 1:
        raise ValueError("eval_every must be >= 1")
    if eval_repeats < 1:
        raise ValueError("eval_repeats must be >= 1")
    env, eval_env = GridEnv(spec), GridEnv(spec)
    log = TrainLog()
    for ep in range(episodes):
        eps = epsilon_at(schedule, ep, episodes)
        run_episode(env, eps, rng)
        if ep % eval_every == 0:
            recs = [evaluate(eval_env, rng) for _ in range(eval_repeats)]
            n = len(recs)
            log.append(Checkpoint(ep + 1, sum(r.reward for r in recs) / n,
                                  sum(r.steps for r in recs) / n,
                                  sum(r.decisions for r in recs) / n, eps))
    return log


def train_vanilla(spec: GridSpec, cfg: AgentConfig = AgentConfig(),
                  schedule: Schedule = Schedule.linear(), episodes: int = 10_000,
                  eval_every: int = 1, seed: int = 0,
                  eval_repeats: int = 1) -> Tuple[BehaviourQ, TrainLog]:
    rng = random.Random(seed)
    q = BehaviourQ(spec.n_states, cfg.q_init)

    def run_episode(env: GridEnv, eps: float, rng: random.Random) -> None:
        s = env.reset_index()
        while not env.done:
            a = select_action(q, s, eps, rng)
            s_next, r, terminal, _ = env.step_index(a)
            td_update(q, s, a, r, s_next, terminal, cfg)
            s = s_next

    def evaluate(env: GridEnv, rng: random.Random) -> EvalRecord:
        return evaluate_greedy(spec, q, rng, env=env)

    log = _train(spec, schedule, episodes, eval_every, rng, run_episode, evaluate, eval_repeats)
    return q, log


def train_temporl(spec: GridSpec, cfg: AgentConfig = AgentConfig(),
                  schedule: Schedule = Schedule.linear(), episodes: int = 10_000,
                  eval_every: int = 1, seed: int = 0, eval_repeats: int = 1,
                  complete_terminal_skips: bool = True) -> Tuple[BehaviourQ, SkipQ, TrainLog]:
    """Skip Q-learning: pick an action, then how many times to repeat it.

    Each executed step updates the behaviour table; afterwards every sub-skip
    of the executed skip updates the skip table.  When a terminal state cuts
    the skip short, the overshooting sub-skips are learnt too (see
    :func:`skipgrid.skip.terminal_completions`); ``complete_terminal_skips=False``
    restricts learning to the observed connections only.
    """
    rng = random.Random(seed)
    q = BehaviourQ(spec.n_states, cfg.q_init)
    sq = SkipQ(spec.n_states, cfg.max_skip, cfg.q_init)
    J, gamma = cfg.max_skip, cfg.gamma

    def on_step(s, a, r, s_next, terminal):
        td_update(q, s, a, r, s_next, terminal, cfg)

    def run_episode(env: GridEnv, eps: float, rng: random.Random) -> None:
        s = env.reset_index()
        while not env.done:
            a = select_action(q, s, eps, rng)
            j = select_skip(sq, s, a, eps, rng)
            traj = execute_skip(env, a, j, J, as_index=True, on_step=on_step)
            for conn in build_connectedness_graph(traj, gamma):
                td_update_skip(sq, q, conn, cfg)
            if complete_terminal_skips:
                for conn in terminal_completions(traj, j, gamma):
                    td_update_skip(sq, q, conn, cfg)
            s = traj.states[-1]

    def evaluate(env: GridEnv, rng: random.Random) -> EvalRecord:
        return evaluate_greedy(spec, q, rng, skip_q=sq, env=env)

    log = _train(spec, schedule, episodes, eval_every, rng, run_episode, evaluate, eval_repeats)
    return q, sq, log


def duration_sampler(cfg: AgentConfig) -> Callable[[random.Random], int]:
    """Sampler for how long an exploratory action persists.

    ``zeta``: P(n) proportional to ``n ** -te_exponent`` on ``1..te_cap``;
    ``uniform``: uniform on ``1..max_skip``.  A single-value support consumes
    no random draws.
    """
    cap = cfg.te_cap if cfg.te_duration == "zeta" else cfg.max_skip
    if cap == 1:
        return lambda rng: 1
    support = list(range(1, cap + 1))
    if cfg.te_duration == "uniform":
        return lambda rng: rng.randrange(cap) + 1
    cum = list(itertools.accumulate(n ** -cfg.te_exponent for n in support))
    return lambda rng: rng.choices(support, cum_weights=cum)[0]


def train_te_greedy(spec: GridSpec, cfg: AgentConfig = AgentConfig(),
                    schedule: Schedule = Schedule.linear(), episodes: int = 10_000,
                    eval_every: int = 1, seed: int = 0,
                    eval_repeats: int = 1) -> Tuple[BehaviourQ, TrainLog]:
    """Q-learning with temporally-extended epsilon-greedy exploration.

    An exploratory event draws a uniform action and a duration; the action is
    then repeated for that many steps (or until the episode ends) without
    further epsilon tests.  Learning is one-step Q-learning throughout.
    """
    rng = random.Random(seed)
    q = BehaviourQ(spec.n_states, cfg.q_init)
    sample_duration = duration_sampler(cfg)

    def run_episode(env: GridEnv, eps: float, rng: random.Random) -> None:
        s = env.reset_index()
        remaining, held = 0, 0
        while not env.done:
            if remaining > 0:
                a = held
                remaining -= 1
            elif eps > 0.0 and rng.random() < eps:
                a = held = rng.randrange(N_ACTIONS)
                remaining = sample_duration(rng) - 1
            else:
                a = select_action(q, s, 0.0, rng)
            s_next, r, terminal, _ = env.step_index(a)
            td_update(q, s, a, r, s_next, terminal, cfg)
            s = s_next

    def evaluate(env: GridEnv, rng: random.Random) -> EvalRecord:
        return evaluate_greedy(spec, q, rng, env=env)

    log = _train(spec, schedule, episodes, eval_every, rng, run_episode, evaluate, eval_repeats)
    return q, log


AGENTS = {"q": train_vanilla, "tq": train_temporl, "teq": train_te_greedy}


def train(agent: str, spec: GridSpec, cfg: AgentConfig, schedule: Schedule, episodes: int,
          eval_every: int = 1, seed: int = 0,
          eval_repeats: int = 1) -> Tuple[BehaviourQ, Optional[SkipQ], TrainLog]:
    """Dispatch by agent name (``q``, ``tq``, ``teq``); skip table is None unless ``tq``."""
    if agent not in AGENTS:
        raise ValueError(f"unknown agent {agent!r}; expected one of {', '.join(AGENTS)}")
    out = AGENTS[agent](spec, cfg, schedule, episodes, eval_every, seed, eval_repeats)
    if agent == "tq":
        return out
    return out[0], None, out[1]
