"""Per-episode epsilon schedules: linear decay, geometric ("log") decay, constant."""
from __future__ import annotations

import math
from dataclasses import dataclass

SCHEDULE_KINDS = ("linear", "log", "const")


@dataclass(frozen=True)
class Schedule:
    kind: str = "linear"
    eps_start: float = 1.0
    eps_end: float = 0.0
    constant_eps: float = 0.1

    def __post_init__(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        for name in ("eps_start", "eps_end", "constant_eps"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.kind != "const" and self.eps_start < self.eps_end:
            raise ValueError("eps_start must be >= eps_end for decaying schedules")
        if self.kind == "log" and self.eps_end <= 0.0:
            raise ValueError("log schedule needs eps_end > 0")

    @classmethod
    def linear(cls, eps_start: float = 1.0, eps_end: float = 0.0) -> "Schedule":
        return cls("linear", eps_start, eps_end)

    @classmethod
    def log(cls, eps_start: float = 1.0, eps_end: float = 1e-5) -> "Schedule":
        return cls("log", eps_start, eps_end)

    @classmethod
    def constant(cls, eps: float = 0.1) -> "Schedule":
        return cls("const", constant_eps=eps)

    @classmethod
    def from_name(cls, name: str, **overrides) -> "Schedule":
        """Build from a config name (``linear|log|const``) with optional overrides."""
        base = {"linear": cls.linear, "log": cls.log,
                "const": cls.constant, "constant": cls.constant}.get(name)
        if base is None:
            raise ValueError(f"unknown schedule {name!r}; expected linear|log|const")
        sched = base()
        params = {k: v for k, v in overrides.items() if v is not None}
        return cls(sched.kind, **{**_fields(sched), **params})

    def to_dict(self) -> dict:
        return {"kind": self.kind, **_fields(self)}

    def __call__(self, episode: int, total_episodes: int) -> float:
        return epsilon_at(self, episode, total_episodes)


def _fields(s: Schedule) -> dict:
    return {"eps_start": s.eps_start, "eps_end": s.eps_end, "constant_eps": s.constant_eps}


def epsilon_at(sched: Schedule, episode: int, total_episodes: int) -> float:
    """Exploration rate for 0-based ``episode`` of ``total_episodes``.

    Decaying schedules hit ``eps_start`` at the first episode and exactly
    ``eps_end`` at the last; ``log`` interpolates linearly in log space.
    """
    if sched.kind == "const":
        if not 0 <= episode < max(total_episodes, 1):
            raise ValueError(f"episode {episode} outside [0, {total_episodes})")
        return sched.constant_eps
    if total_episodes < 2:
        raise ValueError("decaying schedules need at least 2 episodes")
    if not 0 <= episode < total_episodes:
        raise ValueError(f"episode {episode} outside [0, {total_episodes})")
    last = total_episodes - 1
    if episode == last:
        return sched.eps_end
    frac = episode / last
    if sched.kind == "linear":
        return sched.eps_start + (sched.eps_end - sched.eps_start) * frac
    if sched.eps_start == sched.eps_end:
        return sched.eps_start
    log_eps = math.log(sched.eps_start) + (math.log(sched.eps_end) - math.log(sched.eps_start)) * frac
    # clamp rounding so the range invariant holds exactly
    return min(sched.eps_start, max(sched.eps_end, math.exp(log_eps)))
