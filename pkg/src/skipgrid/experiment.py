"""Experiment runner: configs, per-seed training, on-disk artifacts, result tables.

Artifacts written by :func:`run` into ``config.out``::

    curve_seed<k>.csv     episode,eval_reward,eval_steps,eval_decisions,epsilon
    qtables_seed<k>.json  see save_qtables
    summary.json          per-seed and aggregate metrics plus the config echo
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__
from .agents import AGENTS, Checkpoint, TrainLog, train
from .evaluation import aggregate, first_success, mean_decisions, normalized_auc
from .exploration import Schedule
from .gridworld import BUILTIN_GRIDS, N_ACTIONS, ConfigurationError, GridSpec, builtin_grid, load_grid
from .qtables import AgentConfig, BehaviourQ, SkipQ

CURVE_HEADER = ("episode", "eval_reward", "eval_steps", "eval_decisions", "epsilon")
PLOT_HEADER = ("agent", "env", "schedule", "seed", "episode", "metric", "value")
QTABLE_VERSION = 1
R_MIN, R_MAX = -1.0, 1.0


class QTableError(ValueError):
    """Malformed or inconsistent Q-table document."""


def parse_seeds(text) -> List[int]:
    """``"0-19"``, ``"1,4,7"``, ``"3"`` or an iterable of ints."""
    if isinstance(text, int):
        return [text]
    if not isinstance(text, str):
        return [int(s) for s in text]
    seeds: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            seeds.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
        except ValueError:
            raise ConfigurationError(f"bad seed spec {text!r}") from None
    return seeds


@dataclass
class RunConfig:
    env: str = "cliff"
    agent: str = "tq"
    episodes: int = 10_000
    max_skip: int = 7
    schedule: str = "linear"
    eps_start: Optional[float] = None
    eps_end: Optional[float] = None
    constant_eps: Optional[float] = None
    alpha: float = 0.1
    gamma: float = 0.99
    q_init: float = 0.0
    eval_every: int = 1
    eval_repeats: int = 1
    seeds: List[int] = field(default_factory=lambda: [0])
    out: Optional[str] = None
    jobs: int = 1
    te_duration: str = "zeta"
    te_cap: int = 100

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        data = dict(data)
        if "seeds" in data:
            data["seeds"] = parse_seeds(data["seeds"])
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def schedule_obj(self) -> Schedule:
        try:
            return Schedule.from_name(self.schedule, eps_start=self.eps_start,
                                      eps_end=self.eps_end, constant_eps=self.constant_eps)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None

    def agent_config(self) -> AgentConfig:
        try:
            return AgentConfig(self.alpha, self.gamma, self.max_skip, self.q_init,
                               self.te_duration, self.te_cap)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None

    def grid(self) -> GridSpec:
        return resolve_env(self.env)

    def validate(self) -> None:
        """Raise :class:`ConfigurationError` on the first invalid field."""
        if self.agent not in AGENTS:
            raise ConfigurationError(f"agent must be one of {', '.join(AGENTS)}, got {self.agent!r}")
        for name in ("episodes", "eval_every", "eval_repeats", "jobs"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be a positive integer")
        if not self.seeds:
            raise ConfigurationError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigurationError("duplicate seeds")
        sched = self.schedule_obj()
        if sched.kind != "const" and self.episodes < 2:
            raise ConfigurationError("decaying schedules need episodes >= 2")
        self.agent_config()
        self.grid()


def resolve_env(env: str) -> GridSpec:
    """A builtin grid name or a path to an ASCII map."""
    if env in BUILTIN_GRIDS:
        return builtin_grid(env)
    path = Path(env)
    if not path.is_file():
        raise ConfigurationError(
            f"env {env!r} is neither a builtin ({', '.join(BUILTIN_GRIDS)}) nor a map file")
    return load_grid(path.read_text(encoding="utf-8"), name=path.stem)


@dataclass
class SeedResult:
    seed: int
    log: TrainLog
    behaviour: BehaviourQ
    skip: Optional[SkipQ]
    wall_seconds: float

    def metrics(self) -> dict:
        curve = self.log.curve()
        return {
            "seed": self.seed,
            "auc": normalized_auc(curve, R_MIN, R_MAX),
            "mean_decisions": mean_decisions(curve),
            "first_success": first_success(curve, R_MAX),
            "first_half_success": first_success(curve, 0.5),
            "final_reward": curve.records[-1].reward,
            "final_steps": curve.records[-1].steps,
            "final_decisions": curve.records[-1].decisions,
            "wall_seconds": self.wall_seconds,
        }


@dataclass
class RunSummary:
    config: RunConfig
    per_seed: List[dict]
    wall_seconds: float
    results: List[SeedResult] = field(default_factory=list, repr=False)

    @property
    def auc(self) -> dict:
        return aggregate(p["auc"] for p in self.per_seed)

    @property
    def decisions(self) -> dict:
        return aggregate(p["mean_decisions"] for p in self.per_seed)

    def to_dict(self) -> dict:
        firsts = [p["first_success"] for p in self.per_seed if p["first_success"] is not None]
        sched = self.config.schedule_obj()
        return {
            "artifact_version": __version__,
            "config": self.config.to_dict(),
            "schedule": sched.to_dict(),
            "log_schedule_form": "geometric interpolation between eps_start and eps_end",
            "reward_range": [R_MIN, R_MAX],
            "eval_every": self.config.eval_every,
            "per_seed": self.per_seed,
            "aggregate": {
                "auc": self.auc,
                "mean_decisions": self.decisions,
                "first_success": {
                    "n_success": len(firsts),
                    **(aggregate(firsts) if firsts else {"mean": None, "std": None}),
                },
            },
            "wall_seconds": self.wall_seconds,
        }


def run_seed(config: RunConfig, seed: int) -> SeedResult:
    t0 = time.perf_counter()
    q, sq, log = train(config.agent, config.grid(), config.agent_config(), config.schedule_obj(),
                       config.episodes, config.eval_every, seed, config.eval_repeats)
    return SeedResult(seed, log, q, sq, time.perf_counter() - t0)


def _run_seed_args(args: Tuple[RunConfig, int]) -> SeedResult:
    return run_seed(*args)


def run(config: RunConfig) -> RunSummary:
    """Train ``config.agent`` once per seed; write artifacts if ``config.out`` is set.

    Seeds may run in ``config.jobs`` worker processes; results are ordered by
    the seed list regardless of completion order.
    """
    config.validate()
    t0 = time.perf_counter()
    if config.jobs > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_seed_args, [(config, s) for s in config.seeds]))
    else:
        results = [run_seed(config, s) for s in config.seeds]
    summary = RunSummary(config, [r.metrics() for r in results],
                         time.perf_counter() - t0, results)
    if config.out is not None:
        write_run(summary, config.out)
    return summary


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        raise TypeError(f"cannot format {x!r}")
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def curve_csv(log: TrainLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for cp in log:
        w.writerow([_fmt(v) for v in cp])
    return buf.getvalue()


def read_curve_csv(path) -> TrainLog:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CURVE_HEADER:
        raise ValueError(f"{path}: unexpected curve header")
    log = TrainLog()
    for row in rows[1:]:
        log.append(Checkpoint(int(row[0]), *(float(v) for v in row[1:])))
    return log


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_run(summary: RunSummary, out) -> None:
    out = Path(out)
    cfg = summary.config
    for res in summary.results:
        _atomic_write(out / f"curve_seed{res.seed}.csv", curve_csv(res.log))
        save_qtables(out / f"qtables_seed{res.seed}.json", res.behaviour, res.skip,
                     env=cfg.env, config={**cfg.to_dict(), "seed": res.seed})
    _atomic_write(out / "summary.json", json.dumps(summary.to_dict(), indent=2) + "\n")


def save_qtables(path, behaviour: BehaviourQ, skip: Optional[SkipQ] = None,
                 env: str = "", config: Optional[dict] = None) -> None:
    """Write Q-tables as JSON; floats use shortest round-trip repr."""
    doc = {
        "version": QTABLE_VERSION,
        "env": env,
        "actions": N_ACTIONS,
        "behaviour": behaviour.values,
        "skip": skip.values if skip is not None else None,
        "config": config or {},
    }
    try:
        text = json.dumps(doc, allow_nan=False)
    except ValueError:
        raise QTableError("tables contain non-finite values") from None
    _atomic_write(Path(path), text + "\n")


def _check_matrix(name: str, rows, width: int) -> None:
    if not isinstance(rows, list):
        raise QTableError(f"field {name!r}: expected a list")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise QTableError(f"field {name!r}: entry {i} must have length {width}")
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise QTableError(f"field {name!r}: entry {i} holds a non-finite or non-numeric value")


def load_qtables(path) -> Tuple[BehaviourQ, Optional[SkipQ], dict]:
    """Read and validate a document written by :func:`save_qtables`.

    Returns ``(behaviour, skip_or_None, document_metadata)``.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise QTableError(f"{path}: invalid JSON ({exc.msg} at char {exc.pos})") from None
    if not isinstance(doc, dict):
        raise QTableError("document root must be an object")
    for key in ("version", "actions", "behaviour", "skip"):
        if key not in doc:
            raise QTableError(f"missing field {key!r}")
    if doc["version"] != QTABLE_VERSION:
        raise QTableError(f"field 'version': unsupported value {doc['version']!r}")
    if doc["actions"] != N_ACTIONS:
        raise QTableError(f"field 'actions': expected {N_ACTIONS}, got {doc['actions']!r}")
    beh = doc["behaviour"]
    _check_matrix("behaviour", beh, N_ACTIONS)
    if not beh:
        raise QTableError("field 'behaviour': empty table")
    skip = None
    if doc["skip"] is not None:
        sk = doc["skip"]
        if not isinstance(sk, list) or len(sk) != len(beh):
            raise QTableError(f"field 'skip': expected {len(beh)} states")
        width = None
        for i, per_state in enumerate(sk):
            if not isinstance(per_state, list) or len(per_state) != N_ACTIONS:
                raise QTableError(f"field 'skip': state {i} must have {N_ACTIONS} actions")
            width = width if width is not None else (len(per_state[0]) if isinstance(per_state[0], list) else 0)
            if width < 1:
                raise QTableError("field 'skip': skip dimension must be >= 1")
            _check_matrix("skip", per_state, width)
        skip = SkipQ(len(sk), width)
        skip.values = [[[float(v) for v in row] for row in st] for st in sk]
    q = BehaviourQ(len(beh))
    q.values = [[float(v) for v in row] for row in beh]
    meta = {k: v for k, v in doc.items() if k not in ("behaviour", "skip")}
    return q, skip, meta


@dataclass(frozen=True)
class CurveRecord:
    agent: str
    env: str
    schedule: str
    seed: int
    log: TrainLog


_METRIC_FIELD = {"eval_reward": "reward", "eval_steps": "steps",
                 "eval_decisions": "decisions", "epsilon": "epsilon"}


def emit_plot_data(curves: Iterable[CurveRecord],
                   metrics: Sequence[str] = ("eval_reward", "eval_steps", "eval_decisions"),
                   path=None) -> str:
    """Long-format CSV ``agent,env,schedule,seed,episode,metric,value``."""
    curves = list(curves)
    if not curves:
        raise ValueError("emit_plot_data needs at least one curve")
    bad = [m for m in metrics if m not in _METRIC_FIELD]
    if bad or not metrics:
        raise ValueError(f"unknown metrics {bad}; choose from {', '.join(_METRIC_FIELD)}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_HEADER)
    for c in curves:
        for cp in c.log:
            for m in metrics:
                w.writerow([c.agent, c.env, c.schedule, c.seed, cp.episode, m,
                            _fmt(getattr(cp, _METRIC_FIELD[m]))])
    text = buf.getvalue()
    if path is not None:
        _atomic_write(Path(path), text)
    return text


def curves_from_run(summary: RunSummary) -> List[CurveRecord]:
    cfg = summary.config
    return [CurveRecord(cfg.agent, cfg.env, cfg.schedule, r.seed, r.log) for r in summary.results]


TABLE_HEADER = ("table", "env", "schedule", "agent", "max_skip", "auc_mean", "auc_std",
                "decisions_mean", "decisions_std", "n_seeds")
SKIP_SWEEP = tuple(range(1, 17))


@dataclass
class TableResult:
    rows: List[dict]
    runs: Dict[Tuple, RunSummary] = field(repr=False, default_factory=dict)

    def cell(self, table: str, env: str, schedule: str, agent: str,
             max_skip: Optional[int] = None) -> dict:
        for r in self.rows:
            if (r["table"], r["env"], r["schedule"], r["agent"]) == (table, env, schedule, agent) \
                    and (max_skip is None or r["max_skip"] == max_skip):
                return r
        raise KeyError((table, env, schedule, agent, max_skip))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_HEADER)
        for r in self.rows:
            w.writerow([r[k] if isinstance(r[k], str) else _fmt(r[k]) for k in TABLE_HEADER])
        return buf.getvalue()

    def format(self) -> str:
        """Plain-text rendering: one block per schedule, envs as column pairs."""
        lines = []
        main = [r for r in self.rows if r["table"] == "main"]
        envs = list(dict.fromkeys(r["env"] for r in main))
        agents = list(dict.fromkeys(r["agent"] for r in main))
        for sched in dict.fromkeys(r["schedule"] for r in main):
            lines.append(f"[{sched}]")
            lines.append(f"{'':10}" + "".join(f"{e + '/' + a:>14}" for e in envs for a in agents))
            for metric, key in (("AUC", "auc_mean"), ("Decisions", "decisions_mean")):
                vals = [self.cell("main", e, sched, a)[key] for e in envs for a in agents]
                lines.append(f"{metric:10}" + "".join(f"{v:14.2f}" for v in vals))
        sweep = [r for r in self.rows if r["table"] == "skip_sweep"]
        if sweep:
            lines.append(f"[max-skip sweep: {sweep[0]['env']}, {sweep[0]['schedule']}]")
            lines.append(f"{'J':10}" + "".join(f"{r['max_skip']:>8}" for r in sweep))
            lines.append(f"{'AUC':10}" + "".join(f"{r['auc_mean']:8.2f}" for r in sweep))
            lines.append(f"{'Decisions':10}" + "".join(f"{r['decisions_mean']:8.1f}" for r in sweep))
        return "\n".join(lines) + "\n"


def reproduce_table(envs: Sequence[str] = ("cliff", "bridge", "zigzag"),
                    schedules: Sequence[str] = ("linear", "log", "const"),
                    agents: Sequence[str] = ("q", "tq"),
                    seeds: Sequence[int] = tuple(range(20)),
                    base: Optional[RunConfig] = None,
                    skip_sweep: Sequence[int] = SKIP_SWEEP,
                    sweep_env: str = "zigzag", sweep_schedule: str = "linear",
                    out=None, progress=None) -> TableResult:
    """Result table of AUC and decisions per (env, schedule, agent) cell plus a
    sweep over the maximal skip length on ``sweep_env``.

    Every cell is an ordinary :func:`run`; identical cells are computed once.
    With ``out`` set, each cell's artifacts land in ``out/<table>/<cell>/`` and
    the table itself in ``out/table.csv``.
    """
    base = base or RunConfig()
    seeds = list(seeds)
    result = TableResult([])

    def cell(table, env, schedule, agent, max_skip):
        cfg = replace(base, env=env, schedule=schedule, agent=agent, max_skip=max_skip,
                      seeds=seeds, out=None)
        key = (env, schedule, agent, max_skip if agent == "tq" else None)
        summary = result.runs.get(key)
        if summary is None:
            if out is not None:
                cfg.out = str(Path(out) / table / f"{env}_{schedule}_{agent}_J{max_skip}")
            summary = run(cfg)
            result.runs[key] = summary
            if progress:
                progress(table, key, summary)
        auc, dec = summary.auc, summary.decisions
        result.rows.append({"table": table, "env": env, "schedule": schedule, "agent": agent,
                            "max_skip": max_skip if agent == "tq" else 1,
                            "auc_mean": auc["mean"], "auc_std": auc["std"],
                            "decisions_mean": dec["mean"], "decisions_std": dec["std"],
                            "n_seeds": len(seeds)})

    for schedule in schedules:
        for env in envs:
            for agent in agents:
                cell("main", env, schedule, agent, base.max_skip)
    for j in skip_sweep:
        cell("skip_sweep", sweep_env, sweep_schedule, "tq", j)
    if out is not None:
        _atomic_write(Path(out) / "table.csv", result.to_csv())
    return result
