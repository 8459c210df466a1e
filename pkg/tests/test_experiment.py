import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from skipgrid.evaluation import mean_decisions, normalized_auc
from skipgrid.experiment import (CurveRecord, QTableError, RunConfig, curves_from_run,
                                 emit_plot_data, load_qtables, parse_seeds, read_curve_csv,
                                 reproduce_table, run, save_qtables)
from skipgrid.gridworld import ConfigurationError
from skipgrid.qtables import BehaviourQ, SkipQ


def small(**kw):
    base = dict(env="cliff", agent="tq", episodes=60, eval_every=7, seeds=[0, 1])
    return RunConfig(**(base | kw))


def test_parse_seeds():
    assert parse_seeds("0-3") == [0, 1, 2, 3]
    assert parse_seeds("1,4, 6-7") == [1, 4, 6, 7]
    assert parse_seeds(5) == [5]
    assert parse_seeds(range(2)) == [0, 1]
    with pytest.raises(ConfigurationError):
        parse_seeds("a-b")


@pytest.mark.parametrize("kw", [dict(agent="dqn"), dict(episodes=0), dict(seeds=[]),
                                dict(seeds=[1, 1]), dict(schedule="cosine"), dict(alpha=0.0),
                                dict(env="nowhere"), dict(eval_every=0), dict(gamma=1.5)])
def test_validate_rejects(kw):
    with pytest.raises(ConfigurationError):
        small(**kw).validate()


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"env": "cliff", "lr": 0.1})
    assert RunConfig.from_dict({"seeds": "0-2"}).seeds == [0, 1, 2]


def test_custom_map_env(tmp_path):
    path = tmp_path / "tiny.txt"
    path.write_text("limit=20\n....\nS#.G\n")
    summary = run(small(env=str(path), episodes=30, eval_every=1))
    assert summary.per_seed[0]["final_reward"] in (-1.0, 0.0, 1.0)


def test_artifacts(tmp_path):
    cfg = small(out=str(tmp_path))
    summary = run(cfg)
    for seed in cfg.seeds:
        lines = (tmp_path / f"curve_seed{seed}.csv").read_text().splitlines()
        assert lines[0] == "episode,eval_reward,eval_steps,eval_decisions,epsilon"
        assert len(lines) - 1 == math.ceil(cfg.episodes / cfg.eval_every)
        q, sq, meta = load_qtables(tmp_path / f"qtables_seed{seed}.json")
        res = summary.results[seed]
        assert q == res.behaviour and sq == res.skip
        assert meta["config"]["seed"] == seed
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["config"] == cfg.to_dict()
    assert doc["reward_range"] == [-1.0, 1.0]
    assert not list(tmp_path.glob("*.tmp"))


def test_summary_recomputable_from_csv(tmp_path):
    cfg = small(out=str(tmp_path), agent="q")
    run(cfg)
    doc = json.loads((tmp_path / "summary.json").read_text())
    for per in doc["per_seed"]:
        curve = read_curve_csv(tmp_path / f"curve_seed{per['seed']}.csv").curve()
        assert normalized_auc(curve) == per["auc"]
        assert mean_decisions(curve) == per["mean_decisions"]


def test_byte_identical_reruns(tmp_path):
    run(small(out=str(tmp_path / "a")))
    run(small(out=str(tmp_path / "b"), jobs=2))
    for name in ("curve_seed0.csv", "curve_seed1.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    for name in ("qtables_seed0.json", "qtables_seed1.json"):
        a, b = (json.loads((tmp_path / d / name).read_text()) for d in "ab")
        for doc in (a, b):
            for key in ("out", "jobs"):
                doc["config"].pop(key)
        assert a == b
    run(small(out=str(tmp_path / "a")))
    first = (tmp_path / "a" / "qtables_seed1.json").read_bytes()
    run(small(out=str(tmp_path / "a")))
    assert (tmp_path / "a" / "qtables_seed1.json").read_bytes() == first


def test_qtables_round_trip_without_skip(tmp_path):
    q = BehaviourQ(3)
    q.values[1][2] = -0.123456789012345
    save_qtables(tmp_path / "q.json", q, None, env="x")
    q2, sq2, meta = load_qtables(tmp_path / "q.json")
    assert q2 == q and sq2 is None and meta["env"] == "x"


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=30)
@given(n=st.integers(1, 5), J=st.integers(1, 4), data=st.data())
def test_qtables_round_trip_property(n, J, data, tmp_path_factory):
    q, sq = BehaviourQ(n), SkipQ(n, J)
    q.values = [[data.draw(finite) for _ in range(4)] for _ in range(n)]
    sq.values = [[[data.draw(finite) for _ in range(J)] for _ in range(4)] for _ in range(n)]
    path = tmp_path_factory.mktemp("q") / "t.json"
    save_qtables(path, q, sq)
    q2, sq2, _ = load_qtables(path)
    assert q2 == q and sq2 == sq


def test_qtables_malformed(tmp_path):
    good = tmp_path / "good.json"
    save_qtables(good, BehaviourQ(2), SkipQ(2, 3))
    text = good.read_text()
    bad = tmp_path / "bad.json"
    bad.write_text(text[: len(text) // 2])
    with pytest.raises(QTableError):
        load_qtables(bad)
    doc = json.loads(text)
    for field, value in [("version", 9), ("actions", 3), ("behaviour", [[0, 0, 0]]),
                         ("skip", [[[0.0]] * 4])]:
        bad.write_text(json.dumps(doc | {field: value}))
        with pytest.raises(QTableError, match=field):
            load_qtables(bad)
    bad.write_text(json.dumps({k: v for k, v in doc.items() if k != "skip"}))
    with pytest.raises(QTableError, match="skip"):
        load_qtables(bad)
    q = BehaviourQ(1)
    q.values[0][0] = float("nan")
    with pytest.raises(QTableError):
        save_qtables(bad, q)


def test_emit_plot_data(tmp_path):
    summary = run(small(episodes=20, eval_every=5))
    curves = curves_from_run(summary)
    text = emit_plot_data(curves, path=tmp_path / "tidy.csv")
    rows = text.splitlines()
    assert rows[0] == "agent,env,schedule,seed,episode,metric,value"
    assert len(rows) - 1 == 2 * 4 * 3
    assert rows[1].startswith("tq,cliff,linear,0,1,eval_reward,")
    assert (tmp_path / "tidy.csv").read_text() == text
    with pytest.raises(ValueError):
        emit_plot_data([])
    with pytest.raises(ValueError):
        emit_plot_data(curves, metrics=["loss"])


def test_reproduce_table_matches_single_run(tmp_path):
    base = RunConfig(episodes=40, eval_every=3)
    res = reproduce_table(["cliff"], ["const"], ["q", "tq"], seeds=[0, 1], base=base,
                          skip_sweep=[1, 7], sweep_env="cliff", sweep_schedule="const", out=tmp_path)
    direct = run(RunConfig(env="cliff", agent="tq", schedule="const", episodes=40, eval_every=3,
                           seeds=[0, 1]))
    cell = res.cell("main", "cliff", "const", "tq")
    assert cell["auc_mean"] == direct.auc["mean"]
    assert cell["decisions_mean"] == direct.decisions["mean"]
    # J=7 sweep cell reuses the main run
    assert res.cell("skip_sweep", "cliff", "const", "tq", 7)["auc_mean"] == cell["auc_mean"]
    assert len(res.runs) == 3
    lines = (tmp_path / "table.csv").read_text().splitlines()
    assert lines[0].startswith("table,env,schedule,agent,max_skip")
    assert len(lines) == 1 + 4
    assert "[const]" in res.format()
