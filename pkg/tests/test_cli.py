import json
import os
import subprocess
import sys

import pytest

from skipgrid.cli import main


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["run", "--env", "cliff", "--agent", "tq", "--episodes", "30",
                 "--eval-every", "5", "--seeds", "0-1", "--out", str(out)])
    assert code == 0
    assert "AUC" in capsys.readouterr().out
    assert sorted(p.name for p in out.iterdir()) == [
        "curve_seed0.csv", "curve_seed1.csv", "qtables_seed0.json", "qtables_seed1.json",
        "summary.json"]


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"env": "bridge", "agent": "q", "episodes": 50, "alpha": 0.3,
                               "seeds": "0-2"}))
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfg), "--episodes", "12", "--seeds", "4",
                 "--out", str(out)]) == 0
    echoed = json.loads((out / "summary.json").read_text())["config"]
    assert (echoed["env"], echoed["agent"], echoed["alpha"]) == ("bridge", "q", 0.3)
    assert (echoed["episodes"], echoed["seeds"]) == (12, [4])


@pytest.mark.parametrize("argv", [
    ["run", "--env", "nowhere", "--episodes", "5"],
    ["run", "--agent", "dqn"],
    ["run", "--episodes", "0"],
    ["run", "--alpha", "2"],
    ["run", "--seeds", "x"],
    ["run", "--config", "missing.json"],
    ["bogus"],
])
def test_configuration_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 2


def test_bad_json_config_exit_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{nope")
    assert main(["run", "--config", str(cfg)]) == 2
    cfg.write_text(json.dumps({"learning_rate": 1}))
    assert main(["run", "--config", str(cfg)]) == 2


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_out_exit_3(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    try:
        assert main(["run", "--episodes", "5", "--out", str(locked / "run")]) == 3
    finally:
        locked.chmod(0o700)


def test_out_path_is_a_file_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--episodes", "5", "--out", str(blocker / "run")]) == 3


def test_plot_data(tmp_path):
    run_dir = tmp_path / "run"
    assert main(["run", "--episodes", "10", "--eval-every", "5", "--seeds", "0-1",
                 "--out", str(run_dir)]) == 0
    tidy = tmp_path / "tidy.csv"
    assert main(["plot-data", str(run_dir), "--out", str(tidy), "--metrics", "eval_reward"]) == 0
    assert len(tidy.read_text().splitlines()) == 1 + 2 * 2
    assert main(["plot-data", str(run_dir), "--out", str(tidy), "--metrics", "loss"]) == 2
    assert main(["plot-data", str(tmp_path / "absent"), "--out", str(tidy)]) == 3


def test_table_command(tmp_path, capsys):
    code = main(["table", "--envs", "cliff", "--schedules", "const", "--episodes", "20",
                 "--seeds", "0", "--sweep", "1,2", "--sweep-env", "cliff", "--out", str(tmp_path)])
    assert code == 0
    assert "[const]" in capsys.readouterr().out
    assert (tmp_path / "table.csv").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "skipgrid", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "plot-data" in proc.stdout
