import json
from pathlib import Path

import pytest

from autohd import cli
from autohd.bench import gen_dataset, save_jsonl

GOLDEN = Path(__file__).parent / "golden"
COMMANDS = ["evolve", "solve", "bench", "oracle", "gen-dataset", "inspect"]
SOLVED_CUBE = "[0,0,0,0,1,1,1,1,2,2,2,2,3,3,3,3,4,4,4,4,5,5,5,5]"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def header(out):
    first = out.splitlines()[0]
    assert first.startswith("# autohd ")
    return json.loads(first.split(" ", 3)[3])


@pytest.fixture(scope="module")
def cube_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "cube.jsonl"
    save_jsonl(gen_dataset("cube2x2", {"depths": {1: 2, 2: 2}}, seed=4), path)
    return path


@pytest.mark.parametrize("command", COMMANDS)
def test_help_golden(command, capsys, monkeypatch):
    monkeypatch.setenv("COLUMNS", "100")
    with pytest.raises(SystemExit) as exc:
        cli.main([command, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    assert text == (GOLDEN / f"help_{command}.txt").read_text(encoding="utf-8")


@pytest.mark.parametrize("command", COMMANDS)
def test_help_lists_every_flag_with_defaults(command, capsys, monkeypatch):
    monkeypatch.setenv("COLUMNS", "100")
    with pytest.raises(SystemExit):
        cli.main([command, "--help"])
    text = capsys.readouterr().out
    for dest, default in cli.DEFAULTS[command].items():
        flag = "--" + dest.replace("_", "-")
        assert flag in text
        if default is not None and default is not False:
            assert f"(default: {default})" in text


def test_missing_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_solve_game24_five_plans(capsys):
    code, out, _ = run(capsys, "solve", "--domain", "game24", "--instance", "1 2 3 4",
                       "--algorithm", "greedy", "--num-solutions", "5")
    assert code == 0
    assert header(out)["num_solutions"] == 5
    plans = [line for line in out.splitlines() if line.startswith("plan ")]
    assert len(plans) == 5 and all("[valid]" in p for p in plans)


def test_solve_solved_cube_is_empty_plan(capsys):
    code, out, _ = run(capsys, "solve", "--domain", "cube2x2", "--instance", SOLVED_CUBE)
    assert code == 0 and "0 steps: (empty plan)" in out


def test_solve_unsolvable_exits_one(capsys):
    code, out, _ = run(capsys, "solve", "--domain", "game24", "--instance", "1 1 1 1")
    assert code == 1 and "valid_plans 0" in out


def test_solve_writes_trace(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    code, _, _ = run(capsys, "solve", "--domain", "game24", "--instance", "4 6", "--trace", str(trace))
    rows = [json.loads(line) for line in trace.read_text().splitlines()]
    assert code == 0 and rows and set(rows[0]) >= {"iteration", "state_key", "g", "h", "f"}


def test_missing_domain_and_bad_config(tmp_path, capsys):
    assert run(capsys, "solve", "--instance", "4 6")[0] == 2
    bad = tmp_path / "c.json"
    bad.write_text(json.dumps({"domain": "game24", "frobnicate": 1}))
    code, _, err = run(capsys, "solve", "--config", str(bad), "--instance", "4 6")
    assert code == 2 and "frobnicate" in err
    bad.write_text("[1, 2]")
    assert run(capsys, "solve", "--config", str(bad))[0] == 2


def test_config_merge_explicit_wins(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"domain": "game24", "instance": "4 6", "algorithm": "astar", "num-solutions": 2}))
    code, out, _ = run(capsys, "solve", "--config", str(cfg), "--algorithm", "greedy")
    h = header(out)
    assert code == 0
    assert h["algorithm"] == "greedy_bfs" and h["num_solutions"] == 2 and h["instance"] == "4 6"


def test_unknown_heuristic_file(capsys):
    code, _, err = run(capsys, "solve", "--domain", "game24", "--instance", "4 6", "--heuristic", "nope.dsl")
    assert code == 2 and "nope.dsl" in err


def test_evolve_stub_deterministic(tmp_path, cube_file, capsys):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        code, text, _ = run(capsys, "evolve", "--domain", "cube2x2", "--generator", "stub", "--b", "4",
                            "--generations", "3", "--validation", str(cube_file), "--out", str(out),
                            "--export", str(tmp_path / f"{name}.dsl"))
        assert code == 0
        assert text.count("generation ") == 4
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert len(json.loads(outs[0])["generations"]) == 4
    code, text, _ = run(capsys, "inspect", "--domain", "cube2x2", "--archive", str(tmp_path / "a.json"))
    assert code == 0 and "global best" in text
    code, text, _ = run(capsys, "inspect", "--domain", "cube2x2", "--heuristic", str(tmp_path / "a.dsl"),
                        "--instance", SOLVED_CUBE)
    assert code == 0 and "h(initial) = 0" in text


def test_evolve_requires_validation(capsys):
    code, _, err = run(capsys, "evolve", "--domain", "cube2x2")
    assert code == 2 and "--validation" in err
    assert run(capsys, "evolve", "--domain", "cube2x2", "--validation", "missing.jsonl")[0] == 2


def test_evolve_service_failure_exits_three(tmp_path, cube_file, capsys, monkeypatch):
    monkeypatch.setenv("AUTOHD_FIXTURES", str(tmp_path))  # empty: every prompt is missing
    code, _, err = run(capsys, "evolve", "--domain", "cube2x2", "--generator", "llm", "--b", "2",
                       "--generations", "1", "--validation", str(cube_file), "--out", str(tmp_path / "x.json"))
    assert code == 3 and "service failure" in err


def test_gen_dataset_oracle_bench(tmp_path, capsys):
    data = tmp_path / "bw.jsonl"
    code, out, _ = run(capsys, "gen-dataset", "--domain", "blocksworld", "--depths", "2:2,4:2", "--blocks", "3:4",
                       "--out", str(data), "--seed", "9")
    assert code == 0 and "wrote 4 instances" in out
    code, out, _ = run(capsys, "oracle", "--domain", "blocksworld", "--dataset", str(data))
    assert code == 0 and "0 mismatches" in out
    md = tmp_path / "r.md"
    code, out, _ = run(capsys, "bench", "--domain", "blocksworld", "--dataset", str(data), "--ablation",
                       "--report-md", str(md), "--report-csv", str(tmp_path / "r.csv"))
    assert code == 0
    assert md.read_text() in out
    assert "greedy_bfs" in out and "astar" in out


def test_bad_depths(tmp_path, capsys):
    code, _, _ = run(capsys, "gen-dataset", "--domain", "cube2x2", "--depths", "one", "--out", str(tmp_path / "x"))
    assert code == 2


def test_oracle_single(capsys):
    code, out, _ = run(capsys, "oracle", "--domain", "game24", "--instance", "4 6")
    assert code == 0 and out.splitlines()[1].startswith("optimal 1")
    assert run(capsys, "oracle", "--domain", "game24", "--instance", "1 1 1 1")[0] == 1


def test_cube_model_backed_rejected(capsys):
    code, _, err = run(capsys, "solve", "--domain", "cube2x2", "--instance", SOLVED_CUBE, "--world", "model_backed")
    assert code == 2 and "ground_truth" in err
