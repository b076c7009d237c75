from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from autohd.bench import (
    DatasetError,
    InstanceRecord,
    RunConfig,
    ablation,
    aggregate,
    expression_values,
    gen_dataset,
    load_jsonl,
    load_report_csv,
    oracle_solve,
    report,
    run_bench,
    save_jsonl,
    task_to_record,
)
from autohd.core import validate_plan
from autohd.domains import get_domain
from autohd.domains.cube import CubeState
from autohd.domains.game24 import Game24State

CUBE = get_domain("cube2x2")
G24 = get_domain("game24")


def brute_force_has_plan(task, depth):
    """Plain enumeration of every action sequence of exactly ``depth`` steps."""
    domain = get_domain(task.domain_id, **dict(task.options))

    def walk(payload, left):
        if left == 0:
            return domain.is_goal(payload, task.goal)
        return any(walk(domain.apply(payload, a), left - 1) for a in domain.actions(payload))

    return walk(task.initial_state.payload, depth)


def test_cube_bucket_labels(cube_small):
    assert [t.optimal_depth for t in cube_small] == [1, 1, 1, 2, 2, 2, 3, 3, 4, 4]
    for task in cube_small:
        assert oracle_solve(task, 6).optimal_depth == task.optimal_depth


def test_cube_depth_one_bucket():
    tasks = gen_dataset("cube2x2", {"depths": {1: 5}}, seed=1)
    assert len(tasks) == 5 and all(t.optimal_depth == 1 for t in tasks)


def test_game24_five_five_five_nine():
    task = G24.make_task(Game24State((5, 5, 5, 9)))
    r = oracle_solve(task, 3)
    assert r.optimal_depth == 3 and r.cross_check["reaches_24"]


def test_game24_four_four_six_eight():
    task = G24.make_task(Game24State((4, 4, 6, 8)))
    r = oracle_solve(task, 3)
    assert r.optimal_depth == 3
    assert r.plan.final_state.payload.numbers == (24,)
    assert validate_plan(task, r.plan).valid


def test_game24_unsolvable():
    r = oracle_solve(G24.make_task(Game24State((1, 1, 1, 1))), 3)
    assert r.optimal_depth is None and not r.cross_check["reaches_24"]


def test_blocksworld_zero_walk_rejected():
    with pytest.raises(DatasetError):
        gen_dataset("blocksworld", {"depths": {0: 3}}, seed=0)


def test_solved_cube_depth_zero():
    assert oracle_solve(CUBE.make_task(CubeState()), 4).optimal_depth == 0


def test_oracle_soundness_small(cube_small, bw_small):
    # no plan exists one step shorter than the oracle's optimum
    for task in cube_small[:8] + bw_small[:6]:
        r = oracle_solve(task, 8)
        assert validate_plan(task, r.plan).valid
        assert len(r.plan) == r.optimal_depth
        assert not brute_force_has_plan(task, r.optimal_depth - 1)


def test_bw_generation_agrees_with_oracle(bw_small):
    assert [t.optimal_depth for t in bw_small] == [2] * 4 + [4] * 4 + [6] * 2
    for task in bw_small:
        assert oracle_solve(task, 8).optimal_depth == task.optimal_depth


def test_game24_generation(g24_small):
    assert len(g24_small) == 12
    assert len({t.initial_state.key for t in g24_small}) == 12
    for task in g24_small:
        assert 24 in expression_values(task.initial_state.payload.numbers)


def test_game24_mixed():
    tasks = gen_dataset("game24", {"count": 30, "mixed": True}, seed=4)
    assert any(t.optimal_depth is None for t in tasks)
    rec = task_to_record(next(t for t in tasks if t.optimal_depth is None))
    assert rec["solvable"] is False


def test_generation_is_reproducible():
    a = gen_dataset("cube2x2", {"depths": {2: 3}}, seed=9)
    b = gen_dataset("cube2x2", {"depths": {2: 3}}, seed=9)
    assert [task_to_record(t) for t in a] == [task_to_record(t) for t in b]


@pytest.mark.parametrize("fixture", ["cube_small", "bw_small", "g24_small"])
def test_jsonl_round_trip(fixture, request, tmp_path):
    tasks = request.getfixturevalue(fixture)
    path = tmp_path / "d.jsonl"
    save_jsonl(tasks, path)
    back = load_jsonl(tasks[0].domain_id, path)
    assert [task_to_record(t) for t in back] == [task_to_record(t) for t in tasks]


def test_bad_jsonl(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "x", "numbers": [1, 2, 3, 4, 5, 6]}\n')
    with pytest.raises(DatasetError, match="bad.jsonl:1"):
        load_jsonl("game24", path)


def test_expression_values_small():
    assert expression_values([1, 1]) == {Fraction(2), Fraction(0), Fraction(1)}


def test_run_bench_cube(cube_small):
    m, recs = run_bench(RunConfig("cube2x2", cube_small))
    assert m.accuracy == 1.0 and m.n == len(cube_small)
    assert set(m.per_bucket) == {1, 2, 3, 4}
    assert all(r.solved for r in recs)


def test_run_bench_is_order_invariant(bw_small):
    a, _ = run_bench(RunConfig("blocksworld", bw_small))
    b, _ = run_bench(RunConfig("blocksworld", list(reversed(bw_small)), jobs=3))
    assert (a.accuracy, a.per_bucket, a.mean_expansions) == (b.accuracy, b.per_bucket, b.mean_expansions)


def test_run_bench_empty():
    with pytest.raises(ValueError):
        run_bench(RunConfig("cube2x2", []))


def test_model_backed_needs_factory():
    with pytest.raises(ValueError):
        RunConfig("game24", [], world_mode="model_backed")


def test_ablation_and_report(cube_small):
    rows, records = ablation(RunConfig("cube2x2", cube_small))
    assert [m.label for m in rows] == ["greedy_bfs", "astar"]
    assert all(r.solved for recs in records.values() for r in recs)
    markdown, csv_text = report(rows)
    lines = markdown.splitlines()
    assert lines[0] == "| Run | Step 1 | Step 2 | Step 3 | Step 4 | All | Mean expansions |"
    assert len(lines) == 4
    assert load_report_csv(csv_text) == rows


def test_single_row_report(g24_small):
    m, _ = run_bench(RunConfig("game24", g24_small, algorithm="greedy_bfs"))
    markdown, csv_text = report([m])
    assert len(markdown.splitlines()) == 3
    assert load_report_csv(csv_text) == [m]


bools = st.lists(st.tuples(st.integers(1, 4), st.booleans()), min_size=1, max_size=40)


@given(bools)
def test_bucket_arithmetic(outcomes):
    recs = [InstanceRecord(str(i), d, ok, "solved" if ok else "x", 1 if ok else None, 3, 0)
            for i, (d, ok) in enumerate(outcomes)]
    m = aggregate(recs, "x", "cube2x2")
    weighted = sum(m.per_bucket[d] * m.bucket_counts[d] for d in m.per_bucket) / m.n
    assert m.accuracy == pytest.approx(weighted)
    assert m.accuracy == sum(ok for _, ok in outcomes) / len(outcomes)
