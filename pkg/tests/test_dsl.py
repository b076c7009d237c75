import math
import random

import pytest
from hypothesis import given, strategies as st

from autohd.bench.datasets import random_blocks_state
from autohd.core import heuristic_value
from autohd.domains import get_domain
from autohd.domains.blocksworld import BwGoal, TABLE, goal_of_state
from autohd.domains.cube import CubeMove, CubeState, cube_apply, cube_scramble
from autohd.domains.game24 import Game24State, reachable_values
from autohd.dsl import (
    BUILTIN_SOURCES,
    ArityError,
    DSLSyntaxError,
    EvalFault,
    EvalLimits,
    HeuristicProgram,
    UnboundName,
    builtin,
    compile_program,
    parse,
    parse_program,
    pretty_print,
)
from progfuzz import check_total, random_source, sample_payloads

CUBE = get_domain("cube2x2")
G24 = get_domain("game24")
BW = get_domain("blocksworld")


def run(source, domain, payload, goal=None, limits=None):
    return parse_program(source, domain.domain_id, limits=limits).evaluate(domain.view(payload, goal))


def native(name, domain, payload, goal=None):
    return compile_program(builtin(name, domain.domain_id)).evaluate(domain.view(payload, goal))


def test_cube_example_parses():
    h = parse_program("sum(map(face in faces(state), if uniform(face) then 0 else 1))", "cube2x2")
    assert h.evaluate(CUBE.view(CubeState())) == 0


def test_unbound_identifier():
    with pytest.raises(UnboundName) as info:
        parse_program("foo(state)", "cube2x2")
    assert info.value.line == 1 and info.value.col == 1


def test_empty_source():
    with pytest.raises(DSLSyntaxError):
        parse_program("", "cube2x2")


def test_syntax_error_position():
    with pytest.raises(DSLSyntaxError) as info:
        parse_program("1 +\n  * 2", "cube2x2")
    assert info.value.line == 2


def test_arity_mismatch():
    with pytest.raises(ArityError):
        parse_program("abs(1, 2)", "cube2x2")
    with pytest.raises(ArityError):
        parse_program("map(state)", "cube2x2")


def test_goal_only_bound_for_blocksworld():
    parse_program("len(goal)", "blocksworld")
    with pytest.raises(UnboundName):
        parse_program("len(goal)", "game24")


def test_comments_are_ignored():
    h = parse_program("# count faces\nsum(map(f in faces(state), 1))  # six", "cube2x2")
    assert h.evaluate(CUBE.view(CubeState())) == 6


def test_builtin_goal_zero_examples():
    assert native("cube_nonuniform_faces", CUBE, CubeState()) == 0
    assert native("g24_min_expr_gap", G24, Game24State((24,))) == 0


def test_collection_limit():
    h = parse_program("sum(map(x in range(10001), 1))", "cube2x2")
    with pytest.raises(EvalFault) as info:
        h.evaluate(CUBE.view(CubeState()))
    assert info.value.kind == "collection_overflow"


def test_step_budget():
    h = parse_program("sum(map(x in range(1000), sum(map(y in range(1000), 1))))", "cube2x2")
    with pytest.raises(EvalFault) as info:
        h.evaluate(CUBE.view(CubeState()))
    assert info.value.kind == "budget"


def test_division_by_zero_fault():
    with pytest.raises(EvalFault) as info:
        run("1 / (len(state) - 24)", CUBE, CubeState())
    assert info.value.kind == "div_zero"


def test_type_fault():
    with pytest.raises(EvalFault) as info:
        run("state + 1", CUBE, CubeState())
    assert info.value.kind == "type"


def test_negative_value_is_a_fault():
    with pytest.raises(EvalFault):
        run("0 - 1", CUBE, CubeState())


def test_limits_positive():
    with pytest.raises(ValueError):
        EvalLimits(step_budget=0)


def test_bw_builtin_swap_example():
    init = BW.parse_state("the a block is clear, the hand is empty, the a block is on top of the b block, the b block is on the table")
    goal = BwGoal(required_on=frozenset({("b", "a"), ("a", TABLE)}))
    assert native("bw_misplaced_plus_distance", BW, init, goal) == 4
    assert run(BUILTIN_SOURCES["bw_misplaced_plus_distance"], BW, init, goal) == 4


def test_g24_builtin_one_one():
    assert native("g24_min_expr_gap", G24, Game24State((1, 1))) == 22


def test_cube_builtin_after_u():
    s = cube_apply(CubeState(), CubeMove("U"))
    assert native("cube_nonuniform_faces", CUBE, s) == 4


@pytest.mark.parametrize("name", sorted(BUILTIN_SOURCES))
def test_builtin_sources_round_trip(name):
    src = BUILTIN_SOURCES[name]
    assert parse(pretty_print(src)) == parse(src)
    assert pretty_print(pretty_print(src)) == pretty_print(src)


def test_whitespace_normalizes():
    assert pretty_print("  1+(2 *   3)\n") == "1 + 2 * 3"
    assert pretty_print("0") == "0"
    assert pretty_print("(a - b) - c") == "a - b - c"
    assert pretty_print("a - (b - c)") == "a - (b - c)"


def test_program_id_ignores_formatting():
    a = HeuristicProgram.from_source("sum(map(f in faces(state), 1))", "cube2x2")
    b = HeuristicProgram.from_source("sum( map(f in faces(state),1) )", "cube2x2")
    assert a.id == b.id
    assert a.id != HeuristicProgram.from_source("0", "cube2x2").id


def test_builtin_domain_mismatch():
    with pytest.raises(ValueError):
        builtin("cube_nonuniform_faces", "game24")


# builtin and DSL source are independent routes for the same heuristic


@given(st.integers(0, 10**9), st.integers(1, 8))
def test_cube_builtin_matches_dsl(seed, depth):
    s = cube_scramble(depth, seed)[0]
    assert native("cube_nonuniform_faces", CUBE, s) == run(BUILTIN_SOURCES["cube_nonuniform_faces"], CUBE, s)


@given(st.lists(st.integers(1, 13), min_size=1, max_size=4))
def test_g24_builtin_matches_dsl(nums):
    s = Game24State(tuple(nums))
    assert native("g24_min_expr_gap", G24, s) == run(BUILTIN_SOURCES["g24_min_expr_gap"], G24, s)


@given(st.integers(0, 10**9), st.integers(1, 6))
def test_bw_builtin_matches_dsl(seed, n):
    rng = random.Random(seed)
    names = ["a", "b", "c", "d", "e", "f"][:n]
    s = random_blocks_state(rng, names)
    goal = goal_of_state(random_blocks_state(rng, names))
    src = BUILTIN_SOURCES["bw_misplaced_plus_distance"]
    assert native("bw_misplaced_plus_distance", BW, s, goal) == run(src, BW, s, goal)


# goal-zero properties


@given(st.integers(0, 10**9), st.integers(0, 6))
def test_cube_zero_iff_solved(seed, depth):
    s = cube_scramble(depth, seed)[0] if depth else CubeState()
    solved = all(len(set(s.facelets[i:i + 4])) == 1 for i in range(0, 24, 4))
    assert (native("cube_nonuniform_faces", CUBE, s) == 0) == solved


@given(st.lists(st.integers(1, 13), min_size=1, max_size=4))
def test_g24_zero_iff_reachable(nums):
    s = Game24State(tuple(nums))
    assert (native("g24_min_expr_gap", G24, s) == 0) == (24 in reachable_values(s.numbers))


@given(st.integers(0, 10**9), st.integers(1, 6))
def test_bw_zero_iff_goal_supports_hold(seed, n):
    rng = random.Random(seed)
    names = ["a", "b", "c", "d", "e", "f"][:n]
    s = random_blocks_state(rng, names)
    goal = goal_of_state(random_blocks_state(rng, names) if rng.random() < 0.7 else s)
    support = s.support()
    correct = all(support.get(upper) == lower for upper, lower in goal.required_on)
    assert (native("bw_misplaced_plus_distance", BW, s, goal) == 0) == correct


# totality


@given(st.integers(0, 2**32), st.sampled_from(["cube2x2", "game24", "blocksworld"]))
def test_fuzz_totality(seed, domain_id):
    rng = random.Random(seed)
    source = random_source(rng, domain_id)
    payload, goal = sample_payloads(rng)[domain_id]
    check_total(source, domain_id, payload, goal)
    # generated programs are well scoped, so they always parse
    assert parse(pretty_print(source)) == parse(source)


@given(st.integers(0, 2**32))
def test_evaluate_is_deterministic(seed):
    rng = random.Random(seed)
    source = random_source(rng, "game24")
    payload, _ = sample_payloads(rng)["game24"]
    assert check_total(source, "game24", payload, None) == check_total(source, "game24", payload, None)


def test_heuristic_value_folds_faults():
    from autohd.core import FaultCounter

    h = parse_program("1 / 0", "cube2x2")
    faults = FaultCounter()
    assert heuristic_value(h, CUBE.encode(CubeState()), None, faults) == math.inf
    assert faults.count == 1 and faults.kinds == {"div_zero": 1}
