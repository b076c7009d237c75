import json
import threading
from pathlib import Path

import httpx
import pytest
from hypothesis import given, strategies as st

from autohd.core import validate_plan
from autohd.domains import get_domain
from autohd.domains.blocksworld import BwAction, bw_parse_state
from autohd.domains.game24 import Game24State
from autohd.dsl import HeuristicProgram, builtin, compile_program
from autohd.evolution import Evaluator, GeneratorError, evolve
from autohd.llm import (
    ExtractionError,
    FixtureMissing,
    Gateway,
    LLMGenerator,
    ModelEndpoint,
    PermanentError,
    PromptTemplate,
    RateLimiter,
    TemplateError,
    TransportError,
    WorldStats,
    evolution_prompt,
    evolution_types,
    extract_heuristic,
    format_existing,
    llm_actions,
    llm_transition,
    load_template,
    model_backed_world,
    prompt_hash,
    proposal_prompt,
    render_prompt,
    repair_prompt,
)
from autohd.search import SearchConfig, search
from conftest import PROMPT1_INIT

GOLDEN = Path(__file__).parent / "golden"
DOMAINS = ["blocksworld", "game24", "cube2x2"]
SECRET = "sk-test-0123456789abcdef"


def golden(name):
    return (GOLDEN / f"{name}.txt").read_text(encoding="utf-8")


def reply(description, source):
    return f"Heuristic Description: {description}\n```\n{source}\n```\n"


class FakeGateway:
    """Answers prompts with a callable; records prompts and endpoints."""

    def __init__(self, answer, endpoint=None):
        self.answer = answer
        self.endpoint = endpoint or ModelEndpoint()
        self.seen = []

    def complete(self, prompt, endpoint=None):
        self.seen.append((prompt, endpoint))
        return self.answer(prompt, len(self.seen))


# -- templates ---------------------------------------------------------------


@pytest.mark.parametrize("domain", DOMAINS)
def test_proposal_prompt_matches_golden(domain):
    assert proposal_prompt(domain) == golden(f"{domain}_proposal")


@pytest.mark.parametrize("domain", DOMAINS)
def test_evolution_template_matches_golden(domain):
    assert load_template(f"{domain}_evolution").body == golden(f"{domain}_evolution")
    assert load_template(f"{domain}_evolution").slots == ("existing_heuristics", "evolution_type")


def test_evolution_types_match_golden():
    lines = [line for line in golden("evolution_types").splitlines() if line]
    assert [evolution_types()[i] for i in (1, 2, 3, 4)] == lines


def test_rendered_evolution_golden():
    programs = [
        HeuristicProgram.from_source("sum(map(face in faces(state), if uniform(face) then 0 else 1))", "cube2x2",
                                     "Counts faces that are not a single color."),
        HeuristicProgram.from_source("len(filter(face in faces(state), at(face, 0) != at(face, 3)))", "cube2x2"),
    ]
    assert evolution_prompt("cube2x2", programs, 3) == golden("rendered_cube2x2_evolution_type3")


def test_type_three_text():
    text = evolution_prompt("game24", [builtin("g24_min_expr_gap", "game24")], 3)
    assert "a modified version of the heuristic provided" in text


def test_missing_slot_is_named():
    with pytest.raises(TemplateError, match="existing_heuristics"):
        render_prompt(load_template("cube2x2_evolution"), {"evolution_type": "x"})


def test_unknown_template_and_type():
    with pytest.raises(TemplateError):
        load_template("nope")
    with pytest.raises(TemplateError):
        evolution_prompt("cube2x2", [], 5)


def test_uppercase_markers_are_not_slots():
    assert load_template("blocksworld_actions").slots == ("state_text",)


@given(st.dictionaries(st.sampled_from(["a", "b_c", "slot"]), st.text(max_size=30), min_size=3))
def test_render_fills_everything_once(values):
    t = PromptTemplate("t", "x <a> y <b_c> z <slot> <a>")
    out = render_prompt(t, values)
    assert out == f"x {values['a']} y {values['b_c']} z {values['slot']} {values['a']}"


def test_format_existing():
    text = format_existing([builtin("zero", "cube2x2")])
    assert text.startswith("Heuristic 1:\n# Heuristic Description: Constant zero.\n```\nzero\n```")


def test_repair_prompt():
    text = repair_prompt("ASK\n", " bad reply ", "unbound identifier 'foo'")
    assert text.startswith("ASK\n\nYour previous answer could not be used:\nbad reply\n")
    assert "unbound identifier 'foo'" in text


# -- extraction --------------------------------------------------------------


def test_extract_fenced():
    r = extract_heuristic(reply("count faces", "sum(map(f in faces(state), 1))"))
    assert r.description == "count faces"
    assert r.code_block == "sum(map(f in faces(state), 1))"


def test_extract_prose_then_fence():
    text = "Some thoughts first.\n# Heuristic Description: gap to 24\nMore prose.\n```dsl\nabs(target - sum(state))\n```\ntrailing"
    r = extract_heuristic(text)
    assert r.code_block == "abs(target - sum(state))"
    assert r.description == "gap to 24"


def test_extract_without_fence():
    r = extract_heuristic("Heuristic Description: zero\n0\n")
    assert r.code_block == "0" and r.description == "zero"


@pytest.mark.parametrize("text", ["", "   \n", "just words with no description line"])
def test_extract_errors(text):
    with pytest.raises(ExtractionError):
        extract_heuristic(text)


# -- client ------------------------------------------------------------------


def completion(text):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def wire_gateway(handler, sleeps=None, **ep):
    endpoint = ModelEndpoint(base_url="http://model.test/v1", model_name="m", **ep)
    sink = sleeps if sleeps is not None else []
    return Gateway(endpoint, fixtures="", transport=httpx.MockTransport(handler), sleep=sink.append)


def test_retry_after_two_429():
    calls = []

    def handler(request):
        calls.append(request)
        return httpx.Response(429) if len(calls) <= 2 else completion("ok")

    sleeps = []
    gw = wire_gateway(handler, sleeps)
    assert gw.complete("hi") == "ok"
    assert gw.stats.retries == 2 and gw.stats.network_calls == 3
    assert sleeps == [0.5, 1.0]


def test_wire_format():
    seen = []

    def handler(request):
        seen.append(request)
        return completion("fine")

    gw = wire_gateway(handler, api_key=SECRET, temperature=0.3)
    gw.complete("hello")
    req = seen[0]
    assert str(req.url) == "http://model.test/v1/chat/completions"
    assert json.loads(req.content) == {"model": "m", "messages": [{"role": "user", "content": "hello"}], "temperature": 0.3}
    assert req.headers["authorization"] == f"Bearer {SECRET}"


def test_client_error_is_permanent():
    gw = wire_gateway(lambda r: httpx.Response(400, text="bad"))
    with pytest.raises(PermanentError):
        gw.complete("x")
    assert gw.stats.network_calls == 1 and gw.stats.retries == 0


def test_server_errors_exhaust_retries():
    gw = wire_gateway(lambda r: httpx.Response(503), max_retries=2)
    with pytest.raises(TransportError):
        gw.complete("x")
    assert gw.stats.network_calls == 3


def test_network_error_and_malformed_body_are_retried():
    calls = []

    def handler(request):
        calls.append(1)
        if len(calls) == 1:
            raise httpx.ConnectError("refused")
        if len(calls) == 2:
            return httpx.Response(200, text="not json")
        return completion("done")

    gw = wire_gateway(handler)
    assert gw.complete("x") == "done" and gw.stats.retries == 2


def test_zero_timeout():
    gw = wire_gateway(lambda r: completion("never"), timeout=0)
    with pytest.raises(TransportError):
        gw.complete("x")
    assert gw.stats.network_calls == 0


def test_endpoint_hides_key():
    ep = ModelEndpoint(api_key=SECRET)
    assert SECRET not in repr(ep)
    assert SECRET not in json.dumps(ep.to_dict())
    assert ModelEndpoint(api_key="a") == ModelEndpoint(api_key="b")
    with pytest.raises(ValueError):
        ModelEndpoint(temperature=-1)


def test_endpoint_from_env(monkeypatch):
    monkeypatch.setenv("AUTOHD_BASE_URL", "http://elsewhere/v1")
    monkeypatch.setenv("AUTOHD_API_KEY", SECRET)
    ep = ModelEndpoint.from_env(model_name="x")
    assert ep.base_url == "http://elsewhere/v1" and ep.api_key == SECRET and ep.model_name == "x"


def test_rate_limiter_spacing():
    now = [0.0]
    waits = []
    limiter = RateLimiter(60, clock=lambda: now[0], sleep=waits.append)
    assert [limiter.acquire() for _ in range(3)] == [0.0, 1.0, 2.0]
    now[0] = 10.0
    assert limiter.acquire() == 0.0
    assert waits == [1.0, 2.0]
    assert RateLimiter(0).acquire() == 0.0


def test_rate_limiter_across_threads():
    now = [0.0]
    lock = threading.Lock()
    got = []
    limiter = RateLimiter(120, clock=lambda: now[0], sleep=lambda s: None)

    def worker():
        w = limiter.acquire()
        with lock:
            got.append(w)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(got) == [0.5 * i for i in range(8)]


def test_fixture_mode(tmp_path):
    (tmp_path / f"{prompt_hash('p')}.txt").write_text("first")
    (tmp_path / f"{prompt_hash('p')}-2.txt").write_text("third")
    gw = Gateway(ModelEndpoint(), fixtures=tmp_path)
    assert [gw.complete("p") for _ in range(3)] == ["first", "first", "third"]
    assert gw._http is None and gw.stats.network_calls == 0
    with pytest.raises(FixtureMissing):
        gw.complete("other")


def test_fixture_env(tmp_path, monkeypatch):
    (tmp_path / f"{prompt_hash('q')}.txt").write_text("canned")
    monkeypatch.setenv("AUTOHD_FIXTURES", str(tmp_path))
    assert Gateway(ModelEndpoint()).complete("q") == "canned"


def test_record_then_replay(tmp_path):
    gw = wire_gateway(lambda r: completion("live " + json.loads(r.content)["messages"][0]["content"]))
    gw.record_to = tmp_path
    assert gw.complete("a") == "live a"
    replay = Gateway(ModelEndpoint(), fixtures=tmp_path)
    assert replay.complete("a") == "live a"


# -- generator ---------------------------------------------------------------


def test_generator_temperatures():
    gw = FakeGateway(lambda p, n: reply("zero", "0"))
    gen = LLMGenerator(gw, "cube2x2")
    gen.explore([], 1)
    gen.modify([builtin("zero", "cube2x2")], 3)
    assert [ep.temperature for _, ep in gw.seen] == [0.7, 0.2]
    assert [(op, t) for op, t, _ in gen.prompts] == [("explore", 1), ("modify", 3)]


def test_generator_repairs_once():
    answers = ["Heuristic Description: x\n```\nfoo(state)\n```", reply("ok", "len(state)")]
    gw = FakeGateway(lambda p, n: answers[n - 1])
    gen = LLMGenerator(gw, "cube2x2")
    prop = gen.propose("cube2x2", 1)[0]
    assert prop.source == "len(state)" and not prop.diagnostic
    assert gen.prompts[1][0] == "repair"
    assert "unknown function 'foo'" in gw.seen[1][0]


def test_generator_gives_up_after_repair():
    gw = FakeGateway(lambda p, n: "no code here at all")
    gen = LLMGenerator(gw, "cube2x2")
    prop = gen.explore([], 2)
    assert prop.diagnostic and len(gw.seen) == 2


def test_generator_transport_error_is_transient():
    def boom(p, n):
        raise TransportError("down")

    with pytest.raises(GeneratorError):
        LLMGenerator(FakeGateway(boom), "cube2x2").explore([], 1)


def test_llm_evolution_keeps_secret_out(tmp_path, cube_small):
    gw = FakeGateway(lambda p, n: reply(f"variant {n}", f"{n % 3} * sum(map(f in faces(state), if uniform(f) then 0 else 1))"),
                     ModelEndpoint(api_key=SECRET))
    archive = evolve(LLMGenerator(gw, "cube2x2"), Evaluator(cube_small[:3]), 2, 1, "cube2x2")
    path = tmp_path / "a.json"
    archive.save(path)
    assert SECRET.encode() not in path.read_bytes()
    assert archive.global_best.validation_accuracy == 1.0


# -- model-backed world ------------------------------------------------------

BW = get_domain("blocksworld")
G24 = get_domain("game24")


def test_llm_actions_parse_and_filter():
    s = bw_parse_state(PROMPT1_INIT)
    answer = ("1. unstack the red block from on top of the blue block\n"
              "2. pick up the blue block\n"
              "3. fly the red block to the moon\n")
    stats = WorldStats()
    acts = llm_actions(FakeGateway(lambda p, n: answer), BW, s, stats=stats)
    assert acts == [BwAction("unstack", "red", "blue")]
    assert stats.illegal == 1 and stats.unparsed == 1 and stats.proposed == 2
    assert set(acts) <= set(BW.actions(s))
    raw = llm_actions(FakeGateway(lambda p, n: answer), BW, s, legality=False)
    assert BwAction("pickup", "blue") in raw


def test_llm_actions_reprompt_then_empty():
    gw = FakeGateway(lambda p, n: "I cannot help with that.")
    stats = WorldStats()
    assert llm_actions(gw, BW, bw_parse_state(PROMPT1_INIT), stats=stats) == []
    assert len(gw.seen) == 2 and stats.reprompts == 1


def test_game24_legalization_by_result():
    s = Game24State((4, 6))
    acts = llm_actions(FakeGateway(lambda p, n: "6 * 4 = 24\n4 + 6 = 10"), G24, s)
    assert [G24.render_action(a) for a in acts] == ["4 * 6 = 24", "4 + 6 = 10"]


def test_llm_transition():
    s = Game24State((4, 6))
    act = G24.actions(s)[3]
    nxt = llm_transition(FakeGateway(lambda p, n: "Next state: [24]"), G24, s, act)
    assert nxt.numbers == (24,)
    stats = WorldStats()
    dead = llm_transition(FakeGateway(lambda p, n: "no idea"), G24, s, act, stats=stats)
    assert dead is None and stats.dead_transitions == 1 and stats.reprompts == 1


def test_cube_is_not_routed():
    with pytest.raises(ValueError):
        llm_actions(FakeGateway(lambda p, n: ""), get_domain("cube2x2"), None)


def truthful(prompt, n):
    if "Move:" in prompt:
        state = G24.parse_state(prompt.split("Current State:")[1].split("\n")[0])
        action = G24.parse_action(prompt.split("Move:")[1].split("\n")[0])
        return "Next state: " + G24.render_state(G24.apply(state, action))
    state = G24.parse_state(prompt.split("Current State:")[1].split("\n")[0])
    return "\n".join(G24.render_action(a) for a in G24.actions(state))


def test_model_backed_search_solves():
    task = G24.make_task(Game24State((4, 4, 6, 8)))
    world = model_backed_world(G24, FakeGateway(truthful))
    h = compile_program(builtin("g24_min_expr_gap", "game24"))
    r = search(task, world, h, SearchConfig("greedy_bfs", 50, 3))
    assert r.solved and validate_plan(task, r.plan).valid
