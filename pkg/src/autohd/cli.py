"""``autohd`` command line.

Exit codes: 0 success, 1 task unsolved, 2 configuration error, 3 external
service failure. Every run prints its effective configuration as the first
line (``# autohd <command> {json}``). Values from ``--config FILE`` (a JSON
object keyed by flag name) sit under explicitly given flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import DOMAIN_IDS, GROUND_TRUTH, MODEL_BACKED, WorldModel, validate_plan
from .domains import domain_for, get_domain

EXIT_OK, EXIT_UNSOLVED, EXIT_CONFIG, EXIT_SERVICE = 0, 1, 2, 3
ALGORITHMS = {"astar": "astar", "greedy": "greedy_bfs", "greedy_bfs": "greedy_bfs"}


class ConfigError(Exception):
    pass


DEFAULTS = {
    "evolve": {
        "domain": None, "b": 4, "generations": 5, "validation": None, "generator": "stub", "out": "archive.json",
        "export": None, "algorithm": "astar", "expansion_budget": None, "depth_cap": None, "retries": 3,
        "model": "default", "seed": 0,
    },
    "solve": {
        "domain": None, "instance": None, "index": 0, "heuristic": None, "algorithm": "astar", "num_solutions": 1,
        "expansion_budget": None, "depth_cap": None, "world": GROUND_TRUTH, "model": "default", "trace": None,
        "seed": 0,
    },
    "bench": {
        "domain": None, "dataset": None, "heuristic": None, "algorithm": "astar", "ablation": False,
        "num_solutions": 1, "expansion_budget": None, "depth_cap": None, "world": GROUND_TRUTH, "model": "default",
        "jobs": 1, "report_md": None, "report_csv": None, "seed": 0,
    },
    "oracle": {"domain": None, "instance": None, "index": 0, "dataset": None, "cap": 20, "seed": 0},
    "gen-dataset": {
        "domain": None, "depths": None, "count": 100, "move_set": "full", "blocks": "3:5", "mixed": False,
        "out": None, "seed": 0,
    },
    "inspect": {"domain": None, "heuristic": None, "archive": None, "instance": None, "seed": 0},
}


def _h(cmd: str, dest: str, text: str) -> str:
    default = DEFAULTS[cmd][dest]
    return text if default is None or default is False else f"{text} (default: {default})"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autohd",
        description="Heuristic-guided planning with evolved heuristic functions.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def common(p, cmd):
        p.add_argument("--domain", choices=DOMAIN_IDS, help="planning domain (required)")
        p.add_argument("--config", metavar="FILE", help="JSON file of flag values; explicit flags win")
        p.add_argument("--seed", type=int, help=_h(cmd, "seed", "random seed"))

    def search_flags(p, cmd):
        p.add_argument("--algorithm", choices=sorted(ALGORITHMS), help=_h(cmd, "algorithm", "search algorithm"))
        p.add_argument("--expansion-budget", type=int, metavar="N",
                       help="maximum node expansions (default: per-domain budget)")
        p.add_argument("--depth-cap", type=int, metavar="D",
                       help="maximum plan length (default: min(2 x optimal, domain cap))")

    def model_flags(p, cmd):
        p.add_argument("--model", help=_h(cmd, "model", "model name sent to the chat-completion endpoint"))

    p = sub.add_parser("evolve", help="evolve heuristics on a validation set")
    common(p, "evolve")
    p.add_argument("--b", type=int, help=_h("evolve", "b", "population size"))
    p.add_argument("--generations", type=int, metavar="K", help=_h("evolve", "generations", "evolution rounds"))
    p.add_argument("--validation", metavar="PATH", help="validation dataset (JSONL, required)")
    p.add_argument("--generator", choices=("llm", "stub"), help=_h("evolve", "generator", "heuristic generator"))
    p.add_argument("--out", metavar="PATH", help=_h("evolve", "out", "archive JSON output"))
    p.add_argument("--export", metavar="PATH", help="also write the best heuristic as a DSL file")
    p.add_argument("--retries", type=int, help=_h("evolve", "retries", "attempts per requested candidate"))
    search_flags(p, "evolve")
    model_flags(p, "evolve")

    p = sub.add_parser("solve", help="solve one instance")
    common(p, "solve")
    p.add_argument("--instance", help="JSON record, JSONL file, or literal state (game24 numbers, cube facelets)")
    p.add_argument("--index", type=int, help=_h("solve", "index", "record index when --instance is a file"))
    p.add_argument("--heuristic", help="builtin:<name>, DSL file, or archive JSON (default: domain builtin)")
    p.add_argument("--num-solutions", type=int, metavar="K", help=_h("solve", "num_solutions", "distinct plans"))
    p.add_argument("--world", choices=(GROUND_TRUTH, MODEL_BACKED), help=_h("solve", "world", "world model"))
    p.add_argument("--trace", metavar="PATH", help="write the expansion trace as JSON lines")
    search_flags(p, "solve")
    model_flags(p, "solve")

    p = sub.add_parser("bench", help="run a benchmark and print a report")
    common(p, "bench")
    p.add_argument("--dataset", metavar="PATH", help="dataset (JSONL, required)")
    p.add_argument("--heuristic", help="builtin:<name>, DSL file, or archive JSON (default: domain builtin)")
    p.add_argument("--ablation", action="store_true", default=None, help="compare greedy_bfs and astar")
    p.add_argument("--num-solutions", type=int, metavar="K", help=_h("bench", "num_solutions", "plans per instance"))
    p.add_argument("--world", choices=(GROUND_TRUTH, MODEL_BACKED), help=_h("bench", "world", "world model"))
    p.add_argument("--jobs", type=int, help=_h("bench", "jobs", "parallel workers"))
    p.add_argument("--report-md", metavar="PATH", help="write the Markdown report here")
    p.add_argument("--report-csv", metavar="PATH", help="write the CSV report here")
    search_flags(p, "bench")
    model_flags(p, "bench")

    p = sub.add_parser("oracle", help="exact optimal plan length by exhaustive search")
    common(p, "oracle")
    p.add_argument("--instance", help="JSON record, JSONL file, or literal state")
    p.add_argument("--index", type=int, help=_h("oracle", "index", "record index when --instance is a file"))
    p.add_argument("--dataset", metavar="PATH", help="check every instance of a dataset")
    p.add_argument("--cap", type=int, help=_h("oracle", "cap", "deepest plan length searched"))

    p = sub.add_parser("gen-dataset", help="generate an oracle-labelled dataset")
    common(p, "gen-dataset")
    p.add_argument("--depths", help="bucket sizes as depth:count pairs, e.g. 1:20,2:20 (cube2x2, blocksworld)")
    p.add_argument("--count", type=int, help=_h("gen-dataset", "count", "instances (game24)"))
    p.add_argument("--move-set", choices=("full", "reduced"), help=_h("gen-dataset", "move_set", "cube moves"))
    p.add_argument("--blocks", help=_h("gen-dataset", "blocks", "block-count range min:max (blocksworld)"))
    p.add_argument("--mixed", action="store_true", default=None, help="keep unsolvable game24 quadruples")
    p.add_argument("--out", metavar="PATH", help="output JSONL (required)")

    p = sub.add_parser("inspect", help="show a heuristic or summarize an archive")
    common(p, "inspect")
    p.add_argument("--heuristic", help="builtin:<name>, DSL file, or archive JSON")
    p.add_argument("--archive", metavar="PATH", help="archive JSON to summarize")
    p.add_argument("--instance", help="also evaluate the heuristic on this state")
    return parser


# -- configuration -------------------------------------------------------------


def effective_config(cmd: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[cmd])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in loaded.items():
            dest = key.replace("-", "_")
            if dest not in cfg:
                raise ConfigError(f"unknown config key {key!r} for {cmd}")
            cfg[dest] = value
    for dest in cfg:
        value = getattr(args, dest, None)
        if value is not None:
            cfg[dest] = value
    if not cfg.get("domain"):
        raise ConfigError("--domain is required")
    if cfg["domain"] not in DOMAIN_IDS:
        raise ConfigError(f"unknown domain {cfg['domain']!r}")
    if "algorithm" in cfg:
        if cfg["algorithm"] not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {cfg['algorithm']!r}")
        cfg["algorithm"] = ALGORITHMS[cfg["algorithm"]]
    return cfg


def _echo(cmd: str, cfg: dict) -> None:
    print(f"# autohd {cmd} " + json.dumps(cfg, sort_keys=True))


def _require(cfg: dict, *names) -> None:
    for name in names:
        if cfg.get(name) in (None, ""):
            raise ConfigError(f"--{name.replace('_', '-')} is required")


def _existing(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} not found: {path}")
    return p


# -- instance and heuristic resolution ------------------------------------------


def _is_file(text: str) -> bool:
    try:
        return Path(text).is_file()
    except OSError:
        return False


def load_instance(domain_id: str, text: str, index: int = 0):
    from .bench import load_jsonl, record_to_task

    if _is_file(text):
        tasks = load_jsonl(domain_id, text)
        if not 0 <= index < len(tasks):
            raise ConfigError(f"{text} has {len(tasks)} instances; index {index} is out of range")
        return tasks[index]
    stripped = text.strip()
    if stripped.startswith("{"):
        return record_to_task(domain_id, json.loads(stripped))
    domain = get_domain(domain_id)
    if domain_id == "blocksworld":
        init, sep, goal = stripped.partition("||")
        if not sep:
            raise ConfigError("blocksworld instances are given as a JSON record or 'INIT || GOAL'")
        from .domains.blocksworld import bw_parse_goal

        return domain.make_task(domain.parse_state(init), bw_parse_goal(goal))
    return domain.make_task(domain.parse_state(stripped))


def resolve_heuristic(spec, domain_id: str):
    from .dsl import BUILTINS, DEFAULT_BUILTIN, compile_program, load_heuristic

    if not spec:
        spec = f"builtin:{DEFAULT_BUILTIN[domain_id]}"
    if spec.endswith(".json") and _is_file(spec):
        from .evolution import load_archive_best

        program = load_archive_best(spec)
        if program.domain_id != domain_id:
            raise ConfigError(f"archive {spec} is for {program.domain_id}, not {domain_id}")
        return compile_program(program)
    if not spec.startswith("builtin:") and spec not in BUILTINS:
        _existing(spec, "heuristic file")
    return load_heuristic(spec, domain_id)


def _world(cfg: dict, domain):
    if cfg.get("world", GROUND_TRUTH) == GROUND_TRUTH:
        return WorldModel.ground_truth(domain), None
    if domain.domain_id == "cube2x2":
        raise ConfigError("cube2x2 only supports ground_truth transitions")
    from .llm import Gateway, ModelEndpoint, model_backed_world

    gateway = Gateway(ModelEndpoint.from_env(model_name=cfg["model"]))
    return model_backed_world(domain, gateway), gateway


# -- subcommands -----------------------------------------------------------------


def cmd_evolve(cfg: dict) -> int:
    from .bench import load_jsonl
    from .evolution import Evaluator, Evolution

    _require(cfg, "validation", "out")
    validation = load_jsonl(cfg["domain"], _existing(cfg["validation"], "validation file"))
    if not validation:
        raise ConfigError("validation set is empty")
    if cfg["b"] < 2:
        raise ConfigError("--b must be at least 2")
    if cfg["generations"] < 1:
        raise ConfigError("--generations must be at least 1")
    overrides = {k: cfg[k] for k in ("expansion_budget", "depth_cap") if cfg[k] is not None}
    evaluator = Evaluator(validation, algorithm=cfg["algorithm"], **overrides)
    if cfg["generator"] == "stub":
        from .stubgen import StubGenerator

        gen = StubGenerator(cfg["domain"], seed=cfg["seed"])
    else:
        from .llm import Gateway, LLMGenerator, ModelEndpoint

        gen = LLMGenerator(Gateway(ModelEndpoint.from_env(model_name=cfg["model"])), cfg["domain"])
    evo = Evolution(gen, evaluator, cfg["domain"], cfg["b"], seed=cfg["seed"], retries=cfg["retries"])
    pop = evo.init_population()
    _report_generation(evo.archive)
    for _ in range(cfg["generations"]):
        pop = evo.step(pop)
        _report_generation(evo.archive)
    archive = evo.archive
    Path(cfg["out"]).parent.mkdir(parents=True, exist_ok=True)
    archive.save(cfg["out"])
    best = archive.global_best
    print(f"best {best.id} accuracy {best.validation_accuracy:.3f}: {best.source}")
    if cfg["export"]:
        archive.export_best(cfg["export"])
    return EXIT_OK


def _report_generation(archive) -> None:
    rec = archive.generations[-1]
    running = archive.running_best[-1]
    print(
        f"generation {rec.index}: best accuracy {rec.best.validation_accuracy:.3f} "
        f"running max {running:.3f} candidates {len(rec.candidates)} survivors {len(rec.survivors)}"
    )


def cmd_solve(cfg: dict) -> int:
    from .search import SearchConfig, search

    _require(cfg, "instance")
    task = load_instance(cfg["domain"], cfg["instance"], cfg["index"])
    domain = domain_for(task)
    h = resolve_heuristic(cfg["heuristic"], cfg["domain"])
    world, _ = _world(cfg, domain)
    scfg = SearchConfig.for_task(task, cfg["algorithm"], expansion_budget=cfg["expansion_budget"],
                                 depth_cap=cfg["depth_cap"], num_solutions=cfg["num_solutions"])
    if cfg["trace"]:
        from .search import jsonl_trace

        with open(cfg["trace"], "w", encoding="utf-8") as fp:
            result = search(task, world, h, scfg, on_expand=jsonl_trace(fp))
    else:
        result = search(task, world, h, scfg)
    valid = 0
    for i, plan in enumerate(result.plans, start=1):
        check = validate_plan(task, plan)
        valid += check.valid
        steps = "; ".join(domain.render_action(a) for a in plan.actions) or "(empty plan)"
        print(f"plan {i} [{'valid' if check.valid else 'invalid: ' + check.reason}] {len(plan)} steps: {steps}")
    s = result.stats
    print(f"status {result.status} expansions {s.expansions} generated {s.generations} "
          f"heuristic_faults {s.heuristic_faults} valid_plans {valid}")
    return EXIT_OK if valid else EXIT_UNSOLVED


def cmd_bench(cfg: dict) -> int:
    from .bench import RunConfig, ablation, load_jsonl, report, run_bench

    _require(cfg, "dataset")
    tasks = load_jsonl(cfg["domain"], _existing(cfg["dataset"], "dataset"))
    if not tasks:
        raise ConfigError("dataset is empty")
    h = resolve_heuristic(cfg["heuristic"], cfg["domain"])
    factory = None
    if cfg["world"] != GROUND_TRUTH:
        _world(cfg, domain_for(tasks[0]))  # validates the domain
        from .llm import Gateway, ModelEndpoint, model_backed_world

        gateway = Gateway(ModelEndpoint.from_env(model_name=cfg["model"]))
        factory = lambda domain: model_backed_world(domain, gateway)  # noqa: E731
    run = RunConfig(cfg["domain"], tasks, h, cfg["algorithm"], cfg["expansion_budget"], cfg["depth_cap"],
                    cfg["num_solutions"], cfg["world"], factory, cfg["seed"], cfg["jobs"])
    if cfg["ablation"]:
        rows, _ = ablation(run)
    else:
        rows = [run_bench(run)[0]]
    markdown, csv_text = report(rows)
    print(markdown, end="")
    if cfg["report_md"]:
        Path(cfg["report_md"]).write_text(markdown, encoding="utf-8")
    if cfg["report_csv"]:
        Path(cfg["report_csv"]).write_text(csv_text, encoding="utf-8")
    return EXIT_OK


def cmd_oracle(cfg: dict) -> int:
    from .bench import load_jsonl, oracle_solve

    if cfg["dataset"]:
        tasks = load_jsonl(cfg["domain"], _existing(cfg["dataset"], "dataset"))
        mismatches = 0
        for task in tasks:
            res = oracle_solve(task, cfg["cap"])
            ok = task.optimal_depth is None or res.optimal_depth == task.optimal_depth
            mismatches += not ok
            print(f"{task.instance_id}: optimal {res.optimal_depth} labelled {task.optimal_depth}"
                  f"{'' if ok else '  MISMATCH'}")
        print(f"{len(tasks)} instances, {mismatches} mismatches")
        return EXIT_OK if not mismatches else EXIT_UNSOLVED
    _require(cfg, "instance")
    task = load_instance(cfg["domain"], cfg["instance"], cfg["index"])
    res = oracle_solve(task, cfg["cap"])
    if not res.solvable:
        print(f"no plan within {cfg['cap']} steps (nodes {res.nodes})")
        return EXIT_UNSOLVED
    domain = domain_for(task)
    steps = "; ".join(domain.render_action(a) for a in res.plan.actions) or "(empty plan)"
    print(f"optimal {res.optimal_depth} nodes {res.nodes}: {steps}")
    if res.cross_check:
        print("cross-check " + json.dumps(res.cross_check, sort_keys=True))
    return EXIT_OK


def _pairs(text: str) -> dict:
    try:
        out = {}
        for item in str(text).split(","):
            depth, count = item.split(":")
            out[int(depth)] = int(count)
        return out
    except ValueError:
        raise ConfigError(f"expected depth:count pairs, got {text!r}") from None


def cmd_gen_dataset(cfg: dict) -> int:
    from .bench import gen_dataset, save_jsonl

    _require(cfg, "out")
    domain = cfg["domain"]
    if domain == "game24":
        spec = {"count": cfg["count"], "mixed": bool(cfg["mixed"])}
    else:
        _require(cfg, "depths")
        depths = cfg["depths"] if isinstance(cfg["depths"], dict) else _pairs(cfg["depths"])
        spec = {"depths": depths}
        if domain == "cube2x2":
            spec["move_set"] = cfg["move_set"]
        else:
            lo, _, hi = str(cfg["blocks"]).partition(":")
            try:
                spec["blocks"] = (int(lo), int(hi or lo))
            except ValueError:
                raise ConfigError(f"--blocks expects min:max, got {cfg['blocks']!r}") from None
    tasks = gen_dataset(domain, spec, cfg["seed"])
    save_jsonl(tasks, cfg["out"])
    print(f"wrote {len(tasks)} instances to {cfg['out']}")
    return EXIT_OK


def cmd_inspect(cfg: dict) -> int:
    from .dsl import pretty_print

    if cfg["archive"]:
        data = json.loads(_existing(cfg["archive"], "archive").read_text(encoding="utf-8"))
        for gen, running in zip(data["generations"], data["running_best_accuracy"]):
            print(f"generation {gen['index']}: best {gen['best']} accuracy {gen['best_accuracy']:.3f} "
                  f"running max {running:.3f}")
        best = data["global_best"]
        print(f"global best {best['id']} accuracy {best['accuracy']:.3f}")
        print(f"  description: {best['description']}")
        print(f"  source: {best['source']}")
        return EXIT_OK
    h = resolve_heuristic(cfg["heuristic"], cfg["domain"])
    p = h.program
    print(f"id {p.id} kind {p.kind} domain {p.domain_id}")
    if p.description:
        print(f"description: {p.description}")
    print(pretty_print(p))
    if cfg["instance"]:
        from .core import heuristic_value

        task = load_instance(cfg["domain"], cfg["instance"])
        print(f"h(initial) = {heuristic_value(h, task.initial_state, task.goal)}")
    return EXIT_OK


COMMANDS = {
    "evolve": cmd_evolve,
    "solve": cmd_solve,
    "bench": cmd_bench,
    "oracle": cmd_oracle,
    "gen-dataset": cmd_gen_dataset,
    "inspect": cmd_inspect,
}


def main(argv=None) -> int:
    from .bench import DatasetError
    from .dsl import DSLError
    from .evolution import GeneratorFailure
    from .llm import GatewayError

    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args.command, args)
        _echo(args.command, cfg)
        return COMMANDS[args.command](cfg)
    except (GatewayError, GeneratorFailure) as exc:
        print(f"error: service failure: {exc}", file=sys.stderr)
        return EXIT_SERVICE
    except (ConfigError, DatasetError, DSLError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
