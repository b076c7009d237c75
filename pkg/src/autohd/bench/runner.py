"""Benchmark runs, metrics and Markdown/CSV reports."""

from __future__ import annotations

import csv
import io
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from ..core import GROUND_TRUTH, PlanningTask, WorldModel, validate_plan
from ..domains import domain_for
from ..dsl import CompiledHeuristic, load_heuristic
from ..search import ASTAR, SearchConfig, search
from .datasets import load_jsonl


@dataclass
class RunConfig:
    domain_id: str
    dataset: Any  # path to a JSONL file or a list of PlanningTask
    heuristic: Any = None  # "builtin:<name>", DSL path, or CompiledHeuristic
    algorithm: str = ASTAR
    expansion_budget: Optional[int] = None
    depth_cap: Optional[int] = None
    num_solutions: int = 1
    world_mode: str = GROUND_TRUTH
    world_model_factory: Any = None  # callable(domain) -> WorldModel, for model-backed runs
    seed: int = 0
    jobs: int = 1
    label: str = ""

    def __post_init__(self):
        if self.world_mode != GROUND_TRUTH and self.world_model_factory is None:
            raise ValueError("model-backed runs need endpoints or fixtures (world_model_factory)")


@dataclass
class InstanceRecord:
    instance_id: str
    optimal_depth: Optional[int]
    solved: bool
    status: str
    plan_length: Optional[int]
    expansions: int
    heuristic_faults: int
    reason: str = ""
    plan: list = field(default_factory=list)


@dataclass
class Metrics:
    label: str
    domain_id: str
    n: int
    accuracy: float
    per_bucket: dict = field(default_factory=dict)  # depth -> accuracy
    bucket_counts: dict = field(default_factory=dict)  # depth -> instances
    mean_expansions: float = 0.0
    mean_plan_length: Optional[float] = None
    heuristic_faults: int = 0
    wall_time: float = 0.0


def _resolve_heuristic(cfg: RunConfig) -> CompiledHeuristic:
    from ..dsl import DEFAULT_BUILTIN

    h = cfg.heuristic
    if isinstance(h, CompiledHeuristic):
        return h
    return load_heuristic(h or f"builtin:{DEFAULT_BUILTIN[cfg.domain_id]}", cfg.domain_id)


def run_instance(task: PlanningTask, h, cfg: RunConfig, model: WorldModel | None = None) -> InstanceRecord:
    domain = domain_for(task)
    model = model or (cfg.world_model_factory(domain) if cfg.world_model_factory else WorldModel.ground_truth(domain))
    scfg = SearchConfig.for_task(
        task,
        cfg.algorithm,
        expansion_budget=cfg.expansion_budget,
        depth_cap=cfg.depth_cap,
        num_solutions=cfg.num_solutions,
    )
    result = search(task, model, h, scfg)
    truth = WorldModel.ground_truth(domain)
    solved, reason, best = False, result.status, None
    for plan in result.plans:
        check = validate_plan(task, plan, truth)
        if check.valid:
            solved, reason, best = True, "ok", plan
            break
        reason = check.reason
    return InstanceRecord(
        task.instance_id,
        task.optimal_depth,
        solved,
        result.status,
        len(best) if best is not None else None,
        result.stats.expansions,
        result.stats.heuristic_faults,
        reason,
        [domain.render_action(a) for a in best.actions] if best is not None else [],
    )


def aggregate(records: Sequence[InstanceRecord], label: str, domain_id: str, wall_time: float = 0.0) -> Metrics:
    n = len(records)
    solved = [r for r in records if r.solved]
    buckets: dict = defaultdict(list)
    for r in records:
        if r.optimal_depth is not None:
            buckets[r.optimal_depth].append(r.solved)
    return Metrics(
        label=label,
        domain_id=domain_id,
        n=n,
        accuracy=len(solved) / n,
        per_bucket={d: sum(v) / len(v) for d, v in sorted(buckets.items())},
        bucket_counts={d: len(v) for d, v in sorted(buckets.items())},
        mean_expansions=sum(r.expansions for r in records) / n,
        mean_plan_length=(sum(r.plan_length for r in solved) / len(solved)) if solved else None,
        heuristic_faults=sum(r.heuristic_faults for r in records),
        wall_time=wall_time,
    )


def run_bench(cfg: RunConfig) -> tuple[Metrics, list[InstanceRecord]]:
    tasks = cfg.dataset if isinstance(cfg.dataset, list) else load_jsonl(cfg.domain_id, cfg.dataset)
    if not tasks:
        raise ValueError("the dataset is empty")
    h = _resolve_heuristic(cfg)
    started = time.perf_counter()
    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            records = list(pool.map(lambda t: run_instance(t, h, cfg), tasks))
    else:
        records = [run_instance(t, h, cfg) for t in tasks]
    label = cfg.label or cfg.algorithm
    return aggregate(records, label, cfg.domain_id, time.perf_counter() - started), records


# -- reports -----------------------------------------------------------------

_FIXED = ["label", "domain", "n", "accuracy", "mean_expansions", "mean_plan_length", "heuristic_faults", "wall_time"]


def _all_buckets(rows) -> list:
    return sorted({d for m in rows for d in m.per_bucket})


def report(rows: Sequence[Metrics]) -> tuple[str, str]:
    """Return ``(markdown, csv)`` tables with one row per run.

    Markdown shows accuracies as percentages, one ``Step d`` column per
    optimal-depth bucket followed by ``All``. The CSV keeps full precision
    and reloads with :func:`load_report_csv`.
    """
    buckets = _all_buckets(rows)
    head = ["Run"] + [f"Step {d}" for d in buckets] + ["All", "Mean expansions"]
    lines = ["| " + " | ".join(head) + " |", "|" + "|".join("---" for _ in head) + "|"]
    for m in rows:
        cells = [m.label or m.domain_id]
        cells += [f"{100 * m.per_bucket[d]:.1f}" if d in m.per_bucket else "-" for d in buckets]
        cells += [f"{100 * m.accuracy:.1f}", f"{m.mean_expansions:.1f}"]
        lines.append("| " + " | ".join(cells) + " |")
    markdown = "\n".join(lines) + "\n"

    out = io.StringIO()
    fields = _FIXED + [f"step_{d}" for d in buckets] + [f"n_step_{d}" for d in buckets]
    writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for m in rows:
        row = {
            "label": m.label,
            "domain": m.domain_id,
            "n": m.n,
            "accuracy": repr(m.accuracy),
            "mean_expansions": repr(m.mean_expansions),
            "mean_plan_length": "" if m.mean_plan_length is None else repr(m.mean_plan_length),
            "heuristic_faults": m.heuristic_faults,
            "wall_time": repr(m.wall_time),
        }
        for d in buckets:
            if d in m.per_bucket:
                row[f"step_{d}"] = repr(m.per_bucket[d])
                row[f"n_step_{d}"] = m.bucket_counts[d]
        writer.writerow(row)
    return markdown, out.getvalue()


def load_report_csv(text: str) -> list[Metrics]:
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        per_bucket, counts = {}, {}
        for k, v in row.items():
            if k.startswith("step_") and v != "":
                d = int(k[5:])
                per_bucket[d] = float(v)
                counts[d] = int(row[f"n_step_{d}"])
        rows.append(
            Metrics(
                label=row["label"],
                domain_id=row["domain"],
                n=int(row["n"]),
                accuracy=float(row["accuracy"]),
                per_bucket=dict(sorted(per_bucket.items())),
                bucket_counts=dict(sorted(counts.items())),
                mean_expansions=float(row["mean_expansions"]),
                mean_plan_length=float(row["mean_plan_length"]) if row["mean_plan_length"] else None,
                heuristic_faults=int(row["heuristic_faults"]),
                wall_time=float(row["wall_time"]),
            )
        )
    return rows


def ablation(cfg: RunConfig, algorithms=("greedy_bfs", "astar")) -> tuple[list[Metrics], dict]:
    """Run the same dataset under each search algorithm (one report row each)."""
    rows, records = [], {}
    for alg in algorithms:
        sub = RunConfig(**{**cfg.__dict__, "algorithm": alg, "label": alg})
        m, recs = run_bench(sub)
        rows.append(m)
        records[alg] = recs
    return rows, records
