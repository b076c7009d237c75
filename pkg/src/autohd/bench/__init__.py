"""Datasets, exhaustive oracles, metrics and reports."""

from .datasets import DatasetError, gen_dataset, load_jsonl, record_to_task, save_jsonl, task_to_record
from .oracle import OracleResult, expression_values, oracle_solve
from .runner import (
    InstanceRecord,
    Metrics,
    RunConfig,
    ablation,
    aggregate,
    load_report_csv,
    report,
    run_bench,
    run_instance,
)

__all__ = [
    "DatasetError",
    "InstanceRecord",
    "Metrics",
    "OracleResult",
    "RunConfig",
    "ablation",
    "aggregate",
    "expression_values",
    "gen_dataset",
    "load_jsonl",
    "load_report_csv",
    "oracle_solve",
    "record_to_task",
    "report",
    "run_bench",
    "run_instance",
    "save_jsonl",
    "task_to_record",
]
