"""Functional-correctness metrics and report rendering.

pass@k uses the unbiased estimator 1 - C(n-c, k)/C(n, k) in its numerically
stable product form. Suite aggregation averages per-problem pass@k over the
suite, per temperature; summary tables take the best value per k across
temperatures. The outcome breakdown reports per-problem average counts of
each class and per-temperature class proportions, with Timeout folded into
Runtime for the compact four-column rendering (and kept separate in the
unfolded view).
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from stackeval.sandbox import ExecutionResult, Outcome

FOLDED_CLASSES = ("syntax", "runtime", "test_failure", "correct")
UNFOLDED_CLASSES = ("syntax", "runtime", "timeout", "test_failure", "correct")

_OUTCOME_CLASS = {
    Outcome.SYNTAX_ERROR: "syntax",
    Outcome.RUNTIME_ERROR: "runtime",
    Outcome.TIMEOUT: "timeout",
    Outcome.TEST_FAILURE: "test_failure",
    Outcome.CORRECT: "correct",
}


def pass_at_k(n: int, c: int, k: int) -> float:
    """Probability that at least one of k draws from n samples is correct,
    given c of the n are correct. Unbiased; k > n is undefined and raises
    (callers must not clamp)."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= c <= n:
        raise ValueError(f"c must be in [0, {n}], got {c}")
    if k < 1:
        raise ValueError("k must be positive")
    if k > n:
        raise ValueError(f"pass@k undefined for k={k} > n={n}")
    if n - c < k:
        return 1.0
    prod = 1.0
    for i in range(n - c + 1, n + 1):
        prod *= 1.0 - k / i
    return 1.0 - prod


def _group_cells(
    results: Iterable[ExecutionResult],
) -> dict[float, dict[str, dict[str, int]]]:
    """temperature -> task_id -> class -> count."""
    cells: dict[float, dict[str, dict[str, int]]] = {}
    for result in results:
        by_task = cells.setdefault(result.temperature, {})
        counts = by_task.setdefault(
            result.task_id, {cls: 0 for cls in UNFOLDED_CLASSES}
        )
        counts[_OUTCOME_CLASS[result.outcome]] += 1
    return cells


def _validate_complete(cells: dict[float, dict[str, dict[str, int]]]) -> int:
    """Every (task, temperature) cell must hold the same sample count."""
    if not cells:
        raise ValueError("no results to aggregate")
    task_ids = set()
    for by_task in cells.values():
        task_ids.update(by_task)
    sizes: dict[tuple[float, str], int] = {}
    for temp, by_task in cells.items():
        for task_id in task_ids:
            counts = by_task.get(task_id)
            sizes[(temp, task_id)] = sum(counts.values()) if counts else 0
    n = max(sizes.values())
    bad = sorted(key for key, size in sizes.items() if size != n)
    if bad:
        shown = ", ".join(f"(T={t}, {task})" for t, task in bad[:10])
        raise ValueError(
            f"incomplete results: {len(bad)} (temperature, task) cells have "
            f"fewer than n={n} samples: {shown}"
        )
    return n


def aggregate_suite(
    results: Sequence[ExecutionResult], ks: Sequence[int]
) -> dict[float, dict]:
    """Per temperature: per-problem outcome counts plus suite pass@k
    (mean over problems of pass_at_k(n, c_problem, k))."""
    cells = _group_cells(results)
    n = _validate_complete(cells)
    out: dict[float, dict] = {}
    for temp in sorted(cells):
        by_task = cells[temp]
        table: dict[int, float] = {}
        for k in ks:
            values = [
                pass_at_k(n, counts["correct"], k) for counts in by_task.values()
            ]
            table[k] = sum(values) / len(values)
        out[temp] = {"n": n, "per_problem": by_task, "pass_at_k": table}
    return out


@dataclass(frozen=True)
class BestValue:
    value: float
    temperature: float

    def as_dict(self) -> dict:
        return {"value": self.value, "temperature": self.temperature}


def best_over_temperatures(
    per_temperature: Mapping[float, Mapping[int, float]],
) -> dict[int, BestValue]:
    """Element-wise max per k, remembering which temperature won."""
    if not per_temperature:
        raise ValueError("no temperature tables given")
    k_sets = {frozenset(table) for table in per_temperature.values()}
    if len(k_sets) != 1:
        raise ValueError("temperature tables disagree on their k sets")
    best: dict[int, BestValue] = {}
    for k in sorted(next(iter(k_sets))):
        winner = max(sorted(per_temperature), key=lambda t: per_temperature[t][k])
        best[k] = BestValue(value=per_temperature[winner][k], temperature=winner)
    return best


@dataclass(frozen=True)
class ErrorBreakdown:
    folded_averages: dict[str, float]
    unfolded_averages: dict[str, float]
    proportions: dict[float, dict[str, float]]

    def as_dict(self) -> dict:
        return {
            "folded_averages": dict(self.folded_averages),
            "unfolded_averages": dict(self.unfolded_averages),
            "proportions": {
                repr(t): dict(classes) for t, classes in self.proportions.items()
            },
        }


def fold_counts(counts: Mapping[str, int | float]) -> dict[str, float]:
    """Timeout counts join the runtime column for four-class rendering."""
    folded = {cls: float(counts.get(cls, 0)) for cls in FOLDED_CLASSES}
    folded["runtime"] += float(counts.get("timeout", 0))
    return folded


def _breakdown_from_cells(
    cells: dict[float, dict[str, dict[str, int]]],
) -> ErrorBreakdown:
    cell_count = 0
    totals = {cls: 0 for cls in UNFOLDED_CLASSES}
    for by_task in cells.values():
        for counts in by_task.values():
            cell_count += 1
            for cls, value in counts.items():
                totals[cls] += value
    unfolded = {cls: totals[cls] / cell_count for cls in UNFOLDED_CLASSES}

    proportions: dict[float, dict[str, float]] = {}
    for temp in sorted(cells):
        temp_totals = {cls: 0 for cls in UNFOLDED_CLASSES}
        programs = 0
        for counts in cells[temp].values():
            programs += sum(counts.values())
            for cls, value in counts.items():
                temp_totals[cls] += value
        folded_temp = fold_counts(temp_totals)
        proportions[temp] = {
            cls: folded_temp[cls] / programs for cls in FOLDED_CLASSES
        }
    return ErrorBreakdown(
        folded_averages=fold_counts(unfolded),
        unfolded_averages=unfolded,
        proportions=proportions,
    )


def error_breakdown(results: Sequence[ExecutionResult]) -> ErrorBreakdown:
    """Per-problem average outcome counts pooled over temperatures, plus
    per-temperature proportions (folded classes; sum to 1)."""
    cells = _group_cells(results)
    _validate_complete(cells)
    return _breakdown_from_cells(cells)


def percent_change(
    baseline: Mapping[int, float],
    treatment: Mapping[int, float],
    ks: Sequence[int] | None = None,
) -> float:
    """Mean over k of 100 * (treatment_k - baseline_k) / baseline_k.

    Zero-baseline ks are excluded with a warning (the ratio is undefined)."""
    if ks is None:
        if set(baseline) != set(treatment):
            raise ValueError("tables disagree on k and no explicit ks given")
        ks = sorted(baseline)
    missing = [k for k in ks if k not in baseline or k not in treatment]
    if missing:
        raise ValueError(f"requested ks missing from a table: {missing}")
    changes = []
    for k in ks:
        if baseline[k] == 0:
            warnings.warn(f"baseline pass@{k} is 0; excluded from percent change")
            continue
        changes.append(100.0 * (treatment[k] - baseline[k]) / baseline[k])
    if not changes:
        raise ValueError("no k with nonzero baseline; percent change undefined")
    return sum(changes) / len(changes)


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    model_label: str
    n: int
    ks: tuple[int, ...]
    temperatures: tuple[float, ...]
    pass_at_k: dict[float, dict[int, float]] = field(default_factory=dict)
    best_per_k: dict[int, BestValue] = field(default_factory=dict)
    per_problem: dict[float, dict[str, dict[str, int]]] = field(default_factory=dict)
    error_averages: dict[str, float] = field(default_factory=dict)
    error_averages_unfolded: dict[str, float] = field(default_factory=dict)
    proportions: dict[float, dict[str, float]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "model_label": self.model_label,
            "n": self.n,
            "ks": list(self.ks),
            "temperatures": [repr(t) for t in self.temperatures],
            "pass_at_k": {
                repr(t): {str(k): v for k, v in table.items()}
                for t, table in self.pass_at_k.items()
            },
            "best_per_k": {str(k): b.as_dict() for k, b in self.best_per_k.items()},
            "per_problem": {
                repr(t): {task: dict(counts) for task, counts in by_task.items()}
                for t, by_task in self.per_problem.items()
            },
            "error_averages": dict(self.error_averages),
            "error_averages_unfolded": dict(self.error_averages_unfolded),
            "proportions": {
                repr(t): dict(classes) for t, classes in self.proportions.items()
            },
        }


def report_from_dict(obj: Mapping) -> SuiteReport:
    return SuiteReport(
        suite=obj["suite"],
        model_label=obj["model_label"],
        n=int(obj["n"]),
        ks=tuple(int(k) for k in obj["ks"]),
        temperatures=tuple(float(t) for t in obj["temperatures"]),
        pass_at_k={
            float(t): {int(k): float(v) for k, v in table.items()}
            for t, table in obj["pass_at_k"].items()
        },
        best_per_k={
            int(k): BestValue(value=float(b["value"]), temperature=float(b["temperature"]))
            for k, b in obj["best_per_k"].items()
        },
        per_problem={
            float(t): {
                task: {cls: int(v) for cls, v in counts.items()}
                for task, counts in by_task.items()
            }
            for t, by_task in obj["per_problem"].items()
        },
        error_averages={k: float(v) for k, v in obj["error_averages"].items()},
        error_averages_unfolded={
            k: float(v) for k, v in obj["error_averages_unfolded"].items()
        },
        proportions={
            float(t): {cls: float(v) for cls, v in classes.items()}
            for t, classes in obj["proportions"].items()
        },
    )


def build_report_from_cells(
    suite: str,
    model_label: str,
    cells: dict[float, dict[str, dict[str, int]]],
    ks: Sequence[int],
) -> SuiteReport:
    """Build the full report from per-(temperature, problem) outcome counts.

    This is the shared core of building from raw results and of merging
    previously saved reports (whose per_problem sections carry the counts)."""
    n = _validate_complete(cells)
    tables: dict[float, dict[int, float]] = {}
    for temp in sorted(cells):
        by_task = cells[temp]
        tables[temp] = {
            k: sum(pass_at_k(n, counts["correct"], k) for counts in by_task.values())
            / len(by_task)
            for k in ks
        }
    breakdown = _breakdown_from_cells(cells)
    return SuiteReport(
        suite=suite,
        model_label=model_label,
        n=n,
        ks=tuple(ks),
        temperatures=tuple(sorted(cells)),
        pass_at_k=tables,
        best_per_k=best_over_temperatures(tables),
        per_problem={t: cells[t] for t in sorted(cells)},
        error_averages=breakdown.folded_averages,
        error_averages_unfolded=breakdown.unfolded_averages,
        proportions=breakdown.proportions,
    )


def build_suite_report(
    suite: str,
    model_label: str,
    results: Sequence[ExecutionResult],
    ks: Sequence[int],
) -> SuiteReport:
    """Aggregate raw execution results into the full report structure."""
    return build_report_from_cells(suite, model_label, _group_cells(results), ks)


def merge_reports(reports: Sequence[SuiteReport]) -> SuiteReport:
    """Combine reports holding disjoint temperature slices of one run."""
    if not reports:
        raise ValueError("no reports to merge")
    head = reports[0]
    cells: dict[float, dict[str, dict[str, int]]] = {}
    for report in reports:
        if report.suite != head.suite:
            raise ValueError("cannot merge reports from different suites")
        if report.n != head.n:
            raise ValueError("cannot merge reports with different n")
        if tuple(report.ks) != tuple(head.ks):
            raise ValueError("cannot merge reports with different k sets")
        for temp, by_task in report.per_problem.items():
            if temp in cells:
                raise ValueError(f"temperature {temp} appears in two reports")
            cells[temp] = by_task
    return build_report_from_cells(head.suite, head.model_label, cells, head.ks)


# -- rendering ---------------------------------------------------------------


def _fmt_pass(value: float) -> str:
    return format(value * 100.0, ".2f")


def _fmt_avg(value: float) -> str:
    return format(value, ".1f")


def _markdown_table(header: list[str], rows: list[list[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


def render_markdown(report: SuiteReport) -> str:
    parts = [f"# {report.model_label} on {report.suite}", ""]

    header = ["pass@k (x100)"] + [f"k={k}" for k in report.ks]
    rows = []
    if report.best_per_k:
        rows.append(
            ["best"] + [_fmt_pass(report.best_per_k[k].value) for k in report.ks]
        )
    for temp in report.temperatures:
        table = report.pass_at_k.get(temp, {})
        rows.append([f"T={temp}"] + [_fmt_pass(table[k]) for k in report.ks])
    parts += ["## pass@k, best over temperatures", "", _markdown_table(header, rows), ""]

    header = ["S (syntax)", "R (runtime)", "T (tests)", "C (correct)"]
    rows = []
    if report.error_averages:
        rows.append([_fmt_avg(report.error_averages[cls]) for cls in FOLDED_CLASSES])
    parts += [
        "## Average outcome counts per problem",
        "",
        _markdown_table(header, rows),
        "",
    ]

    header = ["T"] + list(FOLDED_CLASSES)
    rows = []
    for temp in report.temperatures:
        classes = report.proportions.get(temp)
        if classes is None:
            continue
        rows.append(
            [f"{temp}"] + [format(classes[cls], ".4f") for cls in FOLDED_CLASSES]
        )
    parts += ["## Outcome proportions per temperature", "", _markdown_table(header, rows), ""]
    return "\n".join(parts)


def render_csv(report: SuiteReport) -> str:
    """Tidy long format: one measurement per row, ready for plotting."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["section", "temperature", "k", "class", "value"])
    for temp in report.temperatures:
        for k in report.ks:
            writer.writerow(["pass_at_k", temp, k, "", report.pass_at_k[temp][k]])
    for k in report.ks:
        if k in report.best_per_k:
            best = report.best_per_k[k]
            writer.writerow(["best_pass_at_k", best.temperature, k, "", best.value])
    for cls, value in report.error_averages.items():
        writer.writerow(["error_average", "", "", cls, value])
    for cls, value in report.error_averages_unfolded.items():
        writer.writerow(["error_average_unfolded", "", "", cls, value])
    for temp in report.temperatures:
        for cls, value in report.proportions.get(temp, {}).items():
            writer.writerow(["proportion", temp, "", cls, value])
    return buf.getvalue()


def render_report(report: SuiteReport, fmt: str = "markdown") -> str:
    if fmt == "markdown":
        return render_markdown(report)
    if fmt == "csv":
        return render_csv(report)
    if fmt == "json":
        return json.dumps(report.as_dict(), indent=2, sort_keys=True)
    raise ValueError(f"unknown report format: {fmt}")


def write_report(path: str, report: SuiteReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_report(report, "json"))
        fh.write("\n")


def load_report(path: str) -> SuiteReport:
    with open(path, encoding="utf-8") as fh:
        return report_from_dict(json.load(fh))
