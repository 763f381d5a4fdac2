"""Benchmark task loading, prompt construction, and program assembly.

Two suite flavors are supported. Signature-style tasks prompt with a
function signature plus docstring and verify via a check() harness;
problem-style tasks prompt with an NL statement plus their assert lines and
verify by running those asserts directly. A sampled completion plus the
task's tests assemble into one self-contained program for the sandbox.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

DEFAULT_TEMPERATURES = (0.2, 0.6, 0.8)
DEFAULT_TOP_P = 0.95
DEFAULT_NUM_SAMPLES = 200

# Continuation cutoffs for signature-style completions: the model has
# finished the function once it starts a new top-level block.
DEFAULT_STOP_SEQUENCES = ("\ndef ", "\nclass ", "\nif __name__", "\nprint(")

EXPECTED_SUITE_SIZES = {"humaneval": 164, "mbpp": 500}


class Suite(Enum):
    HUMANEVAL = "humaneval"
    MBPP = "mbpp"


@dataclass(frozen=True)
class EvalTask:
    task_id: str
    suite: Suite
    prompt_body: str
    tests: str = ""
    test_list: tuple[str, ...] = ()
    entry_point: str | None = None
    canonical_solution: str = ""

    def __post_init__(self):
        if self.suite is Suite.HUMANEVAL:
            if not self.entry_point:
                raise ValueError(f"{self.task_id}: signature-style task needs entry_point")
        else:
            if not self.test_list:
                raise ValueError(f"{self.task_id}: problem-style task needs test_list")


@dataclass(frozen=True)
class SamplingConfig:
    temperature: float = 0.6
    top_p: float = DEFAULT_TOP_P
    num_samples: int = DEFAULT_NUM_SAMPLES
    max_new_tokens: int = 256
    stop_sequences: tuple[str, ...] = DEFAULT_STOP_SEQUENCES

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.num_samples < 1:
            raise ValueError("num_samples must be positive")


@dataclass(frozen=True)
class Completion:
    task_id: str
    sample_index: int
    temperature: float
    text: str
    top_p: float = DEFAULT_TOP_P

    def as_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "sample_index": self.sample_index,
            "temperature": self.temperature,
            "top_p": self.top_p,
            "text": self.text,
        }


def load_suite(path: str, suite: Suite) -> list[EvalTask]:
    """Load a task suite from JSONL; fatal on missing fields, tolerant of
    extras. Emits a warning, not an error, when the task count differs from
    the published suite size."""
    tasks: list[EvalTask] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            try:
                if suite is Suite.HUMANEVAL:
                    task = EvalTask(
                        task_id=str(obj["task_id"]),
                        suite=suite,
                        prompt_body=obj["prompt"],
                        tests=obj["test"],
                        entry_point=obj["entry_point"],
                        canonical_solution=obj.get("canonical_solution", ""),
                    )
                else:
                    task = EvalTask(
                        task_id=str(obj["task_id"]),
                        suite=suite,
                        prompt_body=obj["text"],
                        test_list=tuple(obj["test_list"]),
                        canonical_solution=obj.get("code", ""),
                    )
            except KeyError as exc:
                raise ValueError(f"{path}:{lineno}: missing required field {exc}") from None
            tasks.append(task)
    expected = EXPECTED_SUITE_SIZES[suite.value]
    if tasks and len(tasks) != expected:
        warnings.warn(
            f"{suite.value} suite has {len(tasks)} tasks (standard split has {expected})",
            stacklevel=2,
        )
    return tasks


def build_prompt(task: EvalTask, preamble: str = "") -> str:
    """Prompt text for one task. Signature-style prompts are the prompt body
    byte-for-byte; problem-style prompts append the assert lines and end with
    a completion-cue newline."""
    if task.suite is Suite.HUMANEVAL:
        return preamble + task.prompt_body
    return preamble + task.prompt_body + "\n" + "\n".join(task.test_list) + "\n"


def truncate_completion(text: str, stop_sequences: Sequence[str]) -> str:
    """Cut at the earliest occurrence of any stop sequence. Bytes before the
    first occurrence are never altered."""
    cut = len(text)
    for stop in stop_sequences:
        idx = text.find(stop)
        if idx != -1 and idx < cut:
            cut = idx
    return text[:cut]


def default_stop_sequences(suite: Suite) -> tuple[str, ...]:
    # Problem-style completions are whole programs (often module-level defs),
    # so continuation cutoffs would truncate valid code.
    if suite is Suite.HUMANEVAL:
        return DEFAULT_STOP_SEQUENCES
    return ()


def assemble_program(
    task: EvalTask,
    completion_text: str,
    stop_sequences: Sequence[str] | None = None,
) -> str:
    """One self-contained program: completion in place, tests appended."""
    if stop_sequences is None:
        stop_sequences = default_stop_sequences(task.suite)
    body = truncate_completion(completion_text, stop_sequences)
    if task.suite is Suite.HUMANEVAL:
        return f"{task.prompt_body}{body}\n{task.tests}\ncheck({task.entry_point})\n"
    return body + "\n" + "\n".join(task.test_list)


def write_completions(path: str, completions: Iterable[Completion]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for comp in completions:
            fh.write(json.dumps(comp.as_dict()) + "\n")
            count += 1
    return count


def load_completions(path: str) -> list[Completion]:
    completions: list[Completion] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            try:
                completions.append(
                    Completion(
                        task_id=str(obj["task_id"]),
                        sample_index=int(obj["sample_index"]),
                        temperature=float(obj["temperature"]),
                        text=obj["text"],
                        top_p=float(obj.get("top_p", DEFAULT_TOP_P)),
                    )
                )
            except KeyError as exc:
                raise ValueError(f"{path}:{lineno}: missing required field {exc}") from None
    return completions
