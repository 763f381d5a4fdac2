import json

import pytest

from stackeval import tasks
from stackeval.tasks import (
    Completion,
    EvalTask,
    SamplingConfig,
    Suite,
    assemble_program,
    build_prompt,
    load_completions,
    load_suite,
    truncate_completion,
    write_completions,
)


def test_load_humaneval_fixture(fixture_dir):
    import os

    with pytest.warns(UserWarning, match="164"):
        suite = load_suite(os.path.join(fixture_dir, "mini_humaneval.jsonl"),
                           Suite.HUMANEVAL)
    assert len(suite) == 5
    task = suite[0]
    assert task.task_id == "Mini/0"
    assert task.entry_point == "add2"
    assert task.prompt_body.startswith("def add2")
    assert "check(candidate)" in task.tests


def test_load_mbpp_fixture(fixture_dir):
    import os

    with pytest.warns(UserWarning, match="500"):
        suite = load_suite(os.path.join(fixture_dir, "mini_mbpp.jsonl"), Suite.MBPP)
    assert len(suite) == 5
    task = suite[0]
    assert task.suite is Suite.MBPP
    assert len(task.test_list) == 3
    assert all(line.startswith("assert ") for line in task.test_list)


def test_missing_field_fatal_with_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    lines = [
        {"task_id": "a/1", "prompt": "def f():\n", "test": "def check(c): pass",
         "entry_point": "f"},
        {"task_id": "a/2", "prompt": "def g():\n", "test": "def check(c): pass"},
    ]
    path.write_text("\n".join(json.dumps(obj) for obj in lines) + "\n")
    with pytest.raises(ValueError, match=":2:"):
        load_suite(str(path), Suite.HUMANEVAL)


def test_extra_fields_ignored(tmp_path):
    path = tmp_path / "extra.jsonl"
    obj = {"task_id": "a/1", "prompt": "def f():\n", "test": "def check(c): pass",
           "entry_point": "f", "novel_field": 42}
    path.write_text(json.dumps(obj) + "\n")
    with pytest.warns(UserWarning, match="164"):
        suite = load_suite(str(path), Suite.HUMANEVAL)
    assert suite[0].task_id == "a/1"


def he_task(**kwargs):
    base = dict(
        task_id="t/0",
        suite=Suite.HUMANEVAL,
        prompt_body='def f(x):\n    """Doc."""\n',
        tests="def check(candidate):\n    assert candidate(1) == 2\n",
        entry_point="f",
    )
    base.update(kwargs)
    return EvalTask(**base)


def mbpp_task(**kwargs):
    base = dict(
        task_id="m/0",
        suite=Suite.MBPP,
        prompt_body="Write a function f(x) that adds one.",
        test_list=("assert f(1) == 2", "assert f(0) == 1", "assert f(-1) == 0"),
    )
    base.update(kwargs)
    return EvalTask(**base)


def test_humaneval_prompt_is_body_verbatim():
    task = he_task()
    assert build_prompt(task) == task.prompt_body


def test_mbpp_prompt_contains_asserts_in_order():
    task = mbpp_task()
    prompt = build_prompt(task)
    assert prompt.startswith(task.prompt_body)
    positions = [prompt.find(line) for line in task.test_list]
    assert -1 not in positions
    assert positions == sorted(positions)
    assert prompt.endswith("\n")


def test_preamble_prefixes_prompt():
    preamble = "Solve the following problem:\n"
    assert build_prompt(he_task(), preamble).startswith(preamble)
    assert build_prompt(mbpp_task(), preamble).startswith(preamble)


def test_truncation_at_earliest_stop():
    text = "    return x + 1\ndef extra():"
    out = truncate_completion(text, ("\ndef ", "\nclass "))
    assert "return x + 1" in out
    assert "extra" not in out
    # Bytes before the first stop are untouched.
    assert out == text[: text.find("\ndef ")]


def test_truncation_without_stops_is_identity():
    text = "anything\ngoes here"
    assert truncate_completion(text, ()) == text


def test_assemble_humaneval_shape():
    task = he_task()
    program = assemble_program(task, "    return x + 1\ndef extra():")
    assert program.startswith(task.prompt_body)
    assert "extra" not in program
    assert program.rstrip().endswith("check(f)")
    compile(program, "<t>", "exec")


def test_assemble_mbpp_shape():
    task = mbpp_task()
    completion = "def f(x):\n    return x + 1"
    program = assemble_program(task, completion)
    assert program.startswith(completion)
    for line in task.test_list:
        assert line in program
    compile(program, "<t>", "exec")


def test_assemble_empty_completion_still_a_program():
    program = assemble_program(he_task(), "")
    assert "check(f)" in program


def test_mbpp_default_stops_keep_module_level_defs():
    task = mbpp_task()
    completion = "def f(x):\n    return x + 1\ndef helper():\n    return 0"
    program = assemble_program(task, completion)
    assert "helper" in program


def test_completions_roundtrip(tmp_path):
    path = str(tmp_path / "c.jsonl")
    completions = [
        Completion("t/0", 0, 0.2, "body a"),
        Completion("t/0", 1, 0.2, "body b", top_p=0.9),
        Completion("t/1", 0, 0.8, ""),
    ]
    assert write_completions(path, completions) == 3
    assert load_completions(path) == completions


def test_sampling_config_validation():
    SamplingConfig(temperature=0.0, top_p=1.0, num_samples=1)
    with pytest.raises(ValueError):
        SamplingConfig(temperature=-0.1)
    with pytest.raises(ValueError):
        SamplingConfig(top_p=0.0)
    with pytest.raises(ValueError):
        SamplingConfig(num_samples=0)


def test_task_invariants_enforced():
    with pytest.raises(ValueError):
        he_task(entry_point=None)
    with pytest.raises(ValueError):
        mbpp_task(test_list=())


def test_default_grid_constants():
    assert tasks.DEFAULT_TEMPERATURES == (0.2, 0.6, 0.8)
    assert tasks.DEFAULT_TOP_P == 0.95
    assert tasks.DEFAULT_NUM_SAMPLES == 200
