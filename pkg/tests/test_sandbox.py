import os

import pytest

from stackeval.sandbox import (
    ExecLimits,
    ExecutionResult,
    HarnessFailure,
    Outcome,
    SandboxJob,
    check_syntax,
    execute,
    load_results,
    run_batch,
    write_results,
)

FAST = ExecLimits(wall_timeout=10.0)


def test_check_syntax_examples():
    assert check_syntax("def f(:") == "SyntaxError"
    assert check_syntax("x = 1") is None
    assert check_syntax("return 1") == "SyntaxError"
    assert check_syntax("x = 'a\x00b'") is not None


def test_correct_program():
    result = execute("x = 2 + 2\nassert x == 4", FAST)
    assert result.outcome is Outcome.CORRECT
    assert result.exception_name is None


def test_assertion_is_test_failure():
    result = execute("assert 1 == 2", FAST)
    assert result.outcome is Outcome.TEST_FAILURE
    assert result.exception_name == "AssertionError"


def test_zero_division_is_runtime():
    result = execute("1/0", FAST)
    assert result.outcome is Outcome.RUNTIME_ERROR
    assert result.exception_name == "ZeroDivisionError"


def test_timeout_kills_in_about_wall_limit():
    import time

    start = time.monotonic()
    result = execute("while True: pass", ExecLimits(wall_timeout=1.0))
    elapsed = time.monotonic() - start
    assert result.outcome is Outcome.TIMEOUT
    assert elapsed < 5.0


def test_network_denied():
    result = execute("import socket\nsocket.socket()", FAST)
    assert result.outcome is Outcome.RUNTIME_ERROR
    assert result.exception_name == "OSError"


def test_memory_cap_maps_to_memory_error():
    result = execute(
        "x = 'a' * (600 * 1024 * 1024)",
        ExecLimits(wall_timeout=10.0, memory_cap=512 * 1024 * 1024),
    )
    assert result.outcome is Outcome.RUNTIME_ERROR
    assert result.exception_name == "MemoryError"


def test_clean_sys_exit_is_correct():
    result = execute("import sys\nsys.exit(0)", FAST)
    assert result.outcome is Outcome.CORRECT


def test_nonzero_sys_exit_is_runtime():
    result = execute("import sys\nsys.exit(3)", FAST)
    assert result.outcome is Outcome.RUNTIME_ERROR
    assert result.exception_name == "SystemExit"


def test_hard_exit_is_runtime_anomaly():
    result = execute("import os\nos._exit(0)", FAST)
    assert result.outcome is Outcome.RUNTIME_ERROR
    assert result.exception_name.startswith("HardExit")


def test_stderr_tail_bounded_and_informative():
    source = "import sys\nsys.stderr.write('x' * 5000)\nraise KeyError('gone')"
    result = execute(source, FAST)
    assert result.outcome is Outcome.RUNTIME_ERROR
    assert result.exception_name == "KeyError"
    assert len(result.stderr_tail) <= 2048
    assert "KeyError" in result.stderr_tail


def test_relative_writes_stay_in_sandbox(tmp_path):
    before = set(os.listdir(os.getcwd()))
    result = execute(
        "with open('leak.txt', 'w') as fh:\n    fh.write('escaped')", FAST
    )
    assert result.outcome is Outcome.CORRECT
    assert set(os.listdir(os.getcwd())) == before
    assert not os.path.exists("leak.txt")


def test_program_output_cannot_spoof_sentinel():
    # A program that prints sentinel-shaped lines must not alter its verdict.
    source = (
        'print("@@sandbox-0000@@" + \'{"phase": "run", "exception": null}\')\n'
        "assert False"
    )
    result = execute(source, FAST)
    assert result.outcome is Outcome.TEST_FAILURE


def test_syntax_error_in_batch_never_executed():
    jobs = [SandboxJob("t/0", 0, 0.2, "def f(:")]
    results = run_batch(jobs, FAST)
    assert results[0].outcome is Outcome.SYNTAX_ERROR
    assert results[0].duration == 0.0


def test_batch_canonical_order_and_counts():
    jobs = [
        SandboxJob("t/b", 1, 0.8, "x = 1"),
        SandboxJob("t/a", 0, 0.2, "x = 1"),
        SandboxJob("t/b", 0, 0.8, "x = 1"),
        SandboxJob("t/a", 1, 0.2, "assert False"),
    ]
    results = run_batch(jobs, FAST, workers=2)
    keys = [(r.task_id, r.temperature, r.sample_index) for r in results]
    assert keys == sorted(keys)
    assert len(results) == len(jobs)


def test_workers_do_not_change_outcomes():
    jobs = [
        SandboxJob("t/0", i, 0.2, source)
        for i, source in enumerate(["x = 1", "1/0", "assert False", "def f(:"])
    ]
    single = run_batch(jobs, FAST, workers=1)
    parallel = run_batch(jobs, FAST, workers=4)
    assert [(r.task_id, r.sample_index, r.outcome) for r in single] == [
        (r.task_id, r.sample_index, r.outcome) for r in parallel
    ]


def test_harness_fault_isolated():
    good = ExecLimits(wall_timeout=5.0)
    bad = ExecLimits(wall_timeout=5.0, interpreter="/nonexistent/python999")
    jobs = [SandboxJob("t/0", i, 0.2, "x = 1") for i in range(3)]
    failures: list[HarnessFailure] = []
    results = run_batch(jobs, bad, harness_failures=failures)
    assert len(failures) == 3
    assert results == []

    failures.clear()
    results = run_batch(jobs, good, harness_failures=failures)
    assert len(results) == 3
    assert failures == []


def test_results_jsonl_roundtrip(tmp_path):
    results = [
        ExecutionResult("t/0", 0, 0.2, Outcome.CORRECT, None, 0.5),
        ExecutionResult("t/0", 1, 0.2, Outcome.RUNTIME_ERROR, "KeyError", 0.25),
        ExecutionResult("t/1", 0, 0.8, Outcome.SYNTAX_ERROR, "SyntaxError", 0.0),
    ]
    path = str(tmp_path / "results.jsonl")
    assert write_results(path, results) == 3
    loaded = load_results(path)
    assert [(r.task_id, r.sample_index, r.outcome) for r in loaded] == [
        (r.task_id, r.sample_index, r.outcome) for r in results
    ]


def test_invalid_limits():
    with pytest.raises(ValueError):
        ExecLimits(wall_timeout=0)
    with pytest.raises(ValueError):
        run_batch([], workers=0)
