"""Wire-level check against the corpus/eval toolkit's generate command.

The gateway package itself never imports that toolkit; this test drives the
real HTTP boundary between the two.
"""

import json
import threading
import time
from pathlib import Path

import pytest
import torch
import uvicorn
from click.testing import CliRunner

from bytelm import ByteLM, ModelConfig, create_app, save_checkpoint

stackeval_cli = pytest.importorskip("stackeval.cli")

pytestmark = pytest.mark.filterwarnings(
    "ignore:.*suite has.*:UserWarning")

MINI_HUMANEVAL = Path(__file__).parents[2] / "tests" / "fixtures" / "mini_humaneval.jsonl"


@pytest.fixture(scope="module")
def live_gateway(tmp_path_factory):
    # HumanEval-style prompts run a few hundred bytes, so the served model
    # needs a context well past the tiny test config
    torch.manual_seed(7)
    ckpt = tmp_path_factory.mktemp("serve") / "wide.pt"
    save_checkpoint(str(ckpt),
                    ByteLM(ModelConfig(dim=32, heads=2, layers=2,
                                       context=1024)))
    config = uvicorn.Config(create_app(str(ckpt)), host="127.0.0.1", port=0,
                            log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 15
    while not server.started:
        assert time.monotonic() < deadline, "gateway did not start"
        time.sleep(0.05)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=10)


def test_generate_command_fills_every_slot(live_gateway, tmp_path):
    out = tmp_path / "completions.jsonl"
    result = CliRunner().invoke(stackeval_cli.main, [
        "generate", str(MINI_HUMANEVAL),
        "--suite-kind", "humaneval",
        "--gateway", live_gateway,
        "--temperatures", "0.2",
        "--n", "2",
        "--max-new-tokens", "8",
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output

    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 10  # 5 tasks x 2 samples x 1 temperature
    assert not any("error" in row for row in rows)
    triples = {(r["task_id"], r["temperature"], r["sample_index"])
               for r in rows}
    assert len(triples) == 10
    assert all(isinstance(r["text"], str) for r in rows)
