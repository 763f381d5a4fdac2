import json

import pytest
import torch

from bytelm import ByteLM, ModelConfig, save_checkpoint

TINY = ModelConfig(dim=32, heads=2, layers=2, context=128)

SNIPPET = "def add(a, b):\n    return a + b\n\nprint(add(1, 2))\n"


def write_windows(path, texts):
    """Write packed-window JSONL rows with the full wire schema."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, text in enumerate(texts):
            fh.write(json.dumps({
                "window_index": i,
                "text": text,
                "source_question_ids": [i],
                "tokens": len(text.split()),
            }) + "\n")
    return path


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    torch.manual_seed(7)
    path = tmp_path_factory.mktemp("ckpt") / "tiny.pt"
    save_checkpoint(str(path), ByteLM(TINY))
    return str(path)


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "windows.jsonl"
    return str(write_windows(path, [SNIPPET * 8] * 6))
