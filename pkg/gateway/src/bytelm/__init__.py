"""Byte-level causal language model behind a small HTTP gateway.

The model reads and writes raw UTF-8 bytes (plus one BOS marker), so packed
text corpora feed it directly with no tokenizer. The package covers three
jobs: initialize/save/load checkpoints, fine-tune on packed-window JSONL,
and serve sampled generation over POST /generate + GET /health.
"""

from bytelm.model import (
    BOS,
    VOCAB_SIZE,
    ByteLM,
    ModelConfig,
    load_checkpoint,
    save_checkpoint,
)
from bytelm.sampling import ContextOverflow, generate_texts
from bytelm.corpus import CorpusFormatError, load_window_stream
from bytelm.train import TrainConfig, finetune
from bytelm.service import create_app

__version__ = "0.1.0"

__all__ = [
    "BOS",
    "VOCAB_SIZE",
    "ByteLM",
    "ModelConfig",
    "load_checkpoint",
    "save_checkpoint",
    "ContextOverflow",
    "generate_texts",
    "CorpusFormatError",
    "load_window_stream",
    "TrainConfig",
    "finetune",
    "create_app",
]
