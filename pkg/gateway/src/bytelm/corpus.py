"""Packed-window JSONL -> one long training stream of byte tokens.

Each input line must carry the packed-window schema (window_index, text,
source_question_ids, tokens). The whole file is validated before any tensor
is built, so schema problems are fatal before training starts.
"""

from __future__ import annotations

import json

import torch

from bytelm.model import BOS

REQUIRED_KEYS = frozenset({"window_index", "text", "source_question_ids",
                           "tokens"})


class CorpusFormatError(ValueError):
    pass


def load_window_stream(path: str) -> torch.Tensor:
    texts: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: not JSON: {exc}")
            if not isinstance(obj, dict):
                raise CorpusFormatError(f"{path}:{lineno}: row is not an object")
            missing = REQUIRED_KEYS - obj.keys()
            if missing:
                raise CorpusFormatError(
                    f"{path}:{lineno}: missing fields {sorted(missing)}")
            if not isinstance(obj["text"], str):
                raise CorpusFormatError(f"{path}:{lineno}: text is not a string")
            texts.append(obj["text"])
    if not texts:
        raise CorpusFormatError(f"{path}: no windows found")

    token_ids: list[int] = []
    for text in texts:
        token_ids.append(BOS)
        token_ids.extend(text.encode("utf-8"))
    return torch.tensor(token_ids, dtype=torch.long)
