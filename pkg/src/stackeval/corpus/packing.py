"""Pack training records into fixed-size token windows.

Tokens are whitespace-delimited runs, matched as ``\\S+\\s*`` so every token
carries its trailing whitespace and concatenating a window's tokens
reconstructs the exact input slice. Records are laid end to end with a
separator token between documents, then chunked into windows of exactly
``window_size`` tokens; a final partial window is kept only when it reaches
the minimum fill (half a window by default).

Record text is normalized to end with a newline before packing so documents
never glue to the separator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from stackeval.corpus.records import TrainingRecord

_TOKEN_WS_RE = re.compile(r"\S+\s*")

DEFAULT_WINDOW_SIZE = 1024
DEFAULT_SEPARATOR = "<|endoftext|>"


@dataclass(frozen=True)
class PackedWindow:
    window_index: int
    text: str
    source_question_ids: tuple[int, ...]
    tokens: int

    def as_dict(self) -> dict:
        return {
            "window_index": self.window_index,
            "text": self.text,
            "source_question_ids": list(self.source_question_ids),
            "tokens": self.tokens,
        }


@dataclass
class PackStats:
    records_in: int = 0
    records_empty: int = 0
    windows: int = 0
    tokens_in: int = 0
    tokens_packed: int = 0
    tokens_dropped_tail: int = 0

    def as_dict(self) -> dict:
        return {
            "records_in": self.records_in,
            "records_empty": self.records_empty,
            "windows": self.windows,
            "tokens_in": self.tokens_in,
            "tokens_packed": self.tokens_packed,
            "tokens_dropped_tail": self.tokens_dropped_tail,
        }


def pack_windows(
    records: Iterable[TrainingRecord],
    window_size: int = DEFAULT_WINDOW_SIZE,
    min_fill: int | None = None,
    record_separator: str = DEFAULT_SEPARATOR,
    stats: PackStats | None = None,
) -> Iterator[PackedWindow]:
    """Chunk a record stream into PackedWindows of ``window_size`` tokens."""
    if window_size < 2:
        raise ValueError("window_size must be at least 2")
    if min_fill is None:
        min_fill = window_size // 2
    if not 0 <= min_fill <= window_size:
        raise ValueError("min_fill must be in [0, window_size]")
    if record_separator and not record_separator.strip():
        raise ValueError("record_separator must not be pure whitespace")
    if stats is None:
        stats = PackStats()

    buf: list[str] = []
    buf_qids: list[int] = []
    qid_seen: set[int] = set()
    index = 0

    def note_qid(qid: int) -> None:
        if qid not in qid_seen:
            qid_seen.add(qid)
            buf_qids.append(qid)

    def emit() -> PackedWindow:
        nonlocal index, buf, buf_qids, qid_seen
        window = PackedWindow(
            window_index=index,
            text="".join(buf),
            source_question_ids=tuple(buf_qids),
            tokens=len(buf),
        )
        index += 1
        buf = []
        buf_qids = []
        qid_seen = set()
        stats.windows += 1
        stats.tokens_packed += window.tokens
        return window

    first = True
    for record in records:
        stats.records_in += 1
        text = record.text
        if not text.strip():
            stats.records_empty += 1
            continue
        if not text.endswith(("\n", " ", "\t")):
            text += "\n"
        tokens = _TOKEN_WS_RE.findall(text)
        if record_separator and not first:
            tokens.insert(0, record_separator + "\n")
        first = False
        stats.tokens_in += len(tokens)
        for token in tokens:
            buf.append(token)
            note_qid(record.question_id)
            if len(buf) == window_size:
                yield emit()

    if len(buf) >= min_fill and buf:
        yield emit()
    else:
        stats.tokens_dropped_tail += len(buf)
