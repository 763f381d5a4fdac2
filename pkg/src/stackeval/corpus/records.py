"""Assemble training records from threads, with modality ablations.

Each record is one thread flattened to text: question title, question body,
then every answer in rank order. Ablation variants strip the answers only:
NO_CODE keeps answer NL text, NO_NL keeps answer code blocks. The question
is always rendered in full so every variant stays anchored to the same
problem statement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from stackeval.corpus.htmltext import SegmentList, strip_html
from stackeval.corpus.threads import QAThread

_TOKEN_RE = re.compile(r"\S+")


class ModalityVariant(Enum):
    FULL = "full"
    NO_CODE = "no_code"
    NO_NL = "no_nl"


def whitespace_token_count(text: str) -> int:
    """Whitespace-delimited token count, the cheap stand-in for a tokenizer."""
    return len(_TOKEN_RE.findall(text))


def render_variant(segments: SegmentList, variant: ModalityVariant) -> str:
    if variant is ModalityVariant.FULL:
        return segments.full_text()
    if variant is ModalityVariant.NO_CODE:
        return "".join(segments.nl_texts())
    if variant is ModalityVariant.NO_NL:
        return "\n".join(segments.code_texts())
    raise ValueError(f"unknown variant: {variant!r}")


@dataclass(frozen=True)
class TrainingRecord:
    question_id: int
    variant: ModalityVariant
    text: str
    approx_tokens: int

    def as_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "variant": self.variant.value,
            "text": self.text,
            "approx_tokens": self.approx_tokens,
        }


def build_record(
    thread: QAThread,
    variant: ModalityVariant = ModalityVariant.FULL,
    separator: str = "\n",
    inline_code_as_code: bool = False,
) -> TrainingRecord:
    """Flatten one thread to a single training record under ``variant``."""
    parts: list[str] = []
    title = thread.question.title.strip()
    if title:
        parts.append(title)
    body = strip_html(thread.question.body_html, inline_code_as_code).full_text()
    if body:
        parts.append(body)
    for answer in thread.answers:
        segments = strip_html(answer.body_html, inline_code_as_code)
        rendered = render_variant(segments, variant)
        if rendered:
            parts.append(rendered)
    text = separator.join(parts)
    return TrainingRecord(
        question_id=thread.question_id,
        variant=variant,
        text=text,
        approx_tokens=whitespace_token_count(text),
    )


def build_records(
    threads: Iterable[QAThread],
    variant: ModalityVariant = ModalityVariant.FULL,
    separator: str = "\n",
    inline_code_as_code: bool = False,
) -> Iterator[TrainingRecord]:
    for thread in threads:
        yield build_record(thread, variant, separator, inline_code_as_code)
