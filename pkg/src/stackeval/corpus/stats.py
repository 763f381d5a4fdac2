"""Corpus-level accounting: question/answer/record counts and token totals.

Token totals use each record's approx_tokens by default (the whitespace
proxy). For exact subword accounting, pass ``token_counts`` mapping
(question_id, variant) to an externally computed count; records missing from
the mapping fall back to the proxy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from stackeval.corpus.records import TrainingRecord


@dataclass(frozen=True)
class CorpusStats:
    question_count: int
    answer_count: int
    record_count: int
    total_approx_tokens: int
    skipped_rows: int

    def as_dict(self) -> dict:
        return {
            "question_count": self.question_count,
            "answer_count": self.answer_count,
            "record_count": self.record_count,
            "total_approx_tokens": self.total_approx_tokens,
            "skipped_rows": self.skipped_rows,
        }


def corpus_stats(
    records: Iterable[TrainingRecord],
    answer_count: int = 0,
    skipped_rows: int = 0,
    token_counts: Mapping[tuple[int, str], int] | None = None,
) -> CorpusStats:
    """Tally a record stream. answer_count/skipped_rows come from the
    alignment and parse counters since records no longer carry them."""
    question_ids: set[int] = set()
    record_count = 0
    total = 0
    for record in records:
        question_ids.add(record.question_id)
        record_count += 1
        if token_counts is not None:
            total += token_counts.get(
                (record.question_id, record.variant.value), record.approx_tokens
            )
        else:
            total += record.approx_tokens
    return CorpusStats(
        question_count=len(question_ids),
        answer_count=answer_count,
        record_count=record_count,
        total_approx_tokens=total,
        skipped_rows=skipped_rows,
    )
