"""Group parsed posts into question/answer threads and filter by tag.

Alignment buffers answers until their parent question is seen (dump rows are
not guaranteed parent-before-child), then emits threads in ascending question
id order. Answers whose parent never appears are counted as orphans and
dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from stackeval.corpus.posts import RawPost


@dataclass(frozen=True)
class TagRule:
    """Keep a question when any of its tags matches.

    ``exact`` tags must match whole; ``prefixes`` match any tag that starts
    with the prefix (so "python" also catches "python-3.x", "python-requests").
    """

    exact: tuple[str, ...] = ()
    prefixes: tuple[str, ...] = ("python",)

    def matches(self, tags: Sequence[str]) -> bool:
        for tag in tags:
            if tag in self.exact:
                return True
            for prefix in self.prefixes:
                if tag.startswith(prefix):
                    return True
        return False


def default_tag_rules() -> TagRule:
    return TagRule()


@dataclass
class AlignCounters:
    questions_kept: int = 0
    questions_filtered: int = 0
    orphan_answers: int = 0
    answers_kept: int = 0
    answers_dropped_with_question: int = 0

    def as_dict(self) -> dict:
        return {
            "questions_kept": self.questions_kept,
            "questions_filtered": self.questions_filtered,
            "orphan_answers": self.orphan_answers,
            "answers_kept": self.answers_kept,
            "answers_dropped_with_question": self.answers_dropped_with_question,
        }


@dataclass(frozen=True)
class QAThread:
    question: RawPost
    answers: tuple[RawPost, ...]

    @property
    def question_id(self) -> int:
        return self.question.id


def sort_answers(question: RawPost, answers: Iterable[RawPost]) -> tuple[RawPost, ...]:
    """Accepted answer first, then score descending, ties by age then id."""
    accepted_id = question.accepted_answer_id

    def key(a: RawPost) -> tuple:
        return (a.id != accepted_id, -a.score, a.creation_order_key)

    return tuple(sorted(answers, key=key))


def filter_and_align(
    posts: Iterable[RawPost],
    rule: TagRule | None = None,
    counters: AlignCounters | None = None,
    min_answers: int = 1,
) -> Iterator[QAThread]:
    """Yield tag-matching threads with sorted answers, ascending question id.

    Requires a full pass over ``posts`` before yielding: orphanhood is only
    decidable once the stream ends.
    """
    if rule is None:
        rule = default_tag_rules()
    if counters is None:
        counters = AlignCounters()

    questions: dict[int, RawPost] = {}
    kept_ids: set[int] = set()
    answers: dict[int, list[RawPost]] = {}

    for post in posts:
        if post.is_question:
            questions[post.id] = post
            if rule.matches(post.tags):
                kept_ids.add(post.id)
            else:
                counters.questions_filtered += 1
        elif post.is_answer and post.parent_id is not None:
            answers.setdefault(post.parent_id, []).append(post)

    for parent_id, group in answers.items():
        if parent_id not in questions:
            counters.orphan_answers += len(group)
        elif parent_id not in kept_ids:
            counters.answers_dropped_with_question += len(group)

    for qid in sorted(kept_ids):
        question = questions[qid]
        group = answers.get(qid, [])
        if len(group) < min_answers:
            counters.questions_filtered += 1
            continue
        counters.questions_kept += 1
        counters.answers_kept += len(group)
        yield QAThread(question=question, answers=sort_answers(question, group))
