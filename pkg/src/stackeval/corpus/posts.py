"""Streaming parser for StackExchange ``Posts.xml`` dumps.

The dump format is one ``<row .../>`` element per line inside a ``<posts>``
wrapper. We parse line by line so arbitrarily large dumps stream in constant
memory; rows that fail to parse are counted and skipped, never fatal.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Union

QUESTION = 1
ANSWER = 2


class PostKind:
    """PostTypeId values we care about; all others are skipped silently."""

    QUESTION = QUESTION
    ANSWER = ANSWER


@dataclass(frozen=True)
class RawPost:
    id: int
    post_type: int
    body_html: str
    score: int = 0
    title: str = ""
    tags: tuple[str, ...] = ()
    parent_id: int | None = None
    accepted_answer_id: int | None = None
    creation_date: str | None = None

    @property
    def is_question(self) -> bool:
        return self.post_type == QUESTION

    @property
    def is_answer(self) -> bool:
        return self.post_type == ANSWER

    @property
    def creation_order_key(self) -> tuple:
        # Missing dates sort after every dated post; id breaks exact ties.
        return (self.creation_date is None, self.creation_date or "", self.id)


@dataclass
class DumpCounters:
    rows_seen: int = 0
    questions: int = 0
    answers: int = 0
    skipped_rows: int = 0

    def as_dict(self) -> dict:
        return {
            "rows_seen": self.rows_seen,
            "questions": self.questions,
            "answers": self.answers,
            "skipped_rows": self.skipped_rows,
        }


def _parse_tags(raw: str) -> tuple[str, ...]:
    # Dumps use either <a><b> or the newer a|b| form.
    if "<" in raw:
        parts = raw.replace(">", "<").split("<")
    else:
        parts = raw.split("|")
    return tuple(p for p in parts if p)


def _row_to_post(elem: ET.Element) -> RawPost | None:
    """Map one well-formed row element to a RawPost; None means malformed.
    Callers filter out ignored PostTypeIds before getting here."""
    attrs = elem.attrib
    try:
        post_id = int(attrs["Id"])
        post_type = int(attrs["PostTypeId"])
    except (KeyError, ValueError):
        return None
    body = attrs.get("Body", "")
    try:
        score = int(attrs.get("Score", "0"))
    except ValueError:
        score = 0

    parent_id: int | None = None
    accepted_id: int | None = None
    try:
        if "ParentId" in attrs:
            parent_id = int(attrs["ParentId"])
        if "AcceptedAnswerId" in attrs:
            accepted_id = int(attrs["AcceptedAnswerId"])
    except ValueError:
        return None
    if post_type == ANSWER and parent_id is None:
        return None

    # Dumps occasionally carry stray attributes on the wrong row kind;
    # normalize so answers never have title/tags and questions no parent.
    if post_type == ANSWER:
        return RawPost(
            id=post_id,
            post_type=post_type,
            body_html=body,
            score=score,
            parent_id=parent_id,
            creation_date=attrs.get("CreationDate"),
        )
    return RawPost(
        id=post_id,
        post_type=post_type,
        body_html=body,
        score=score,
        title=attrs.get("Title", ""),
        tags=_parse_tags(attrs.get("Tags", "")),
        accepted_answer_id=accepted_id,
        creation_date=attrs.get("CreationDate"),
    )


def parse_dump(
    source: Union[str, IO[str], Iterable[str]],
    counters: DumpCounters | None = None,
) -> Iterator[RawPost]:
    """Yield RawPost for each question/answer row in a Posts.xml stream.

    ``source`` may be a path, an open text file, or any iterable of lines.
    Pass a DumpCounters to collect row statistics while iterating.
    """
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            yield from parse_dump(fh, counters)
        return

    if counters is None:
        counters = DumpCounters()

    for line in source:
        stripped = line.strip()
        if not stripped.startswith("<row"):
            continue
        counters.rows_seen += 1
        try:
            elem = ET.fromstring(stripped)
        except ET.ParseError:
            counters.skipped_rows += 1
            continue
        # Out-of-domain kinds (tag wikis, moderator posts) are not malformed:
        # they pass by without touching skipped_rows.
        kind = elem.attrib.get("PostTypeId")
        if kind is not None and kind not in ("1", "2"):
            continue
        post = _row_to_post(elem)
        if post is None:
            counters.skipped_rows += 1
            continue
        if post.is_question:
            counters.questions += 1
        else:
            counters.answers += 1
        yield post
