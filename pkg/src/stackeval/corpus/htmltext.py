"""Strip StackOverflow HTML bodies into an ordered list of NL and code segments.

Block code (``<pre><code>...</code></pre>``) becomes CODE segments with the
inner text preserved byte-for-byte (entities unescaped, no re-indentation).
Everything else becomes NL text with tags removed and block boundaries
rendered as a newline. Inline ``<code>`` spans stay inside the surrounding NL
text by default; ``inline_code_as_code=True`` promotes them to CODE segments.

Malformed HTML degrades to best-effort extraction and never raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from html.parser import HTMLParser
from typing import Iterator


class SegmentKind(Enum):
    NL = "nl"
    CODE = "code"


@dataclass(frozen=True)
class Segment:
    kind: SegmentKind
    text: str


@dataclass(frozen=True)
class SegmentList:
    """Ordered NL/CODE alternation extracted from one HTML body.

    Invariant: no two consecutive segments are both NL (the extractor merges
    them), and concatenating all texts in order is the full rendering.
    """

    segments: tuple[Segment, ...] = ()

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def full_text(self) -> str:
        return "".join(seg.text for seg in self.segments)

    def code_texts(self) -> list[str]:
        return [seg.text for seg in self.segments if seg.kind is SegmentKind.CODE]

    def nl_texts(self) -> list[str]:
        return [seg.text for seg in self.segments if seg.kind is SegmentKind.NL]


# Tags whose close (or occurrence, for voids) marks a block boundary in the
# NL rendering. <pre> is deliberately absent: its content is handled as a
# CODE segment and must not grow a trailing NL newline.
_NEWLINE_ON_END = {
    "p",
    "li",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "blockquote",
    "div",
    "tr",
}
_NEWLINE_VOIDS = {"br", "hr"}
_SUPPRESSED = {"script", "style"}


class _SegmentExtractor(HTMLParser):
    def __init__(self, inline_code_as_code: bool = False):
        super().__init__(convert_charrefs=True)
        self.inline_code_as_code = inline_code_as_code
        self._segments: list[Segment] = []
        self._nl_parts: list[str] = []
        self._code_parts: list[str] = []
        self._pre_depth = 0
        self._code_depth = 0
        self._suppress_depth = 0
        self._in_code_block = False

    # -- segment assembly -------------------------------------------------

    def _flush_nl(self) -> None:
        if not self._nl_parts:
            return
        text = "".join(self._nl_parts)
        self._nl_parts = []
        if not text:
            return
        if self._segments and self._segments[-1].kind is SegmentKind.NL:
            prev = self._segments.pop()
            text = prev.text + text
        self._segments.append(Segment(SegmentKind.NL, text))

    def _begin_code(self) -> None:
        self._flush_nl()
        self._in_code_block = True
        self._code_parts = []

    def _end_code(self) -> None:
        text = "".join(self._code_parts)
        self._in_code_block = False
        self._code_parts = []
        if text:
            self._segments.append(Segment(SegmentKind.CODE, text))

    def _emit_newline(self) -> None:
        self._nl_parts.append("\n")

    # -- parser callbacks --------------------------------------------------

    def handle_starttag(self, tag: str, attrs) -> None:
        if tag in _SUPPRESSED:
            self._suppress_depth += 1
            return
        if tag in _NEWLINE_VOIDS:
            if not self._in_code_block:
                self._emit_newline()
            return
        if tag == "pre":
            self._pre_depth += 1
            return
        if tag == "code":
            self._code_depth += 1
            if self._code_depth == 1 and not self._in_code_block:
                if self._pre_depth > 0 or self.inline_code_as_code:
                    self._begin_code()

    def handle_startendtag(self, tag: str, attrs) -> None:
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag: str) -> None:
        if tag in _SUPPRESSED:
            self._suppress_depth = max(0, self._suppress_depth - 1)
            return
        if tag == "pre":
            self._pre_depth = max(0, self._pre_depth - 1)
            # unclosed <code> inside a closed <pre> still ends the block
            if self._in_code_block and self._code_depth == 0:
                self._end_code()
            return
        if tag == "code":
            self._code_depth = max(0, self._code_depth - 1)
            if self._code_depth == 0 and self._in_code_block:
                self._end_code()
            return
        if tag in _NEWLINE_ON_END and not self._in_code_block:
            self._emit_newline()

    def handle_data(self, data: str) -> None:
        if self._suppress_depth > 0:
            return
        if self._in_code_block:
            self._code_parts.append(data)
        else:
            self._nl_parts.append(data)

    # -- result ------------------------------------------------------------

    def result(self) -> SegmentList:
        self.close()
        if self._in_code_block:
            self._end_code()
        self._flush_nl()
        return SegmentList(tuple(self._segments))


def strip_html(body_html: str, inline_code_as_code: bool = False) -> SegmentList:
    """Extract ordered NL/CODE segments from a StackOverflow HTML body."""
    extractor = _SegmentExtractor(inline_code_as_code=inline_code_as_code)
    extractor.feed(body_html)
    return extractor.result()
