"""StackOverflow corpus construction: parse, align, strip, ablate, pack."""

from stackeval.corpus.htmltext import Segment, SegmentKind, SegmentList, strip_html
from stackeval.corpus.packing import (
    DEFAULT_SEPARATOR,
    DEFAULT_WINDOW_SIZE,
    PackedWindow,
    PackStats,
    pack_windows,
)
from stackeval.corpus.posts import DumpCounters, PostKind, RawPost, parse_dump
from stackeval.corpus.records import (
    ModalityVariant,
    TrainingRecord,
    build_record,
    build_records,
    render_variant,
    whitespace_token_count,
)
from stackeval.corpus.stats import CorpusStats, corpus_stats
from stackeval.corpus.threads import (
    AlignCounters,
    QAThread,
    TagRule,
    default_tag_rules,
    filter_and_align,
    sort_answers,
)

__all__ = [
    "AlignCounters",
    "CorpusStats",
    "DEFAULT_SEPARATOR",
    "DEFAULT_WINDOW_SIZE",
    "DumpCounters",
    "ModalityVariant",
    "PackStats",
    "PackedWindow",
    "PostKind",
    "QAThread",
    "RawPost",
    "Segment",
    "SegmentKind",
    "SegmentList",
    "TagRule",
    "TrainingRecord",
    "build_record",
    "build_records",
    "corpus_stats",
    "default_tag_rules",
    "filter_and_align",
    "pack_windows",
    "parse_dump",
    "render_variant",
    "sort_answers",
    "strip_html",
    "whitespace_token_count",
]
