import pytest
from hypothesis import given, strategies as st

from stackeval.corpus import (
    AlignCounters,
    RawPost,
    TagRule,
    filter_and_align,
    parse_dump,
    sort_answers,
)


def question(qid, tags=("python",), accepted=None, date=None):
    return RawPost(
        id=qid,
        post_type=1,
        body_html="<p>q</p>",
        title=f"Q{qid}",
        tags=tuple(tags),
        accepted_answer_id=accepted,
        creation_date=date,
    )


def answer(aid, parent, score=0, date=None):
    return RawPost(
        id=aid,
        post_type=2,
        body_html="<p>a</p>",
        score=score,
        parent_id=parent,
        creation_date=date,
    )


def test_accepted_first_then_score_then_creation():
    q = question(1, accepted=7)
    answers = [
        answer(5, 1, score=10, date="2020-01-05"),
        answer(7, 1, score=2, date="2020-01-01"),
        answer(9, 1, score=10, date="2020-01-09"),
    ]
    assert [a.id for a in sort_answers(q, answers)] == [7, 5, 9]


def test_no_accepted_pure_score_order():
    q = question(1)
    answers = [
        answer(11, 1, score=3),
        answer(12, 1, score=1),
        answer(13, 1, score=2),
    ]
    assert [a.id for a in sort_answers(q, answers)] == [11, 13, 12]


def test_single_answer_unchanged():
    q = question(1)
    answers = [answer(2, 1, score=4)]
    assert [a.id for a in sort_answers(q, answers)] == [2]


def test_missing_accepted_id_treated_as_none():
    q = question(1, accepted=999)
    answers = [answer(2, 1, score=1), answer(3, 1, score=5)]
    assert [a.id for a in sort_answers(q, answers)] == [3, 2]


def test_equal_score_equal_date_breaks_by_id():
    q = question(1)
    answers = [
        answer(8, 1, score=2, date="2020-06-01"),
        answer(4, 1, score=2, date="2020-06-01"),
    ]
    assert [a.id for a in sort_answers(q, answers)] == [4, 8]


@given(
    st.lists(
        st.tuples(st.integers(0, 5), st.sampled_from([None, "2020-01", "2021-07"])),
        min_size=1,
        max_size=8,
    )
)
def test_sort_is_idempotent_permutation(specs):
    q = question(1)
    answers = [
        answer(i + 10, 1, score=score, date=date)
        for i, (score, date) in enumerate(specs)
    ]
    once = sort_answers(q, answers)
    twice = sort_answers(q, once)
    assert once == twice
    assert sorted(a.id for a in once) == sorted(a.id for a in answers)
    scores = [a.score for a in once]
    assert scores == sorted(scores, reverse=True)


def test_tag_rule_exact_and_prefix():
    rule = TagRule(exact=("numpy",), prefixes=("python",))
    assert rule.matches(["python"])
    assert rule.matches(["python-3.x"])
    assert rule.matches(["java", "numpy"])
    assert not rule.matches(["java", "c++"])
    assert not rule.matches([])


def test_fixture_alignment(fixture_dir):
    import os

    counters = AlignCounters()
    threads = list(
        filter_and_align(
            parse_dump(os.path.join(fixture_dir, "mini_dump.xml")),
            counters=counters,
        )
    )
    assert [t.question_id for t in threads] == [1, 5, 11, 14, 17]
    orders = {t.question_id: [a.id for a in t.answers] for t in threads}
    assert orders == {
        1: [3, 2, 4],   # accepted first, then the score-5 tie by creation date
        5: [7, 6],
        11: [12, 20],
        14: [16, 15],   # equal scores, earlier creation wins
        17: [18, 19],   # accepted beats a higher-scored rival
    }
    assert counters.questions_kept == 5
    assert counters.questions_filtered == 2  # java-tagged + zero-answer
    assert counters.orphan_answers == 1
    assert counters.answers_kept == 11
    assert counters.answers_dropped_with_question == 1
    for thread in threads:
        for a in thread.answers:
            assert a.parent_id == thread.question_id


def test_answers_arriving_before_question():
    posts = [
        answer(2, 1, score=1),
        answer(3, 1, score=5),
        question(1),
    ]
    threads = list(filter_and_align(posts))
    assert len(threads) == 1
    assert [a.id for a in threads[0].answers] == [3, 2]


def test_min_answers_threshold():
    posts = [question(1), answer(2, 1), question(3), answer(4, 3), answer(5, 3)]
    threads = list(filter_and_align(posts, min_answers=2))
    assert [t.question_id for t in threads] == [3]
