import numpy as np
import pytest
from hypothesis import given

from reasonpath.embedding import (EmbeddingError, Scheme, build_vocabulary, embed_answer, embed_step,
                                  feature_width)

from conftest import bug, bugs, call, run


def two_symbol_vocab(width=4):
    b = bug([run([call(1, "m1"), call(2, "m2")], [])], bug_id="b1")
    return build_vocabulary([b], width=width)


def test_vocabulary_first_appearance_order():
    b = bug([run([call(1, "m1"), call(2, "m2")], ["m2"]), run([call(1, "m1"), call(3, "zz", False)], ["m3", "m2"])])
    vocab = build_vocabulary([b])
    assert vocab.per_bug["b1"] == ("m1", "m2", "m3")
    assert vocab.width == 4


def test_vocabulary_empty_bug_has_reserved_slot_only():
    vocab = build_vocabulary([bug([run([call(0)], [])])])
    assert vocab.per_bug["b1"] == ()
    assert vocab.width == 1


def test_vocabulary_width_is_max_plus_one():
    small = bug([run([call(1, f"s{i}") for i in range(3)])], bug_id="small")
    big = bug([run([call(1, f"s{i}") for i in range(7)])], bug_id="big")
    assert build_vocabulary([small, big]).width == 8


def test_vocabulary_rejects_empty_dataset():
    with pytest.raises(EmbeddingError):
        build_vocabulary([])


def test_unresolved_symbols_excluded():
    vocab = build_vocabulary([bug([run([call(1, "ghost", False), call(1, "m1")])])])
    assert vocab.per_bug["b1"] == ("m1",)


def test_embed_step_function_type_one_hot():
    vocab = two_symbol_vocab()
    assert embed_step(Scheme.F, vocab, "b1", call(2, "m1")).tolist() == [0, 0, 1, 0, 0]


def test_embed_step_shape_only():
    vocab = two_symbol_vocab()
    assert embed_step("s", vocab, "b1", call(4, "m2")).tolist() == [1] * 5
    with pytest.raises(EmbeddingError):
        embed_step("s", vocab, "b1", call(4, "m2"), for_matrix=True)


def test_embed_step_argument_index():
    vocab = two_symbol_vocab()
    assert embed_step("fa", vocab, "b1", call(1, "m2")).tolist() == [0, 1, 0, 0, 0, 0, 1, 0, 0]


def test_embed_step_unresolved_uses_last_slot():
    vocab = two_symbol_vocab()
    vec = embed_step("fa", vocab, "b1", call(1, "nope", False))
    assert vec.tolist() == [0, 1, 0, 0, 0, 0, 0, 0, 1]


def test_embed_step_argumentless_has_zero_argument_part():
    vocab = two_symbol_vocab()
    assert embed_step("faa", vocab, "b1", call(0)).tolist() == [1, 0, 0, 0, 0, 0, 0, 0, 0]


def test_embed_answer_multi_hot():
    vocab = two_symbol_vocab()
    assert embed_answer("faa", vocab, "b1", {"m1", "m2"}).tolist() == [0, 0, 0, 0, 0, 1, 1, 0, 0]
    assert embed_answer("faa", vocab, "b1", set()).tolist() == [0] * 9
    assert embed_answer("s", vocab, "b1", {"m1"}).tolist() == [1] * 5


def test_embed_answer_rejected_without_answer_step():
    vocab = two_symbol_vocab()
    for scheme in ("f", "fa"):
        with pytest.raises(EmbeddingError):
            embed_answer(scheme, vocab, "b1", {"m1"})


def test_scheme_parse_accepts_plus_spelling():
    assert Scheme.parse("F+A+A") is Scheme.FAA
    with pytest.raises(ValueError):
        Scheme.parse("xyz")


@given(bugs())
def test_vector_sums_and_widths(b):
    vocab = build_vocabulary([b])
    for r in b.runs:
        for c in r.steps:
            f = embed_step("f", vocab, b.bug_id, c)
            fa = embed_step("fa", vocab, b.bug_id, c)
            assert f.sum() == 1 and len(f) == feature_width("f", vocab.width)
            assert fa.sum() == (2 if c.argument is not None else 1)
            assert len(fa) == feature_width("fa", vocab.width)


@given(bugs(bug_id="mine"), bugs(bug_id="other"))
def test_other_bugs_only_change_padding(mine, other):
    alone = build_vocabulary([mine])
    together = build_vocabulary([mine, other])
    for r in mine.runs:
        for c in r.steps:
            a = embed_step("fa", alone, "mine", c)
            t = embed_step("fa", together, "mine", c)
            hot_a = {int(i) if i < 5 + alone.width - 1 else "reserved" for i in np.flatnonzero(a)}
            hot_t = {int(i) if i < 5 + together.width - 1 else "reserved" for i in np.flatnonzero(t)}
            assert hot_a == hot_t
