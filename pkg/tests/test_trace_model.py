import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reasonpath import trace_model as tm
from reasonpath.trace_model import TraceError

from conftest import bug, bugs, call, run


def minimal_doc(**over):
    doc = {
        "R": 2, "N": 10, "functions": {"a": 0, "b": 1},
        "bugs": [{
            "bug_id": "x-1", "dataset": "bugsinpy", "ground_truth": "m",
            "runs": [
                {"steps": [{"function": 1, "argument": "m", "resolved": True}], "answer": ["m"]},
                {"steps": [{"function": 0, "argument": None, "resolved": True}], "answer": []},
            ],
        }],
    }
    doc.update(over)
    return doc


def test_ingest_minimal_record(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps(minimal_doc()))
    ds = tm.ingest(p)
    assert len(ds.bugs) == 1
    assert ds.bugs[0].R == 2
    assert ds.bugs[0].runs[0].steps[0] == tm.FunctionCall(1, "m", True)
    assert ds.header.functions == {"a": 0, "b": 1}


def test_too_many_steps_names_the_run():
    doc = minimal_doc()
    doc["bugs"][0]["runs"][1]["steps"] = [{"function": 0, "argument": None, "resolved": True}] * 11
    with pytest.raises(TraceError, match=r"x-1.*run 1 has 11 steps"):
        tm.parse(doc)


def test_run_count_must_match_header():
    with pytest.raises(TraceError, match="runs"):
        tm.parse(minimal_doc(R=3))


def test_function_type_out_of_range():
    doc = minimal_doc()
    doc["bugs"][0]["runs"][0]["steps"][0]["function"] = 5
    with pytest.raises(TraceError, match="function"):
        tm.parse(doc)


@pytest.mark.parametrize("mutate, fieldname", [
    (lambda b: b.update(dataset="other"), "dataset"),
    (lambda b: b.pop("ground_truth"), "ground_truth"),
    (lambda b: b["runs"][0].update(answer=["m", "m"]), "answer"),
    (lambda b: b["runs"][0]["steps"][0].update(argument=None, resolved=False), "resolved"),
    (lambda b: b["runs"][0]["steps"][0].pop("resolved"), "steps"),
])
def test_malformed_records_name_bug_and_field(mutate, fieldname):
    doc = minimal_doc()
    mutate(doc["bugs"][0])
    with pytest.raises(TraceError) as exc:
        tm.parse(doc)
    assert exc.value.bug_id == "x-1"
    assert fieldname in exc.value.field


def test_duplicate_bug_ids_rejected():
    doc = minimal_doc()
    doc["bugs"].append(doc["bugs"][0])
    with pytest.raises(TraceError, match="duplicate"):
        tm.parse(doc)


def test_round_trip_preserves_bytes(tmp_path):
    ds = tm.parse(minimal_doc())
    text = tm.serialize(ds)
    assert tm.serialize(tm.parse(json.loads(text))) == text


def test_vote_scores_split_answers():
    b = bug([run(answer=["a"]), run(answer=["a", "b"])])
    assert tm.vote_scores(b) == {"a": Fraction(3, 4), "b": Fraction(1, 4)}


def test_vote_scores_unanimous():
    b = bug([run(answer=["a"])] * 10)
    assert tm.vote_scores(b) == {"a": 1}
    assert tm.confidence(tm.vote_scores(b)) == 1


def test_empty_answers_carry_no_mass():
    b = bug([run(answer=[]), run(answer=["b"])])
    assert tm.vote_scores(b) == {"b": Fraction(1, 2)}


def test_confidence():
    assert tm.confidence({"a": Fraction(3, 4), "b": Fraction(1, 4)}) == Fraction(3, 4)
    assert tm.confidence({}) == 0


def test_label_strict_top():
    assert tm.label(bug([run(answer=["a"]), run(answer=["a", "b"])], gt="a"))
    assert not tm.label(bug([run(answer=["a"]), run(answer=["b"])], gt="a"))
    assert not tm.label(bug([run(answer=["b"]), run(answer=["b"])], gt="a"))
    assert not tm.label(bug([run(), run()], gt="a"))


@pytest.mark.parametrize("tally, expected", [
    ({"a": Fraction(3, 4)}, True),
    ({"a": Fraction(1, 2), "b": Fraction(1, 2)}, True),
    ({}, False),
])
def test_classify_by_confidence(tally, expected):
    assert tm.classify_by_confidence(tally, 0.5) is expected


def test_truncate():
    b = bug([run([call(1, "x"), call(2, "y")], ["a"]), run([call(0)] * 4, ["b"])])
    t = tm.truncate(b, 3, N=10)
    assert [len(r.steps) for r in t.runs] == [2, 3]
    assert all(r.answer == () for r in t.runs)
    assert all(len(r.steps) == 0 for r in tm.truncate(b, 0).runs)
    assert tm.truncate(b, 10, N=10).runs[1].steps == b.runs[1].steps
    with pytest.raises(ValueError):
        tm.truncate(b, 11, N=10)


@given(bugs())
def test_vote_mass_conservation(b):
    answered = sum(1 for r in b.runs if r.answer)
    assert sum(tm.vote_scores(b).values()) == Fraction(answered, b.R)


@given(bugs())
def test_confidence_one_iff_unanimous_singletons(b):
    unanimous = all(len(r.answer) == 1 for r in b.runs) and len({r.answer for r in b.runs}) == 1
    assert (tm.confidence(tm.vote_scores(b)) == 1) == unanimous


@given(bugs(), st.randoms(use_true_random=False))
def test_label_permutation_invariant(b, rnd):
    runs = list(b.runs)
    rnd.shuffle(runs)
    assert tm.label(b) == tm.label(tm.BugTrace(b.bug_id, b.dataset, b.ground_truth, tuple(runs)))


@settings(max_examples=50)
@given(st.lists(bugs(R=3), min_size=1, max_size=4))
def test_ingest_serialize_identity(bug_list):
    bug_list = [tm.BugTrace(f"b{i}", b.dataset, b.ground_truth, b.runs) for i, b in enumerate(bug_list)]
    ds = tm.TraceDataset(tm.TraceHeader(3, 6, {"f": 0}), tuple(bug_list))
    assert tm.parse(json.loads(tm.serialize(ds))) == ds
