import json
import re

import pytest

from reasonpath import cli
from reasonpath import trace_model as tm
from reasonpath.synth import SynthConfig, generate
from reasonpath.trace_model import BugTrace, ReasoningRun

SMALL = {"scheme": "fa", "model": "gcn", "folds": 3,
         "hyperparameters": {"layers": 2, "hidden_dim": 8, "batch": 8, "dropout": 0.3, "epochs": 4}}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "synth.json").write_text(json.dumps({"n_bugs": 36, "seed": 2}))
    assert cli.main(["synth", "--config", str(d / "synth.json"), "--out", str(d)]) == 0
    (d / "small.json").write_text(json.dumps(SMALL))
    (d / "small_faa.json").write_text(json.dumps({**SMALL, "scheme": "faa"}))
    return d


def test_validate_ok(workdir, capsys):
    assert cli.main(["validate", str(workdir / "traces.json")]) == 0
    assert re.search(r"36 bugs OK", capsys.readouterr().out)


def test_validate_names_bad_bug(tmp_path, capsys):
    doc = tm.to_document(generate(SynthConfig(n_bugs=3)))
    doc["bugs"][1]["runs"][0]["steps"] = [{"function": 1, "argument": "x", "resolved": True}] * 11
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    assert cli.main(["validate", str(tmp_path / "bad.json")]) == 1
    assert "synth-00001" in capsys.readouterr().err


def test_unknown_subcommand_and_flag(capsys):
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["validate", "x.json", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_help_lists_every_flag(capsys):
    parser = cli.build_parser()
    for name, sub in parser._subparsers._group_actions[0].choices.items():
        text = sub.format_help()
        for action in sub._actions:
            for opt in action.option_strings:
                assert opt in text, (name, opt)
            if action.option_strings and action.dest != "help":
                assert action.help, (name, action.dest)


def test_synth_is_deterministic(tmp_path):
    assert cli.main(["synth", "--out", str(tmp_path / "a"), "--seed", "4"]) == 0
    assert cli.main(["synth", "--out", str(tmp_path / "b"), "--seed", "4"]) == 0
    assert (tmp_path / "a/traces.json").read_bytes() == (tmp_path / "b/traces.json").read_bytes()


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("LACHESIS_SEED", "4")
    assert cli.main(["synth", "--out", str(tmp_path / "env")]) == 0
    assert cli.main(["synth", "--out", str(tmp_path / "flag"), "--seed", "4"]) == 0
    assert (tmp_path / "env/traces.json").read_bytes() == (tmp_path / "flag/traces.json").read_bytes()
    monkeypatch.setenv("LACHESIS_SEED", "nope")
    assert cli.main(["synth", "--out", str(tmp_path / "bad")]) == 2


@pytest.fixture(scope="module")
def trained(workdir):
    out = workdir / "run"
    assert cli.main(["train", "--config", str(workdir / "small.json"), "--traces", str(workdir / "traces.json"),
                     "--out", str(out), "--seed", "3"]) == 0
    return out


def test_train_writes_artifacts(trained):
    for name in ("metrics.json", "metrics.csv", "roc.csv", "checkpoint.json"):
        assert (trained / name).exists()
    report = json.loads((trained / "metrics.json").read_text())
    assert report["config"]["seed"] == 3
    assert len(report["folds"]) == 3
    rows = (trained / "metrics.csv").read_text().splitlines()
    assert rows[0] == "method,fold,accuracy,roc_auc,precision,recall"
    assert rows[-2].startswith("gcn-fa,mean,") and rows[-1].startswith("gcn-fa,pooled,")
    assert (trained / "roc.csv").read_text().startswith("fold,fpr,tpr,threshold\n")


def test_train_bad_config_exit_2(workdir, tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"scheme": "s", "model": "lstm"}))
    assert cli.main(["train", "--config", str(tmp_path / "c.json"), "--traces", str(workdir / "traces.json")]) == 2


def test_eval_scores_every_bug(workdir, trained, tmp_path, capsys):
    assert cli.main(["eval", "--checkpoint", str(trained / "checkpoint.json"),
                     "--traces", str(workdir / "traces.json"), "--out", str(tmp_path)]) == 0
    assert "36 bugs scored" in capsys.readouterr().out
    assert len((tmp_path / "scores.csv").read_text().splitlines()) == 37


def test_baseline_rows(workdir, tmp_path, capsys):
    assert cli.main(["baseline", "--traces", str(workdir / "traces.json"), "--threshold", "0.5",
                     "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "AutoFL Conf." in out and "Baseline" in out
    rep = json.loads((tmp_path / "baseline.json").read_text())
    assert rep["all_positive"]["recall"] == 1.0


def test_gradcheck_command(capsys):
    assert cli.main(["gradcheck", "--model", "gcn", "--configs", "2"]) == 0
    assert "passed" in capsys.readouterr().out


class _Untouchable(tuple):
    def _boom(self, *a):
        raise AssertionError("answer field was read in prefix mode")

    __iter__ = __len__ = __getitem__ = __contains__ = __bool__ = _boom


def _poisoned(bug):
    runs = []
    for r in bug.runs:
        pr = object.__new__(ReasoningRun)
        object.__setattr__(pr, "steps", r.steps)
        object.__setattr__(pr, "answer", _Untouchable())
        runs.append(pr)
    return BugTrace(bug.bug_id, bug.dataset, bug.ground_truth, tuple(runs))


def test_prefix_prediction_never_reads_answers(workdir, trained):
    bugs = [_poisoned(b) for b in tm.ingest(workdir / "traces.json").bugs]
    scores, scheme = cli.predict_prefix(trained / "checkpoint.json", bugs, 5)
    assert len(scores) == len(bugs) and scheme.value == "fa"


def test_predict_command(workdir, trained, tmp_path, capsys):
    assert cli.main(["predict", "--checkpoint", str(trained / "checkpoint.json"), "--traces",
                     str(workdir / "traces.json"), "--prefix-steps", "5", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "eval.json").read_text())
    assert summary["mode"] == "prefix" and summary["prefix_steps"] == 5
    assert cli.main(["predict", "--checkpoint", str(trained / "checkpoint.json"), "--traces",
                     str(workdir / "traces.json"), "--prefix-steps", "11"]) == 2


def test_predict_rejects_answer_schemes(workdir, tmp_path):
    out = tmp_path / "faa"
    assert cli.main(["train", "--config", str(workdir / "small_faa.json"), "--traces", str(workdir / "traces.json"),
                     "--out", str(out)]) == 0
    assert cli.main(["predict", "--checkpoint", str(out / "checkpoint.json"), "--traces",
                     str(workdir / "traces.json"), "--prefix-steps", "3"]) == 2


def test_missing_traces_is_data_error(tmp_path):
    assert cli.main(["validate", str(tmp_path / "nope.json")]) == 1
