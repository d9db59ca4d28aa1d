"""Cross-validated training, epoch selection, metric aggregation and baselines."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics as M
from . import rng as rngmod
from . import trace_model
from .config import EpochSelection, ExperimentConfig, ModelKind
from .embedding import Vocabulary, build_vocabulary, feature_width
from .nn import Adam, bce_batch, sigmoid
from .nn.checkpoint import build_model
from .nn.gcn import EmptyGraphError, prepare
from .representation import build_lig, build_lim, lstm_sequence

log = logging.getLogger(__name__)

ROC_GRID = np.linspace(0.0, 1.0, 101)
METRIC_NAMES = ("accuracy", "roc_auc", "precision", "recall")


class RepresentationError(ValueError):
    pass


@dataclass
class PreparedData:
    """Model-ready inputs; ``inputs[i]`` is None for a degenerate (empty) graph."""

    bug_ids: list[str]
    inputs: list
    labels: np.ndarray
    input_dim: int
    vocab_width: int
    N: int

    def __len__(self):
        return len(self.bug_ids)


def prepare_data(bugs, scheme, model: ModelKind, N: int, vocab: Vocabulary | None = None,
                 labels=None) -> PreparedData:
    bugs = list(bugs)
    vocab = vocab or build_vocabulary(bugs)
    if labels is None:
        labels = [trace_model.label(b) for b in bugs]
    inputs = []
    for bug, y in zip(bugs, labels):
        try:
            if model is ModelKind.LSTM:
                inputs.append(lstm_sequence(build_lim(bug, scheme, vocab, N, label=y)))
            else:
                graph = build_lig(bug, scheme, vocab, label=y)
                inputs.append(prepare(graph) if graph.n_nodes else None)
        except EmptyGraphError:
            inputs.append(None)
        except ValueError as exc:
            raise RepresentationError(f"bug {bug.bug_id!r}: {exc}") from exc
    return PreparedData(
        [b.bug_id for b in bugs], inputs, np.asarray(labels, dtype=bool),
        feature_width(scheme, vocab.width), vocab.width, N,
    )


def kfold_split(n: int, k: int, seed: int = 0, labels=None) -> list[list[int]]:
    """Shuffle then cut into ``k`` contiguous chunks whose sizes differ by at most one.

    With ``labels`` the split is stratified: each class is shuffled and dealt
    round-robin so class proportions match across folds.
    """
    if k < 2 or n < k:
        raise ValueError(f"cannot split {n} items into {k} folds")
    rng = rngmod.stream(seed, "kfold")
    if labels is None:
        perm = rng.permutation(n)
        return [sorted(int(i) for i in chunk) for chunk in np.array_split(perm, k)]
    labels = np.asarray(labels, dtype=bool)
    folds: list[list[int]] = [[] for _ in range(k)]
    order = np.concatenate([rng.permutation(np.flatnonzero(labels)), rng.permutation(np.flatnonzero(~labels))])
    for j, idx in enumerate(order):
        folds[j % k].append(int(idx))
    return [sorted(f) for f in folds]


def score(model, inputs, batch_size: int = 256) -> np.ndarray:
    """Sigmoid scores; degenerate inputs score 0.0 (predicted incorrect)."""
    out = np.zeros(len(inputs))
    live = [i for i, x in enumerate(inputs) if x is not None]
    for start in range(0, len(live), batch_size):
        idx = live[start:start + batch_size]
        logits = model.forward(model.collate([inputs[i] for i in idx]), train=False)
        out[idx] = sigmoid(logits)
    return out


def _epoch_metrics(scores, labels, threshold):
    m = M.evaluate(scores, labels, threshold)
    m["roc_auc"] = M.safe_auc(scores, labels)
    return m


def fit(config: ExperimentConfig, data: PreparedData, train_idx, fold: int, on_epoch=None):
    """Train a fresh model; ``on_epoch(epoch, model, train_loss)`` runs after each epoch."""
    hp = config.hyperparameters
    model = build_model(hp, data.input_dim, rng=rngmod.stream(config.seed, fold, "init"))
    opt = Adam(model.params, lr=hp.learning_rate)
    shuffle_rng = rngmod.stream(config.seed, fold, "shuffle")
    dropout_rng = rngmod.stream(config.seed, fold, "dropout")
    train_idx = np.array([i for i in train_idx if data.inputs[i] is not None], dtype=int)
    for epoch in range(1, hp.epochs + 1):
        perm = shuffle_rng.permutation(train_idx)
        total, count = 0.0, 0
        for start in range(0, len(perm), hp.batch):
            idx = perm[start:start + hp.batch]
            batch = model.collate([data.inputs[i] for i in idx])
            logits = model.forward(batch, train=True, rng=dropout_rng)
            loss, dlogits = bce_batch(logits, data.labels[idx])
            opt.step(model.backward(dlogits))
            total += loss * len(idx)
            count += len(idx)
        if on_epoch is not None:
            on_epoch(epoch, model, total / max(count, 1))
    return model


@dataclass
class FoldResult:
    fold: int
    test_idx: list[int]
    history: list[dict]
    selected_epoch: int
    metrics: dict
    scores: list[float]
    final_metrics: dict = field(default_factory=dict)


def train_fold(config: ExperimentConfig, data: PreparedData, folds: list[list[int]], fold: int) -> FoldResult:
    test_idx = folds[fold]
    held_out = set(test_idx)
    train_idx = [i for i in range(len(data)) if i not in held_out]
    test_inputs = [data.inputs[i] for i in test_idx]
    test_labels = data.labels[test_idx]
    history, epoch_scores = [], []

    def on_epoch(epoch, model, train_loss):
        s = score(model, test_inputs)
        m = _epoch_metrics(s, test_labels, config.threshold)
        history.append({"epoch": epoch, "train_loss": train_loss, **{f"test_{k}": m[k] for k in METRIC_NAMES}})
        epoch_scores.append(s)

    fit(config, data, train_idx, fold, on_epoch)

    accs = [h["test_accuracy"] for h in history]
    if config.epoch_selection is EpochSelection.PAPER_PEAK_TEST:
        best = int(np.argmax(accs))  # first maximum on ties
    else:
        best = len(history) - 1
    chosen = {k: history[best][f"test_{k}"] for k in METRIC_NAMES}
    final = {k: history[-1][f"test_{k}"] for k in METRIC_NAMES}
    log.info("fold %d: epoch %d accuracy %.4f", fold, best + 1, chosen["accuracy"])
    return FoldResult(fold, list(test_idx), history, best + 1, chosen,
                      [float(x) for x in epoch_scores[best]], final)


def _train_fold_job(args):
    return train_fold(*args)


def _mean(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def _roc_block(scores, labels):
    try:
        return [[f, t, h if np.isfinite(h) else None] for f, t, h in M.roc_points(scores, labels)]
    except M.UndefinedAUCError:
        return None


def run_experiment(config: ExperimentConfig, bugs, N: int, jobs: int = 1, data: PreparedData | None = None) -> dict:
    """Run every fold and assemble the metrics report (a JSON-ready dict)."""
    bugs = list(bugs)
    if data is None:
        data = prepare_data(bugs, config.scheme, config.model, N)
    folds = kfold_split(len(data), config.folds, config.seed, data.labels if config.stratified else None)
    jobs_args = [(config, data, folds, f) for f in range(config.folds)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_train_fold_job, jobs_args))
    else:
        results = [_train_fold_job(a) for a in jobs_args]
    return assemble_report(config, data, results)


def assemble_report(config: ExperimentConfig, data: PreparedData, results: list[FoldResult]) -> dict:
    results = sorted(results, key=lambda r: r.fold)
    folds_out, curves = [], []
    pooled_scores = np.zeros(len(data))
    for r in results:
        labels = data.labels[r.test_idx]
        pooled_scores[r.test_idx] = r.scores
        points = _roc_block(r.scores, labels)
        if points is not None:
            curves.append(M.interpolate_roc(points, ROC_GRID))
        folds_out.append({
            "fold": r.fold,
            "test_size": len(r.test_idx),
            "test_bug_ids": [data.bug_ids[i] for i in r.test_idx],
            "selected_epoch": r.selected_epoch,
            **r.metrics,
            "final_epoch_metrics": r.final_metrics,
            "roc_points": points,
            "history": r.history,
        })
    pooled = _epoch_metrics(pooled_scores, data.labels, config.threshold)
    report = {
        "config": config.to_dict(),
        "n_bugs": len(data),
        "positive_rate": float(data.labels.mean()),
        "vocab_width": data.vocab_width,
        "input_dim": data.input_dim,
        "degenerate_bugs": [data.bug_ids[i] for i, x in enumerate(data.inputs) if x is None],
        "aggregate": {k: _mean(f[k] for f in folds_out) for k in METRIC_NAMES},
        "pooled": {k: pooled[k] for k in METRIC_NAMES},
        "mean_roc": {
            "fpr": ROC_GRID.tolist(),
            "tpr": np.mean(curves, axis=0).tolist() if curves else None,
        },
        "folds": folds_out,
    }
    return report


def train_full(config: ExperimentConfig, data: PreparedData):
    """Fit on every bug for the configured number of epochs (used for checkpoints)."""
    return fit(config, data, range(len(data)), fold=-1)


def baseline_report(bugs, threshold: float = 0.5) -> dict:
    """Voting-confidence baseline and the predict-everything-correct baseline."""
    bugs = list(bugs)
    labels = np.array([trace_model.label(b) for b in bugs], dtype=bool)
    conf = np.array([float(trace_model.confidence(trace_model.vote_scores(b))) for b in bugs])
    confidence_row = _epoch_metrics(conf, labels, threshold)
    ones = np.ones(len(bugs))
    positive_row = M.evaluate(ones, labels, threshold)
    positive_row["roc_auc"] = None
    return {
        "n_bugs": len(bugs),
        "positive_rate": float(labels.mean()) if len(bugs) else None,
        "threshold": threshold,
        "confidence": {**{k: confidence_row[k] for k in METRIC_NAMES}, "roc_points": _roc_block(conf, labels)},
        "all_positive": {k: positive_row[k] for k in METRIC_NAMES},
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=1, allow_nan=False) + "\n"
