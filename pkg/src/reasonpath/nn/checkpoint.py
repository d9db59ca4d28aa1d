"""JSON checkpoints of named parameter arrays."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..config import Hyperparameters, ModelKind
from ..embedding import Scheme
from .gcn import GCNClassifier
from .lstm import LSTMClassifier

FORMAT = "reasonpath-checkpoint"
VERSION = 1


class CheckpointError(ValueError):
    pass


def build_model(hp: Hyperparameters, input_dim: int, rng=None, init: bool = True):
    cls = LSTMClassifier if hp.model is ModelKind.LSTM else GCNClassifier
    return cls(input_dim, hp.hidden_dim, hp.layers, hp.dropout, rng=rng, init=init)


def save(path, model, hp: Hyperparameters, scheme: Scheme, vocab_width: int, N: int) -> None:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "scheme": scheme.value,
        "vocab_width": vocab_width,
        "N": N,
        "input_dim": model.input_dim,
        "hyperparameters": hp.to_dict(),
        "params": {
            name: {"shape": list(p.shape), "data": p.reshape(-1).tolist()}
            for name, p in model.params.items()
        },
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load(path):
    """Return (model, hyperparameters, scheme, vocab_width, N); shapes are validated."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise CheckpointError(f"{path} is not a version-{VERSION} checkpoint")
    hp = Hyperparameters(**doc["hyperparameters"])
    model = build_model(hp, int(doc["input_dim"]), init=False)
    expected = model.param_shapes()
    stored = doc["params"]
    if set(stored) != set(expected):
        raise CheckpointError(f"parameter names {sorted(stored)} do not match model {sorted(expected)}")
    for name, shape in expected.items():
        entry = stored[name]
        if tuple(entry["shape"]) != tuple(shape) or len(entry["data"]) != int(np.prod(shape)):
            raise CheckpointError(f"parameter {name!r} has shape {entry['shape']}, expected {list(shape)}")
        model.params[name][...] = np.asarray(entry["data"], dtype=np.float64).reshape(shape)
    return model, hp, Scheme.parse(doc["scheme"]), int(doc["vocab_width"]), int(doc["N"])
