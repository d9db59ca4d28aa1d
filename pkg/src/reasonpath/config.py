"""Hyperparameter and experiment configuration, with the tuned presets."""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass
from pathlib import Path

from .embedding import Scheme


class ConfigError(ValueError):
    pass


class ModelKind(str, enum.Enum):
    LSTM = "lstm"
    GCN = "gcn"


class EpochSelection(str, enum.Enum):
    PAPER_PEAK_TEST = "paper_peak_test"
    FINAL_EPOCH = "final_epoch"

    @classmethod
    def parse(cls, value) -> "EpochSelection":
        aliases = {"paper": cls.PAPER_PEAK_TEST, "final": cls.FINAL_EPOCH}
        if isinstance(value, cls):
            return value
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            raise ConfigError(f"unknown epoch selection {value!r}") from None


DEFAULT_EPOCHS = {ModelKind.LSTM: 50, ModelKind.GCN: 100}
LEARNING_RATE = 0.001


@dataclass(frozen=True)
class Hyperparameters:
    model: ModelKind
    layers: int
    hidden_dim: int
    batch: int
    dropout: float
    epochs: int
    learning_rate: float = LEARNING_RATE

    def __post_init__(self):
        object.__setattr__(self, "model", ModelKind(self.model))
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")
        if self.hidden_dim < 1 or self.batch < 1 or self.epochs < 1:
            raise ConfigError("hidden_dim, batch and epochs must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be > 0")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["model"] = self.model.value
        return d


def _preset(model, layers, hidden, batch, dropout):
    model = ModelKind(model)
    return Hyperparameters(model, layers, hidden, batch, dropout, DEFAULT_EPOCHS[model])


# Tuned per (model, scheme); the LSTM has no S variant.
PRESETS: dict[tuple[ModelKind, Scheme], Hyperparameters] = {
    (ModelKind.LSTM, Scheme.F): _preset("lstm", 1, 32, 64, 0.0),
    (ModelKind.LSTM, Scheme.FA): _preset("lstm", 2, 128, 16, 0.5),
    (ModelKind.LSTM, Scheme.FAA): _preset("lstm", 1, 32, 32, 0.0),
    (ModelKind.GCN, Scheme.S): _preset("gcn", 3, 128, 32, 0.3),
    (ModelKind.GCN, Scheme.F): _preset("gcn", 3, 64, 16, 0.8),
    (ModelKind.GCN, Scheme.FA): _preset("gcn", 3, 64, 16, 0.8),
    (ModelKind.GCN, Scheme.FAA): _preset("gcn", 3, 64, 16, 0.8),
}


def preset(model, scheme) -> Hyperparameters:
    key = (ModelKind(model), Scheme.parse(scheme))
    if key not in PRESETS:
        raise ConfigError(f"no preset for model {key[0].value} with scheme {key[1].value}")
    return PRESETS[key]


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: Scheme
    hyperparameters: Hyperparameters
    representation: str = ""
    folds: int = 10
    seed: int = 0
    threshold: float = 0.5
    epoch_selection: EpochSelection = EpochSelection.PAPER_PEAK_TEST
    stratified: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        object.__setattr__(self, "epoch_selection", EpochSelection.parse(self.epoch_selection))
        expected = "matrix" if self.hyperparameters.model is ModelKind.LSTM else "graph"
        if not self.representation:
            object.__setattr__(self, "representation", expected)
        elif self.representation != expected:
            raise ConfigError(f"model {self.hyperparameters.model.value} needs representation {expected!r}")
        if self.hyperparameters.model is ModelKind.LSTM and self.scheme is Scheme.S:
            raise ConfigError("scheme S applies to graphs only")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must be in [0, 1]")

    @property
    def model(self) -> ModelKind:
        return self.hyperparameters.model

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "representation": self.representation,
            "hyperparameters": self.hyperparameters.to_dict(),
            "folds": self.folds,
            "seed": self.seed,
            "threshold": self.threshold,
            "epoch_selection": self.epoch_selection.value,
            "stratified": self.stratified,
        }

    @classmethod
    def from_dict(cls, raw: dict, **overrides) -> "ExperimentConfig":
        """Build from a JSON-style dict; missing hyperparameters fall back to the preset."""
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
        known = {f.name for f in dataclasses.fields(cls)} | {"model"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        try:
            scheme = Scheme.parse(raw.get("scheme", "fa"))
            hp_raw = dict(raw.get("hyperparameters") or {})
            model = raw.get("model") or hp_raw.get("model")
            if model is None:
                model = "lstm" if raw.get("representation") == "matrix" else "gcn"
            base = preset(model, scheme).to_dict() if (ModelKind(model), scheme) in PRESETS else {"model": model}
            hp = Hyperparameters(**{**base, **hp_raw, "model": model})
            return cls(
                scheme=scheme,
                hyperparameters=hp,
                representation=raw.get("representation", ""),
                folds=int(raw.get("folds", 10)),
                seed=int(raw.get("seed", 0)),
                threshold=float(raw.get("threshold", 0.5)),
                epoch_selection=raw.get("epoch_selection", EpochSelection.PAPER_PEAK_TEST),
                stratified=bool(raw.get("stratified", False)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path, **overrides) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(raw, **overrides)
