"""Stacked LSTM over a step-interleaved sequence with a scalar output head.

Gate blocks are laid out ``[input, forget, cell, output]`` along the last
axis of each layer's ``Wx``, ``Wh`` and ``b``.
"""

from __future__ import annotations

import numpy as np

from .functional import dropout_mask, glorot, sigmoid


class LSTMClassifier:
    kind = "lstm"

    def __init__(self, input_dim: int, hidden_dim: int, layers: int = 1, dropout: float = 0.0,
                 rng: np.random.Generator | None = None, init: bool = True):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.layers = layers
        self.dropout = dropout
        self.params: dict[str, np.ndarray] = {}
        H = hidden_dim
        rng = rng if rng is not None else np.random.default_rng(0)
        for l in range(layers):
            d_in = input_dim if l == 0 else H
            if init:
                Wx, Wh = glorot(rng, d_in, 4 * H), glorot(rng, H, 4 * H)
                b = np.zeros(4 * H)
                b[H:2 * H] = 1.0
            else:
                Wx, Wh, b = np.zeros((d_in, 4 * H)), np.zeros((H, 4 * H)), np.zeros(4 * H)
            self.params[f"lstm{l}.Wx"] = Wx
            self.params[f"lstm{l}.Wh"] = Wh
            self.params[f"lstm{l}.b"] = b
        self.params["fc.w"] = glorot(rng, H, 1, shape=(H,)) if init else np.zeros(H)
        self.params["fc.b"] = np.zeros(1)
        self._cache = None

    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        return {k: v.shape for k, v in self.params.items()}

    @staticmethod
    def collate(sequences) -> np.ndarray:
        return np.stack([np.asarray(s, dtype=np.float64) for s in sequences])

    def forward(self, X: np.ndarray, train: bool = False, rng: np.random.Generator | None = None) -> np.ndarray:
        """``X`` has shape (batch, time, input_dim); returns one logit per sequence."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 3 or X.shape[2] != self.input_dim:
            raise ValueError(f"expected input of shape (B, T, {self.input_dim}), got {X.shape}")
        B, T, _ = X.shape
        H = self.hidden_dim
        layer_caches = []
        inp = X
        for l in range(self.layers):
            mask = None
            if l > 0 and train and self.dropout > 0:
                mask = dropout_mask(inp.shape, self.dropout, rng)
                inp = inp * mask
            Wx, Wh, b = (self.params[f"lstm{l}.{n}"] for n in ("Wx", "Wh", "b"))
            pre_x = inp @ Wx + b
            hs = np.zeros((B, T + 1, H))
            cs = np.zeros((B, T + 1, H))
            gates = np.empty((B, T, 4 * H))
            for t in range(T):
                a = pre_x[:, t] + hs[:, t] @ Wh
                i = sigmoid(a[:, :H])
                f = sigmoid(a[:, H:2 * H])
                g = np.tanh(a[:, 2 * H:3 * H])
                o = sigmoid(a[:, 3 * H:])
                cs[:, t + 1] = f * cs[:, t] + i * g
                hs[:, t + 1] = o * np.tanh(cs[:, t + 1])
                gates[:, t, :H], gates[:, t, H:2 * H], gates[:, t, 2 * H:3 * H], gates[:, t, 3 * H:] = i, f, g, o
            layer_caches.append((inp, mask, hs, cs, gates))
            inp = hs[:, 1:]
        h_last = inp[:, -1] if T > 0 else np.zeros((B, H))
        logits = h_last @ self.params["fc.w"] + self.params["fc.b"][0]
        self._cache = (X.shape, layer_caches, h_last)
        return logits

    def backward(self, dlogits: np.ndarray) -> dict[str, np.ndarray]:
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        (B, T, _), layer_caches, h_last = self._cache
        H = self.hidden_dim
        dlogits = np.asarray(dlogits, dtype=np.float64)
        grads = {"fc.w": h_last.T @ dlogits, "fc.b": np.array([dlogits.sum()])}
        dout = np.zeros((B, T, H))
        if T > 0:
            dout[:, -1] = np.outer(dlogits, self.params["fc.w"])
        for l in reversed(range(self.layers)):
            inp, mask, hs, cs, gates = layer_caches[l]
            Wx, Wh = self.params[f"lstm{l}.Wx"], self.params[f"lstm{l}.Wh"]
            dA = np.empty((B, T, 4 * H))
            dWh = np.zeros_like(Wh)
            dh_next = np.zeros((B, H))
            dc_next = np.zeros((B, H))
            for t in reversed(range(T)):
                i, f, g, o = (gates[:, t, k * H:(k + 1) * H] for k in range(4))
                tc = np.tanh(cs[:, t + 1])
                dh = dout[:, t] + dh_next
                dc = dh * o * (1.0 - tc * tc) + dc_next
                da = dA[:, t]
                da[:, :H] = dc * g * i * (1.0 - i)
                da[:, H:2 * H] = dc * cs[:, t] * f * (1.0 - f)
                da[:, 2 * H:3 * H] = dc * i * (1.0 - g * g)
                da[:, 3 * H:] = dh * tc * o * (1.0 - o)
                dWh += hs[:, t].T @ da
                dh_next = da @ Wh.T
                dc_next = dc * f
            d_in = inp.shape[2]
            grads[f"lstm{l}.Wx"] = inp.reshape(-1, d_in).T @ dA.reshape(-1, 4 * H)
            grads[f"lstm{l}.Wh"] = dWh
            grads[f"lstm{l}.b"] = dA.sum(axis=(0, 1))
            if l > 0:
                dout = dA @ Wx.T
                if mask is not None:
                    dout = dout * mask
        return grads


def lstm_forward(seq, model: LSTMClassifier, train: bool = False, rng=None) -> float:
    """Logit for a single (time, input_dim) sequence."""
    return float(model.forward(np.asarray(seq, dtype=np.float64)[None], train, rng)[0])
