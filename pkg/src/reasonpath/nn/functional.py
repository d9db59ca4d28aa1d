import numpy as np


class NumericError(ArithmeticError):
    """Non-finite values reached a parameter, gradient or loss."""


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softplus(z):
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def bce_loss(logit, label) -> float:
    """Binary cross-entropy of ``sigmoid(logit)``; equals softplus(logit) - label * logit."""
    logit = float(logit)
    if not np.isfinite(logit):
        raise NumericError(f"non-finite logit {logit}")
    # softplus(z) - z == softplus(-z); choosing the branch avoids cancellation.
    return float(softplus(-logit) if label else softplus(logit))


def bce_batch(logits, labels, weights=None):
    """Mean weighted BCE over a batch and its gradient with respect to the logits."""
    logits = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    w = np.ones_like(logits) if weights is None else np.asarray(weights, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise NumericError("non-finite logit in batch")
    per = np.where(y > 0, softplus(-logits), softplus(logits))
    n = len(logits)
    loss = float(np.sum(w * per) / n)
    dlogits = w * (sigmoid(logits) - y) / n
    return loss, dlogits


def dropout_mask(shape, p: float, rng: np.random.Generator) -> np.ndarray | None:
    """Inverted dropout mask (kept units scaled by 1/(1-p)); None when p == 0."""
    if p <= 0.0:
        return None
    keep = rng.random(shape) >= p
    return keep / (1.0 - p)


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int, shape=None) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))
