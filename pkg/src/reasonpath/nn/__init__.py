from .functional import NumericError, bce_batch, bce_loss, dropout_mask, sigmoid, softplus
from .gcn import EmptyGraphError, GCNClassifier, gcn_forward, normalized_adjacency
from .gradcheck import GradCheckReport, grad_check
from .lstm import LSTMClassifier, lstm_forward
from .optim import Adam

__all__ = [
    "Adam",
    "EmptyGraphError",
    "GCNClassifier",
    "GradCheckReport",
    "LSTMClassifier",
    "NumericError",
    "bce_batch",
    "bce_loss",
    "dropout_mask",
    "gcn_forward",
    "grad_check",
    "lstm_forward",
    "normalized_adjacency",
    "sigmoid",
    "softplus",
]
