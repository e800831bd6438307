"""Mini-batch training with momentum SGD and per-iteration logging."""

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyDatasetError, ShapeMismatchError, SingleClassDatasetError
from .network import cross_entropy


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    max_epochs: int = 16
    validation_frequency: int = 60
    momentum: float = 0.9
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        # learning_rate 0 is allowed: it degenerates to a no-op trainer,
        # which the tests rely on
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must lie in [0, 1)")
        if self.max_epochs < 1 or self.batch_size < 1 or self.validation_frequency < 1:
            raise ValueError("max_epochs, batch_size, validation_frequency must be >= 1")


@dataclass
class TrainRecord:
    iteration: int
    split: str
    loss: float
    accuracy: float


def sgdm_step(param, grad, velocity, lr, momentum):
    """One momentum update: v <- momentum*v - lr*g; w <- w + v (in place)."""
    param = np.asarray(param)
    if param.shape != np.shape(grad) or param.shape != np.shape(velocity):
        raise ShapeMismatchError("param/grad/velocity shapes must agree")
    velocity *= momentum
    velocity -= lr * grad
    param += velocity
    return param, velocity


def evaluate(model, x, y, batch_size=64):
    """Mean loss and accuracy over a split, using inference-mode forward."""
    losses = []
    correct = 0
    for start in range(0, len(x), batch_size):
        xb = x[start : start + batch_size]
        yb = y[start : start + batch_size]
        logits = model.forward(xb, training=False)
        loss, probs, _ = cross_entropy(logits, yb)
        losses.append(loss * len(xb))
        correct += int((probs.argmax(axis=1) == yb).sum())
    return sum(losses) / len(x), correct / len(x)


def train(model, x_train, y_train, cfg, x_val=None, y_val=None):
    """Run the SGDM loop; returns the list of per-iteration TrainRecords.

    Shuffling and everything downstream is driven by cfg.seed, so two runs
    with the same seed and initial weights produce identical logs.  The
    validation split, when given, is scored every cfg.validation_frequency
    iterations.
    """
    x_train = np.asarray(x_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.int64)
    n = len(x_train)
    if n == 0:
        raise EmptyDatasetError("no training samples")
    if np.unique(y_train).size < 2:
        raise SingleClassDatasetError("training set must contain both classes")

    rng = np.random.default_rng(cfg.seed)
    velocity = {name: np.zeros_like(layer.params[key])
                for name, layer, key in model.named_params()}
    log = []
    iteration = 0
    for _ in range(cfg.max_epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            xb = x_train[batch]
            yb = y_train[batch]
            logits = model.forward(xb, training=True)
            loss, probs, dlogits = cross_entropy(logits, yb)
            model.backward(dlogits)
            for name, layer, key in model.named_params():
                sgdm_step(layer.params[key], layer.grads[key], velocity[name],
                          cfg.learning_rate, cfg.momentum)
            iteration += 1
            accuracy = float((probs.argmax(axis=1) == yb).mean())
            log.append(TrainRecord(iteration, "train", loss, accuracy))
            if x_val is not None and len(x_val) and iteration % cfg.validation_frequency == 0:
                val_loss, val_acc = evaluate(model, x_val, y_val, cfg.batch_size)
                log.append(TrainRecord(iteration, "val", val_loss, val_acc))
    return log
