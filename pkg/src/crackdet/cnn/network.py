"""Classifier network: stacked conv blocks, a dense head, and checkpoints.

The architecture is configuration-driven: each block is conv -> batch norm
-> ReLU followed by max pooling, then the feature map is flattened into a
dense layer whose softmax scores the two classes.  Class index 0 is
"negative" (no crack), index 1 is "positive".
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeMismatchError
from .layers import (
    BatchNorm2d,
    Conv2d,
    Dense,
    Flatten,
    MaxPool2d,
    ReLU,
    softmax,
)

LABELS = ("negative", "positive")

_MAGIC = b"CRACKDET\x01"


@dataclass
class ConvBlockSpec:
    in_channels: int
    out_channels: int
    kernel: int = 3
    stride: int = 1
    padding: int = 1

    def __post_init__(self):
        if min(self.in_channels, self.out_channels, self.kernel, self.stride) < 1:
            raise ValueError("conv block sizes must be >= 1")
        if self.padding < 0:
            raise ValueError("padding must be >= 0")


@dataclass
class ArchConfig:
    """Network layout; the default mirrors a three-block 16/32/64 stack."""

    input_size: int = 227
    in_channels: int = 3
    blocks: tuple = field(default_factory=tuple)
    pool_window: int = 2
    pool_stride: int = 2
    num_classes: int = 2
    bn_eps: float = 1e-5
    bn_momentum: float = 0.1

    @classmethod
    def default(cls, input_size=227, in_channels=3, widths=(16, 32, 64)):
        blocks = []
        prev = in_channels
        for width in widths:
            blocks.append(ConvBlockSpec(prev, width))
            prev = width
        return cls(input_size=input_size, in_channels=in_channels, blocks=tuple(blocks))

    def feature_size(self):
        """Spatial side length after all blocks; raises if it collapses."""
        size = self.input_size
        for spec in self.blocks:
            size = (size + 2 * spec.padding - spec.kernel) // spec.stride + 1
            size = (size - self.pool_window) // self.pool_stride + 1
            if size < 1:
                raise ShapeMismatchError(
                    f"input size {self.input_size} collapses inside the network"
                )
        return size

    def to_dict(self):
        return {
            "input_size": self.input_size,
            "in_channels": self.in_channels,
            "blocks": [
                [s.in_channels, s.out_channels, s.kernel, s.stride, s.padding]
                for s in self.blocks
            ],
            "pool_window": self.pool_window,
            "pool_stride": self.pool_stride,
            "num_classes": self.num_classes,
            "bn_eps": self.bn_eps,
            "bn_momentum": self.bn_momentum,
        }

    @classmethod
    def from_dict(cls, data):
        blocks = tuple(ConvBlockSpec(*row) for row in data["blocks"])
        return cls(
            input_size=data["input_size"],
            in_channels=data["in_channels"],
            blocks=blocks,
            pool_window=data["pool_window"],
            pool_stride=data["pool_stride"],
            num_classes=data["num_classes"],
            bn_eps=data["bn_eps"],
            bn_momentum=data["bn_momentum"],
        )


@dataclass
class Classification:
    """Predicted label plus the (negative, positive) probability pair."""

    label: str
    probabilities: np.ndarray


class CrackClassifier:
    def __init__(self, arch=None, rng=None):
        self.arch = arch or ArchConfig.default()
        rng = rng or np.random.default_rng()
        self.layers = []
        for spec in self.arch.blocks:
            self.layers.append(
                Conv2d(spec.in_channels, spec.out_channels, spec.kernel,
                       spec.stride, spec.padding, rng=rng)
            )
            self.layers.append(
                BatchNorm2d(spec.out_channels, self.arch.bn_eps, self.arch.bn_momentum)
            )
            self.layers.append(ReLU())
            self.layers.append(MaxPool2d(self.arch.pool_window, self.arch.pool_stride))
        self.layers.append(Flatten())
        side = self.arch.feature_size()
        out_channels = self.arch.blocks[-1].out_channels if self.arch.blocks else self.arch.in_channels
        self.layers.append(Dense(out_channels * side * side, self.arch.num_classes, rng=rng))

    def forward(self, x, training=True):
        for layer in self.layers:
            x = layer.forward(x, training=training)
        return x

    def backward(self, dlogits):
        grad = dlogits
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def named_params(self):
        """Stable (name, layer, key) triples over all trainable tensors."""
        for i, layer in enumerate(self.layers):
            for key in layer.params:
                yield f"layer{i}.{key}", layer, key

    def state_dict(self):
        state = {}
        for name, layer, key in self.named_params():
            state[name] = layer.params[key]
        for i, layer in enumerate(self.layers):
            if isinstance(layer, BatchNorm2d):
                state[f"layer{i}.running_mean"] = layer.running_mean
                state[f"layer{i}.running_var"] = layer.running_var
        return state

    def load_state(self, state):
        for name, layer, key in self.named_params():
            layer.params[key][...] = state[name]
        for i, layer in enumerate(self.layers):
            if isinstance(layer, BatchNorm2d):
                layer.running_mean[...] = state[f"layer{i}.running_mean"]
                layer.running_var[...] = state[f"layer{i}.running_var"]

    def predict_proba(self, x):
        return softmax(self.forward(x, training=False))


def preprocess(rgb, input_size):
    """uint8 (H, W, 3) image -> (C, S, S) float input scaled to [0, 1].

    Resizing is nearest-neighbor, so preprocessing is exactly reproducible.
    """
    rgb = np.asarray(rgb)
    h, w = rgb.shape[0], rgb.shape[1]
    rows = np.minimum(((np.arange(input_size) + 0.5) * h / input_size).astype(int), h - 1)
    cols = np.minimum(((np.arange(input_size) + 0.5) * w / input_size).astype(int), w - 1)
    resized = rgb[rows][:, cols]
    return resized.astype(np.float64).transpose(2, 0, 1) / 255.0


def classify(model, img):
    """Label one uint8 RGB image; equal probabilities resolve to negative."""
    x = preprocess(img, model.arch.input_size)[None]
    probs = model.predict_proba(x)[0]
    label = LABELS[1] if probs[1] > probs[0] else LABELS[0]
    return Classification(label=label, probabilities=probs)


def cross_entropy(logits, labels):
    """Mean cross-entropy over softmax; returns (loss, probs, dlogits)."""
    labels = np.asarray(labels)
    probs = softmax(logits)
    n = logits.shape[0]
    picked = probs[np.arange(n), labels]
    loss = float(-np.log(np.maximum(picked, 1e-300)).mean())
    dlogits = probs.copy()
    dlogits[np.arange(n), labels] -= 1.0
    return loss, probs, dlogits / n


def save_checkpoint(model, path):
    """Serialize arch + parameters + running stats to a deterministic file."""
    state = model.state_dict()
    names = sorted(state)
    header = {
        "version": 1,
        "arch": model.arch.to_dict(),
        "tensors": [
            {"name": n, "shape": list(state[n].shape), "dtype": "<f8"} for n in names
        ],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for n in names:
            fh.write(np.ascontiguousarray(state[n], dtype="<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"not a crackdet checkpoint: {path}")
        (blob_len,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(blob_len).decode("utf-8"))
        if header.get("version") != 1:
            raise ValueError(f"unsupported checkpoint version in {path}")
        state = {}
        for entry in header["tensors"]:
            count = int(np.prod(entry["shape"])) if entry["shape"] else 1
            data = np.frombuffer(fh.read(count * 8), dtype="<f8")
            state[entry["name"]] = data.reshape(entry["shape"]).copy()
    model = CrackClassifier(ArchConfig.from_dict(header["arch"]))
    model.load_state(state)
    return model
