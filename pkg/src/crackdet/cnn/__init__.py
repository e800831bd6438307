"""From-scratch convolutional crack/no-crack classifier."""

from .layers import (
    BatchNorm2d,
    Conv2d,
    Dense,
    Flatten,
    MaxPool2d,
    ReLU,
    batchnorm_forward,
    conv2d_forward,
    dense_softmax,
    maxpool2d,
    relu,
    softmax,
)
from .network import (
    LABELS,
    ArchConfig,
    Classification,
    ConvBlockSpec,
    CrackClassifier,
    classify,
    cross_entropy,
    load_checkpoint,
    preprocess,
    save_checkpoint,
)
from .training import TrainConfig, TrainRecord, evaluate, sgdm_step, train

__all__ = [
    "ArchConfig",
    "BatchNorm2d",
    "Classification",
    "Conv2d",
    "ConvBlockSpec",
    "CrackClassifier",
    "Dense",
    "Flatten",
    "LABELS",
    "MaxPool2d",
    "ReLU",
    "TrainConfig",
    "TrainRecord",
    "batchnorm_forward",
    "classify",
    "conv2d_forward",
    "cross_entropy",
    "dense_softmax",
    "evaluate",
    "load_checkpoint",
    "maxpool2d",
    "preprocess",
    "relu",
    "save_checkpoint",
    "sgdm_step",
    "softmax",
    "train",
]
