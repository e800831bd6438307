"""Trainable layers and their functional forms.

All tensors are float64 numpy arrays; images flow as NCHW.  Each layer
caches what its backward pass needs during forward; calling backward
without a forward raises StaleCacheError.  Gradients land in .grads keyed
like .params.
"""

import numpy as np

from .. import kernels
from ..errors import ShapeMismatchError, StaleCacheError


def conv2d_forward(x, w, b, stride=1, padding=0):
    """Cross-correlate NCHW input with (K, C, kh, kw) weights plus bias."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if x.ndim != 4 or w.ndim != 4:
        raise ShapeMismatchError("conv2d expects 4D input and weights")
    if x.shape[1] != w.shape[1]:
        raise ShapeMismatchError(
            f"channel mismatch: input has {x.shape[1]}, weights expect {w.shape[1]}"
        )
    if b.shape != (w.shape[0],):
        raise ShapeMismatchError("bias must have one entry per output channel")
    for size, k in ((x.shape[2], w.shape[2]), (x.shape[3], w.shape[3])):
        span = size + 2 * padding - k
        if span < 0 or span % stride != 0:
            raise ShapeMismatchError(
                f"kernel {k} with stride {stride}, padding {padding} does not "
                f"tile a size-{size} axis"
            )
    return kernels.conv2d_forward(x, w, b, stride, padding)


def batchnorm_forward(x, gamma, beta, eps=1e-5):
    """Per-channel standardization over (N, H, W), then scale and shift."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4:
        raise ShapeMismatchError("batchnorm expects NCHW input")
    c = x.shape[1]
    if np.shape(gamma) != (c,) or np.shape(beta) != (c,):
        raise ShapeMismatchError("gamma/beta must have one entry per channel")
    if x.shape[0] * x.shape[2] * x.shape[3] < 2:
        raise ShapeMismatchError("batchnorm needs at least 2 values per channel")
    mean = x.mean(axis=(0, 2, 3), keepdims=True)
    var = x.var(axis=(0, 2, 3), keepdims=True)
    xhat = (x - mean) / np.sqrt(var + eps)
    return np.asarray(gamma)[None, :, None, None] * xhat + np.asarray(beta)[None, :, None, None]


def relu(x):
    """Elementwise max(0, x)."""
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def maxpool2d(x, window=2, stride=2):
    """Windowed maximum over the spatial axes of an NCHW tensor."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4:
        raise ShapeMismatchError("maxpool expects NCHW input")
    if x.shape[2] < window or x.shape[3] < window:
        raise ShapeMismatchError(
            f"spatial size {x.shape[2]}x{x.shape[3]} smaller than window {window}"
        )
    out, _ = kernels.maxpool_forward(x, window, stride)
    return out


def softmax(logits):
    """Row-wise softmax with max subtraction for stability."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def dense_softmax(x, w, b):
    """Class probabilities softmax(x @ w.T + b) for (N, D) features."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if x.ndim != 2 or w.ndim != 2 or x.shape[1] != w.shape[1]:
        raise ShapeMismatchError(
            f"incompatible dense shapes: x {x.shape}, w {w.shape}"
        )
    if b.shape != (w.shape[0],):
        raise ShapeMismatchError("bias must have one entry per class")
    return softmax(x @ w.T + b)


class Conv2d:
    def __init__(self, in_channels, out_channels, kernel, stride=1, padding=0, rng=None):
        rng = rng or np.random.default_rng()
        fan_in = in_channels * kernel * kernel
        self.w = rng.normal(0.0, np.sqrt(2.0 / fan_in), (out_channels, in_channels, kernel, kernel))
        self.b = np.zeros(out_channels)
        self.stride = stride
        self.padding = padding
        self.grads = {}
        self._x = None

    @property
    def params(self):
        return {"w": self.w, "b": self.b}

    def forward(self, x, training=True):
        out = conv2d_forward(x, self.w, self.b, self.stride, self.padding)
        self._x = np.asarray(x, dtype=np.float64) if training else None
        return out

    def backward(self, dy):
        if self._x is None:
            raise StaleCacheError("conv backward before forward")
        dx, dw, db = kernels.conv2d_backward(self._x, self.w, dy, self.stride, self.padding)
        self.grads = {"w": dw, "b": db}
        return dx


class BatchNorm2d:
    def __init__(self, channels, eps=1e-5, momentum=0.1):
        self.gamma = np.ones(channels)
        self.beta = np.zeros(channels)
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)
        self.eps = eps
        self.momentum = momentum
        self.grads = {}
        self._cache = None

    @property
    def params(self):
        return {"gamma": self.gamma, "beta": self.beta}

    def forward(self, x, training=True):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 4 or x.shape[1] != self.gamma.shape[0]:
            raise ShapeMismatchError("batchnorm input does not match channel count")
        if training:
            if x.shape[0] * x.shape[2] * x.shape[3] < 2:
                raise ShapeMismatchError("batchnorm needs at least 2 values per channel")
            mean = x.mean(axis=(0, 2, 3))
            var = x.var(axis=(0, 2, 3))
            self.running_mean = (1 - self.momentum) * self.running_mean + self.momentum * mean
            self.running_var = (1 - self.momentum) * self.running_var + self.momentum * var
        else:
            mean = self.running_mean
            var = self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean[None, :, None, None]) * inv_std[None, :, None, None]
        if training:
            self._cache = (xhat, inv_std)
        return self.gamma[None, :, None, None] * xhat + self.beta[None, :, None, None]

    def backward(self, dy):
        if self._cache is None:
            raise StaleCacheError("batchnorm backward before forward")
        xhat, inv_std = self._cache
        m = dy.shape[0] * dy.shape[2] * dy.shape[3]
        dgamma = (dy * xhat).sum(axis=(0, 2, 3))
        dbeta = dy.sum(axis=(0, 2, 3))
        scale = self.gamma * inv_std / m
        dx = scale[None, :, None, None] * (
            m * dy
            - dbeta[None, :, None, None]
            - xhat * dgamma[None, :, None, None]
        )
        self.grads = {"gamma": dgamma, "beta": dbeta}
        return dx


class ReLU:
    def __init__(self):
        self.grads = {}
        self._mask = None

    @property
    def params(self):
        return {}

    def forward(self, x, training=True):
        x = np.asarray(x, dtype=np.float64)
        if training:
            self._mask = x > 0
        return np.maximum(x, 0.0)

    def backward(self, dy):
        if self._mask is None:
            raise StaleCacheError("relu backward before forward")
        return dy * self._mask


class MaxPool2d:
    def __init__(self, window=2, stride=2):
        self.window = window
        self.stride = stride
        self.grads = {}
        self._cache = None

    @property
    def params(self):
        return {}

    def forward(self, x, training=True):
        x = np.asarray(x, dtype=np.float64)
        if x.shape[2] < self.window or x.shape[3] < self.window:
            raise ShapeMismatchError("pooling window larger than input")
        out, idx = kernels.maxpool_forward(x, self.window, self.stride)
        if training:
            self._cache = (idx, x.shape[2], x.shape[3])
        return out

    def backward(self, dy):
        if self._cache is None:
            raise StaleCacheError("maxpool backward before forward")
        idx, h, w = self._cache
        return kernels.maxpool_backward(dy, idx, h, w)


class Flatten:
    def __init__(self):
        self.grads = {}
        self._shape = None

    @property
    def params(self):
        return {}

    def forward(self, x, training=True):
        x = np.asarray(x, dtype=np.float64)
        if training:
            self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        if self._shape is None:
            raise StaleCacheError("flatten backward before forward")
        return dy.reshape(self._shape)


class Dense:
    def __init__(self, in_features, out_features, rng=None):
        rng = rng or np.random.default_rng()
        self.w = rng.normal(0.0, np.sqrt(2.0 / in_features), (out_features, in_features))
        self.b = np.zeros(out_features)
        self.grads = {}
        self._x = None

    @property
    def params(self):
        return {"w": self.w, "b": self.b}

    def forward(self, x, training=True):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.w.shape[1]:
            raise ShapeMismatchError(
                f"dense expects (N, {self.w.shape[1]}), got {x.shape}"
            )
        if training:
            self._x = x
        return x @ self.w.T + self.b

    def backward(self, dy):
        if self._x is None:
            raise StaleCacheError("dense backward before forward")
        self.grads = {"w": dy.T @ self._x, "b": dy.sum(axis=0)}
        return dy @ self.w
