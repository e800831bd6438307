"""End-to-end segmentation of a single grayscale image.

Shared by the CLI and the test-suite: filter, estimate the threshold
(adaptive 2D-histogram search or the Otsu baseline), segment at full
resolution, and drop sub-minimum components.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .filtering import BilateralParams, bilateral_filter
from .thresholding import (
    ThresholdResult,
    build_histogram,
    downsample,
    find_threshold,
    neighborhood_mean,
    otsu_threshold,
    remove_small_components,
    segment,
)

METHODS = ("adaptive", "otsu")


@dataclass
class PipelineConfig:
    bilateral: BilateralParams = field(default_factory=BilateralParams)
    tau: int = 1
    bins: int = 256
    min_component: int = 100
    method: str = "adaptive"
    model_path: Optional[str] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not 1 <= self.tau <= 4:
            raise ValueError("tau must lie in 1..4")


@dataclass
class SegmentationOutput:
    mask: np.ndarray
    delta: float
    threshold: Optional[ThresholdResult]  # None for the Otsu baseline


def segment_gray(gray, cfg=None):
    """Filter a [0, 1] gray image and extract its crack mask."""
    if cfg is None:
        cfg = PipelineConfig()
    filtered = bilateral_filter(gray, cfg.bilateral)
    if cfg.method == "adaptive":
        ds = downsample(filtered)
        nb = neighborhood_mean(ds, cfg.tau)
        hist = build_histogram(ds, nb, cfg.bins)
        result = find_threshold(hist)
        delta = result.delta
    else:
        result = None
        delta = otsu_threshold(filtered, cfg.bins)
    mask = segment(filtered, delta)
    mask = remove_small_components(mask, cfg.min_component)
    return SegmentationOutput(mask=mask, delta=delta, threshold=result)
