"""Road crack detection toolkit.

Two-stage pipeline: a small convolutional classifier flags images that
contain cracks, then bilateral filtering plus an adaptive 2D-histogram
threshold extracts the crack pixels.  An evaluation harness computes
precision/recall/accuracy/F1 at image and pixel level.
"""

from .evaluation import (
    ConfusionCounts,
    MetricsReport,
    accumulate_image,
    accumulate_pixels,
    compute_metrics,
)
from .filtering import BilateralParams, bilateral_filter
from .image_io import load_image, load_mask, save_mask, to_grayscale
from .pipeline import PipelineConfig, SegmentationOutput, segment_gray
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

__version__ = "0.1.0"

__all__ = [
    "BilateralParams",
    "ConfusionCounts",
    "MetricsReport",
    "PipelineConfig",
    "SegmentationOutput",
    "ThresholdResult",
    "accumulate_image",
    "accumulate_pixels",
    "bilateral_filter",
    "build_histogram",
    "compute_metrics",
    "downsample",
    "find_threshold",
    "load_image",
    "load_mask",
    "neighborhood_mean",
    "otsu_threshold",
    "remove_small_components",
    "save_mask",
    "segment",
    "segment_gray",
    "to_grayscale",
]
