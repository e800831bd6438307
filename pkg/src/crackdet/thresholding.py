"""Adaptive threshold estimation on a 2D intensity histogram, plus helpers.

The adaptive method works on a 3x-downsampled copy of the filtered image.
Every downsampled pixel contributes a feature vector (own intensity,
exclude-center neighborhood mean); the vectors are binned into a square 2D
histogram, and the threshold is the diagonal cut that minimizes the
within-cluster sum of squares of the two diagonal quadrants.  Off-diagonal
quadrants hold boundary/noise vectors and are excluded from the objective.
Otsu's method is provided as the 1D baseline.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DegenerateHistogramError,
    DimensionMismatchError,
    EmptyImageError,
    ImageTooSmallError,
)

DOWNSAMPLE_BLOCK = 3
DEFAULT_BINS = 256


@dataclass
class ThresholdResult:
    """Outcome of the diagonal threshold search.

    delta         : chosen threshold, a bin center in [0, 1]
    candidates    : the bin-center candidate grid, shape (B,)
    wcss_curve    : within-cluster sum of squares per candidate, NaN where a
                    candidate leaves one cluster empty
    cluster_means : (2, 2) array; row 0 = foreground mean vector, row 1 =
                    background mean vector, columns = (own, neighborhood)
    """

    delta: float
    candidates: np.ndarray
    wcss_curve: np.ndarray
    cluster_means: np.ndarray


def downsample(img):
    """Mean-pool a gray image over 3x3 blocks (trailing remainder dropped)."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise DimensionMismatchError("expected a 2D gray image")
    b = DOWNSAMPLE_BLOCK
    h, w = img.shape[0] // b, img.shape[1] // b
    if h == 0 or w == 0:
        raise ImageTooSmallError(
            f"need at least {b}x{b} pixels, got {img.shape[0]}x{img.shape[1]}"
        )
    return img[: h * b, : w * b].reshape(h, b, w, b).mean(axis=(1, 3))


def neighborhood_mean(ds, tau=1):
    """Mean intensity of each pixel's neighbors, excluding the pixel itself.

    The neighborhood is the (2*tau+1)^2 window with coordinates clamped to
    the image edge; the center value is subtracted once and the sum divided
    by the fixed neighbor count (2*tau+1)^2 - 1.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    ds = np.asarray(ds, dtype=np.float64)
    if ds.size == 0:
        raise EmptyImageError("cannot take neighborhood means of an empty image")
    side = 2 * tau + 1
    sums = kernels.window_sum(ds, tau)
    return np.clip((sums - ds) / (side * side - 1), 0.0, 1.0)


def build_histogram(ds, nb, bins=DEFAULT_BINS):
    """Bin (own, neighborhood) intensity pairs into a bins x bins histogram.

    Axis 0 indexes the pixel's own intensity, axis 1 the neighborhood mean;
    a value v maps to bin min(floor(v * bins), bins - 1).
    """
    ds = np.asarray(ds, dtype=np.float64)
    nb = np.asarray(nb, dtype=np.float64)
    if ds.shape != nb.shape:
        raise DimensionMismatchError(
            f"intensity/neighborhood shapes differ: {ds.shape} vs {nb.shape}"
        )
    if bins < 2:
        raise ValueError("bins must be >= 2")
    i = np.minimum((ds * bins).astype(np.int64), bins - 1).ravel()
    j = np.minimum((nb * bins).astype(np.int64), bins - 1).ravel()
    flat = np.bincount(i * bins + j, minlength=bins * bins)
    return flat.reshape(bins, bins)


def find_threshold(hist):
    """Pick the diagonal threshold minimizing the two-cluster WCSS.

    For each candidate delta on the bin-center grid, the foreground cluster
    collects bins with both coordinates <= delta and the background cluster
    bins with both coordinates > delta (mixed quadrants are ignored).  The
    WCSS is evaluated over bin centers weighted by counts.  Candidates where
    either cluster is empty are invalid; exact ties among the minimizers are
    broken by the lower-median candidate, which centers delta inside flat
    valleys.
    """
    hist = np.asarray(hist)
    if hist.ndim != 2 or hist.shape[0] != hist.shape[1]:
        raise DimensionMismatchError("histogram must be square")
    b = hist.shape[0]
    centers = (np.arange(b) + 0.5) / b
    h = hist.astype(np.float64)

    # Inclusive 2D prefix sums turn every per-candidate cluster aggregate
    # into an O(1) lookup: prefix[k, k] covers the foreground quadrant and
    # inclusion-exclusion against the totals covers the background one.
    def prefix(a):
        return a.cumsum(axis=0).cumsum(axis=1)

    cx = centers[:, None]
    cy = centers[None, :]
    p_w = prefix(h)
    p_x = prefix(h * cx)
    p_y = prefix(h * cy)
    p_q = prefix(h * (cx * cx + cy * cy))

    k = np.arange(b)
    stats = []
    for p in (p_w, p_x, p_y, p_q):
        lo = p[k, k]
        hi = p[-1, -1] - p[k, -1] - p[-1, k] + p[k, k]
        stats.append((lo, hi))
    (w1, w2), (x1, x2), (y1, y2), (q1, q2) = stats

    valid = (w1 > 0) & (w2 > 0)
    if not valid.any():
        raise DegenerateHistogramError(
            "no threshold yields two nonempty clusters"
        )
    wcss = np.full(b, np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        scatter1 = q1 - (x1 * x1 + y1 * y1) / w1
        scatter2 = q2 - (x2 * x2 + y2 * y2) / w2
    wcss[valid] = scatter1[valid] + scatter2[valid]

    best = np.nanmin(wcss[valid])
    tied = np.flatnonzero(valid & (wcss == best))
    pick = tied[(len(tied) - 1) // 2]

    means = np.array(
        [
            [x1[pick] / w1[pick], y1[pick] / w1[pick]],
            [x2[pick] / w2[pick], y2[pick] / w2[pick]],
        ]
    )
    return ThresholdResult(
        delta=float(centers[pick]),
        candidates=centers,
        wcss_curve=wcss,
        cluster_means=means,
    )


def segment(img, delta):
    """Foreground = strictly darker than the threshold."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    return np.asarray(img, dtype=np.float64) < delta


def remove_small_components(mask, min_size):
    """Drop 8-connected foreground components smaller than min_size pixels."""
    if min_size < 1:
        raise ValueError("min_size must be >= 1")
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    labels = kernels.label_components(mask)
    counts = np.bincount(labels.ravel())
    keep = counts >= min_size
    keep[0] = False
    return keep[labels]


def otsu_threshold(img, bins=DEFAULT_BINS):
    """Classic 1D threshold maximizing between-class variance.

    Builds a bins-bin histogram of the [0, 1] intensities and returns the
    bin center after the split index maximizing w0 * w1 * (mu0 - mu1)^2,
    taking the smallest index on ties.
    """
    img = np.asarray(img, dtype=np.float64)
    levels = np.minimum((img * bins).astype(np.int64), bins - 1).ravel()
    hist = np.bincount(levels, minlength=bins).astype(np.float64)
    if np.count_nonzero(hist) < 2:
        raise DegenerateHistogramError("need at least two occupied intensity bins")

    w0 = hist.cumsum()
    s0 = (hist * np.arange(bins)).cumsum()
    w1 = w0[-1] - w0
    s1 = s0[-1] - s0
    variance = np.full(bins, -1.0)
    split = (w0 > 0) & (w1 > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mu_diff = s0[split] / w0[split] - s1[split] / w1[split]
    variance[split] = w0[split] * w1[split] * (mu_diff * mu_diff)
    k = int(np.argmax(variance))  # argmax takes the first (smallest) index
    return float((k + 0.5) / bins)
