"""Edge-preserving bilateral smoothing applied before segmentation."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyImageError


@dataclass
class BilateralParams:
    """Bilateral filter parameters.

    sigma_s : spatial falloff; squared pixel distance is divided by sigma_s^2
    sigma_c : intensity falloff; squared intensity difference by sigma_c^2
    rho     : half-window radius in pixels (window is (2*rho+1)^2)
    """

    sigma_s: float = 300.0
    sigma_c: float = 0.1
    rho: int = 5

    def __post_init__(self):
        if self.sigma_s <= 0 or self.sigma_c <= 0:
            raise ValueError("sigma_s and sigma_c must be positive")
        if self.rho < 1:
            raise ValueError("rho must be >= 1")


def bilateral_filter(img, params=None):
    """Smooth a [0, 1] gray image while preserving intensity edges.

    Each output pixel is a convex combination of its (2*rho+1)^2 window,
    weighted by spatial proximity and intensity similarity.  Windows leaving
    the image clamp coordinates to the nearest edge pixel; the spatial weight
    keeps the nominal offset.  A constant image is a fixed point.
    """
    if params is None:
        params = BilateralParams()
    img = np.asarray(img, dtype=np.float64)
    if img.size == 0:
        raise EmptyImageError("cannot filter an empty image")
    out = kernels.bilateral(img, params.sigma_s, params.sigma_c, params.rho)
    return np.clip(out, 0.0, 1.0)
