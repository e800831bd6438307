"""Image loading, grayscale conversion, and mask I/O.

Array conventions used throughout the package:

* RGB image  -- uint8 array of shape (H, W, 3)
* gray image -- float64 array of shape (H, W), intensities in [0, 1]
* mask       -- bool array of shape (H, W), True = foreground (crack)
"""

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, EmptyImageError

# ITU-R BT.601 luma weights
_LUMA = np.array([0.299, 0.587, 0.114])

# grayscale value at or above which a ground-truth pixel counts as foreground
MASK_THRESHOLD = 128


def load_image(path):
    """Decode a PNG/JPEG file into a (H, W, 3) uint8 RGB array.

    Raises FileNotFoundError for a missing path and DecodeError for a file
    that cannot be decoded.
    """
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    if arr.size == 0:
        raise DecodeError(f"zero-sized image: {path}")
    return arr


def to_grayscale(img):
    """BT.601 luma of a uint8 RGB array, scaled to [0, 1].

    Monotone in every channel; output is clipped against rounding overshoot.
    """
    gray = img.astype(np.float64) @ _LUMA / 255.0
    return np.clip(gray, 0.0, 1.0)


def save_mask(mask, path):
    """Write a boolean mask as an 8-bit grayscale PNG (255 = foreground)."""
    if mask.size == 0:
        raise EmptyImageError("refusing to write an empty mask")
    data = np.where(mask, 255, 0).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path, format="PNG")


def load_mask(path):
    """Read a mask image; foreground = grayscale value >= 128.

    Accepts single- or multi-channel inputs (multi-channel goes through the
    same luma conversion as load_image).
    """
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("L"))
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    if arr.size == 0:
        raise DecodeError(f"zero-sized mask: {path}")
    return arr >= MASK_THRESHOLD
