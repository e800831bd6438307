"""Pure-numpy fallback kernels.

Selected via ``CRACKDET_BACKEND=numpy`` or automatically when numba is not
installed.  Windowed kernels accumulate over window offsets in the same
row-major order as the jitted loops, so per-pixel results match the fast
path to float rounding.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

NAME = "numpy"


def bilateral(img, sigma_s, sigma_c, rho):
    h, w = img.shape
    padded = np.pad(img, rho, mode="edge")
    inv_s = 1.0 / (sigma_s * sigma_s)
    inv_c = 1.0 / (sigma_c * sigma_c)
    num = np.zeros((h, w))
    den = np.zeros((h, w))
    for dx in range(-rho, rho + 1):
        for dy in range(-rho, rho + 1):
            shifted = padded[rho + dx : rho + dx + h, rho + dy : rho + dy + w]
            d2 = float(dx * dx + dy * dy)
            diff = shifted - img
            wgt = np.exp(-(d2 * inv_s)) * np.exp(-(diff * diff * inv_c))
            # accumulate deviations so a constant image is an exact fixed point
            num += wgt * diff
            den += wgt
    return img + num / den


def window_sum(img, radius):
    h, w = img.shape
    padded = np.pad(img, radius, mode="edge")
    out = np.zeros((h, w))
    for dx in range(-radius, radius + 1):
        for dy in range(-radius, radius + 1):
            out += padded[radius + dx : radius + dx + h, radius + dy : radius + dy + w]
    return out


def _pad_nchw(x, padding):
    if padding == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))


def conv2d_forward(x, w, b, stride, padding):
    kh, kw = w.shape[2], w.shape[3]
    xp = _pad_nchw(x, padding)
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    out = np.einsum("nchwij,kcij->nkhw", windows, w, optimize=True)
    return out + b[None, :, None, None]


def conv2d_backward(x, w, dy, stride, padding):
    n, c, hi, wi = x.shape
    k, _, kh, kw = w.shape
    ho, wo = dy.shape[2], dy.shape[3]
    xp = _pad_nchw(x, padding)
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    dw = np.einsum("nchwij,nkhw->kcij", windows, dy, optimize=True)
    db = dy.sum(axis=(0, 2, 3))
    dxp = np.zeros_like(xp)
    for ky in range(kh):
        for kx in range(kw):
            patch = np.einsum("nkhw,kc->nchw", dy, w[:, :, ky, kx], optimize=True)
            dxp[:, :, ky : ky + stride * ho : stride, kx : kx + stride * wo : stride] += patch
    if padding:
        dxp = dxp[:, :, padding : padding + hi, padding : padding + wi]
    return dxp, dw, db


def maxpool_forward(x, window, stride):
    n, c, hi, wi = x.shape
    windows = sliding_window_view(x, (window, window), axis=(2, 3))[:, :, ::stride, ::stride]
    ho, wo = windows.shape[2], windows.shape[3]
    flat = windows.reshape(n, c, ho, wo, window * window)
    local = flat.argmax(axis=-1)  # first max in row-major window order
    out = np.take_along_axis(flat, local[..., None], axis=-1)[..., 0]
    base_y = (np.arange(ho) * stride)[None, None, :, None]
    base_x = (np.arange(wo) * stride)[None, None, None, :]
    idx = (base_y + local // window) * wi + (base_x + local % window)
    return out, idx.astype(np.int64)


def maxpool_backward(dy, idx, hi, wi):
    n, c = dy.shape[0], dy.shape[1]
    dx = np.zeros((n, c, hi * wi))
    ni = np.arange(n)[:, None, None, None]
    ci = np.arange(c)[None, :, None, None]
    np.add.at(dx, (ni, ci, idx), dy)
    return dx.reshape(n, c, hi, wi)


def label_components(mask):
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    current = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j] and labels[i, j] == 0:
                current += 1
                labels[i, j] = current
                stack = [(i, j)]
                while stack:
                    y, x = stack.pop()
                    for ny in range(max(y - 1, 0), min(y + 2, h)):
                        for nx in range(max(x - 1, 0), min(x + 2, w)):
                            if mask[ny, nx] and labels[ny, nx] == 0:
                                labels[ny, nx] = current
                                stack.append((ny, nx))
    return labels
