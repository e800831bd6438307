"""Numba-jitted kernels (fast path).

Same contracts as ``backend_numpy``: float64 images, row-major, borders
clamped to the nearest edge pixel where a window leaves the image.
"""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def bilateral(img, sigma_s, sigma_c, rho):
    """Edge-preserving smoothing over a (2*rho+1)^2 window.

    Weights: exp(-spatial_dist2/sigma_s^2) * exp(-intensity_diff2/sigma_c^2).
    Spatial distance uses the nominal (unclamped) window offset; the sampled
    intensity comes from the clamped coordinate.
    """
    h, w = img.shape
    out = np.empty((h, w))
    inv_s = 1.0 / (sigma_s * sigma_s)
    inv_c = 1.0 / (sigma_c * sigma_c)
    for u in range(h):
        for v in range(w):
            center = img[u, v]
            num = 0.0
            den = 0.0
            for x in range(u - rho, u + rho + 1):
                xc = min(max(x, 0), h - 1)
                dx2 = float((x - u) * (x - u))
                for y in range(v - rho, v + rho + 1):
                    yc = min(max(y, 0), w - 1)
                    diff = img[xc, yc] - center
                    d2 = dx2 + (y - v) * (y - v)
                    wgt = np.exp(-(d2 * inv_s)) * np.exp(-(diff * diff * inv_c))
                    # accumulate deviations so a constant image is an exact
                    # fixed point
                    num += wgt * diff
                    den += wgt
            out[u, v] = center + num / den
    return out


@njit(cache=True)
def window_sum(img, radius):
    """Sum of the (2*radius+1)^2 window around each pixel, clamped borders."""
    h, w = img.shape
    out = np.empty((h, w))
    for u in range(h):
        for v in range(w):
            acc = 0.0
            for x in range(u - radius, u + radius + 1):
                xc = min(max(x, 0), h - 1)
                for y in range(v - radius, v + radius + 1):
                    yc = min(max(y, 0), w - 1)
                    acc += img[xc, yc]
            out[u, v] = acc
    return out


@njit(cache=True)
def conv2d_forward(x, w, b, stride, padding):
    """Cross-correlation of NCHW input with KCkk weights plus bias."""
    n, c, hi, wi = x.shape
    k, _, kh, kw = w.shape
    ho = (hi + 2 * padding - kh) // stride + 1
    wo = (wi + 2 * padding - kw) // stride + 1
    out = np.empty((n, k, ho, wo))
    for i in range(n):
        for f in range(k):
            for oy in range(ho):
                y0 = oy * stride - padding
                for ox in range(wo):
                    x0 = ox * stride - padding
                    acc = b[f]
                    for ch in range(c):
                        for ky in range(kh):
                            yy = y0 + ky
                            if yy < 0 or yy >= hi:
                                continue
                            for kx in range(kw):
                                xx = x0 + kx
                                if xx < 0 or xx >= wi:
                                    continue
                                acc += x[i, ch, yy, xx] * w[f, ch, ky, kx]
                    out[i, f, oy, ox] = acc
    return out


@njit(cache=True)
def conv2d_backward(x, w, dy, stride, padding):
    """Gradients of conv2d_forward w.r.t. input, weights and bias."""
    n, c, hi, wi = x.shape
    k, _, kh, kw = w.shape
    ho = dy.shape[2]
    wo = dy.shape[3]
    dx = np.zeros_like(x)
    dw = np.zeros_like(w)
    db = np.zeros(k)
    for i in range(n):
        for f in range(k):
            for oy in range(ho):
                y0 = oy * stride - padding
                for ox in range(wo):
                    x0 = ox * stride - padding
                    g = dy[i, f, oy, ox]
                    db[f] += g
                    for ch in range(c):
                        for ky in range(kh):
                            yy = y0 + ky
                            if yy < 0 or yy >= hi:
                                continue
                            for kx in range(kw):
                                xx = x0 + kx
                                if xx < 0 or xx >= wi:
                                    continue
                                dw[f, ch, ky, kx] += g * x[i, ch, yy, xx]
                                dx[i, ch, yy, xx] += g * w[f, ch, ky, kx]
    return dx, dw, db


@njit(cache=True)
def maxpool_forward(x, window, stride):
    """Windowed max over NCHW input; returns output and flat argmax indices.

    Ties go to the first maximum in row-major window order.
    """
    n, c, hi, wi = x.shape
    ho = (hi - window) // stride + 1
    wo = (wi - window) // stride + 1
    out = np.empty((n, c, ho, wo))
    idx = np.empty((n, c, ho, wo), dtype=np.int64)
    for i in range(n):
        for ch in range(c):
            for oy in range(ho):
                y0 = oy * stride
                for ox in range(wo):
                    x0 = ox * stride
                    best = x[i, ch, y0, x0]
                    best_at = y0 * wi + x0
                    for ky in range(window):
                        for kx in range(window):
                            v = x[i, ch, y0 + ky, x0 + kx]
                            if v > best:
                                best = v
                                best_at = (y0 + ky) * wi + (x0 + kx)
                    out[i, ch, oy, ox] = best
                    idx[i, ch, oy, ox] = best_at
    return out, idx


@njit(cache=True)
def maxpool_backward(dy, idx, hi, wi):
    """Scatter pooled gradients back to the argmax positions."""
    n, c, ho, wo = dy.shape
    dx = np.zeros((n, c, hi, wi))
    for i in range(n):
        for ch in range(c):
            for oy in range(ho):
                for ox in range(wo):
                    flat = idx[i, ch, oy, ox]
                    dx[i, ch, flat // wi, flat % wi] += dy[i, ch, oy, ox]
    return dx


@njit(cache=True)
def label_components(mask):
    """8-connected component labels for a boolean mask.

    Background is 0; components are numbered 1..n in raster-scan order of
    their first pixel.
    """
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    stack = np.empty((h * w, 2), dtype=np.int32)
    current = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j] and labels[i, j] == 0:
                current += 1
                labels[i, j] = current
                stack[0, 0] = i
                stack[0, 1] = j
                top = 1
                while top > 0:
                    top -= 1
                    y = stack[top, 0]
                    x = stack[top, 1]
                    for dy in range(-1, 2):
                        ny = y + dy
                        if ny < 0 or ny >= h:
                            continue
                        for dx in range(-1, 2):
                            nx = x + dx
                            if nx < 0 or nx >= w:
                                continue
                            if mask[ny, nx] and labels[ny, nx] == 0:
                                labels[ny, nx] = current
                                stack[top, 0] = ny
                                stack[top, 1] = nx
                                top += 1
    return labels
