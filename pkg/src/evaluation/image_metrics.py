"""Image reconstruction metrics on [0, 1] images."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.utils.errors import ShapeError

PSNR_CAP = 99.0
MSE_FLOOR = 1e-10
SSIM_WINDOW = 8
SSIM_STRIDE = 4
SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def _pair(pred: np.ndarray, gt: np.ndarray):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ShapeError(f"image shapes differ: {pred.shape} vs {gt.shape}")
    return pred, gt


def psnr(pred: np.ndarray, gt: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB for unit peak, capped at 99 dB."""
    pred, gt = _pair(pred, gt)
    mse = float(np.mean((pred - gt) ** 2))
    if mse < MSE_FLOOR:
        return PSNR_CAP
    return float(min(PSNR_CAP, 10.0 * np.log10(1.0 / mse)))


def to_luma(image: np.ndarray) -> np.ndarray:
    """(H, W, 3) RGB → (H, W) luma; 2-D input passes through."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        return image
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ShapeError(f"expected (H, W) or (H, W, 3), got {image.shape}")
    return image @ LUMA_WEIGHTS


def ssim(pred: np.ndarray, gt: np.ndarray) -> float:
    """Mean SSIM of luma over 8×8 windows taken with stride 4.

    Window statistics use biased (population) variance and covariance.

    Raises:
        ShapeError: If shapes differ or the image is smaller than one window.
    """
    pred, gt = _pair(pred, gt)
    x, y = to_luma(pred), to_luma(gt)
    if x.shape[0] < SSIM_WINDOW or x.shape[1] < SSIM_WINDOW:
        raise ShapeError(f"image {x.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    wx = sliding_window_view(x, (SSIM_WINDOW, SSIM_WINDOW))[::SSIM_STRIDE, ::SSIM_STRIDE]
    wy = sliding_window_view(y, (SSIM_WINDOW, SSIM_WINDOW))[::SSIM_STRIDE, ::SSIM_STRIDE]
    mu_x = wx.mean(axis=(-1, -2))
    mu_y = wy.mean(axis=(-1, -2))
    dx = wx - mu_x[..., None, None]
    dy = wy - mu_y[..., None, None]
    var_x = (dx * dx).mean(axis=(-1, -2))
    var_y = (dy * dy).mean(axis=(-1, -2))
    cov = (dx * dy).mean(axis=(-1, -2))
    numerator = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2)
    denominator = (mu_x**2 + mu_y**2 + SSIM_C1) * (var_x + var_y + SSIM_C2)
    return float(np.mean(numerator / denominator))
