"""8-bit image file IO (PNG and binary PPM) through Pillow."""

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.diffnum.precision import get_default_dtype
from src.utils.errors import DatasetIOError, ShapeError

SUPPORTED_SUFFIXES = (".png", ".ppm")


def quantize(image: np.ndarray) -> np.ndarray:
    """Round an [0, 1] image to the nearest of the 256 8-bit levels."""
    levels = np.round(np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0) * 255.0)
    return (levels / 255.0).astype(get_default_dtype())


def to_uint8(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ShapeError(f"expected an (H, W, 3) image, got {image.shape}")
    return np.round(np.clip(image.astype(np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def save_image(path: Union[str, Path], image: np.ndarray) -> Path:
    """Write an (H, W, 3) [0, 1] image; the format follows the suffix."""
    path = Path(path)
    if path.suffix.lower() not in SUPPORTED_SUFFIXES:
        raise DatasetIOError(str(path), f"unsupported image format '{path.suffix}'")
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_uint8(image)).save(path)
    return path


def load_image(
    path: Union[str, Path], expected_size: Optional[Tuple[int, int]] = None
) -> np.ndarray:
    """Read an 8-bit RGB image as (H, W, 3) floats ``k / 255``.

    Args:
        path: PNG or PPM file.
        expected_size: Optional (height, width) the image must have.

    Raises:
        DatasetIOError: If the file is missing, truncated, unreadable or of
            the wrong size.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetIOError(str(path), "image file not found")
    try:
        with Image.open(path) as img:
            img.load()
            array = np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise DatasetIOError(str(path), f"cannot read image ({exc})") from exc
    if expected_size is not None and array.shape[:2] != tuple(expected_size):
        raise DatasetIOError(
            str(path), f"image is {array.shape[1]}x{array.shape[0]}, manifest says "
            f"{expected_size[1]}x{expected_size[0]}"
        )
    return (array.astype(np.float64) / 255.0).astype(get_default_dtype())
