"""Image loading and the smoothing/resizing preprocessing stage.

Images are plain 2-D ``float64`` numpy arrays indexed ``[y, x]`` with
intensities in [0, 255]. Nothing is re-quantized after smoothing or
resizing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyImageError, ImageReadError, UnsupportedFormatError

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


@dataclass(frozen=True)
class PreprocessConfig:
    target_size: int = 128
    gaussian_sigma: float = 1.0
    kernel_radius: int = 2
    smoothing_enabled: bool = True

    def __post_init__(self):
        if self.target_size < 1:
            raise ValueError("target_size must be >= 1")
        if not self.gaussian_sigma > 0:
            raise ValueError("gaussian_sigma must be > 0")
        if self.kernel_radius < 1:
            raise ValueError("kernel_radius must be >= 1")


def as_gray(pixels) -> np.ndarray:
    """Validate ``pixels`` as a grayscale image and return a float64 copy."""
    img = np.array(pixels, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {img.shape}")
    if img.size == 0:
        raise EmptyImageError(f"image has zero dimension {img.shape}")
    if not np.all(np.isfinite(img)) or img.min() < 0 or img.max() > 255:
        raise ValueError("intensities must lie in [0, 255]")
    return img


def rgb_to_gray(rgb) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = LUMA_WEIGHTS
    gray = r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]
    # the weights sum to 1 only up to rounding
    return np.clip(gray, 0.0, 255.0)


def _read_pgm(data: bytes, path) -> np.ndarray:
    magic = data[:2]
    pos = 2
    header = []
    for _ in range(3):
        m = _PGM_TOKEN.match(data, pos)
        if m is None:
            raise ImageReadError(f"{path}: truncated PGM header")
        header.append(m.group(1))
        pos = m.end()
    try:
        width, height, maxval = (int(t) for t in header)
    except ValueError:
        raise ImageReadError(f"{path}: malformed PGM header") from None
    if width <= 0 or height <= 0:
        raise EmptyImageError(f"{path}: image has zero dimension ({width}x{height})")
    if not 0 < maxval < 65536:
        raise ImageReadError(f"{path}: invalid PGM maxval {maxval}")
    n = width * height

    if magic == b"P5":
        pos += 1  # single whitespace byte ends the header
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[pos:pos + n * dtype.itemsize]
        if len(raw) < n * dtype.itemsize:
            raise ImageReadError(f"{path}: truncated PGM raster")
        values = np.frombuffer(raw, dtype=dtype).astype(np.float64)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
        if len(body) < n:
            raise ImageReadError(f"{path}: truncated PGM raster")
        try:
            values = np.array([int(t) for t in body[:n]], dtype=np.float64)
        except ValueError:
            raise ImageReadError(f"{path}: non-numeric PGM sample") from None
    if values.max() > maxval:
        raise ImageReadError(f"{path}: sample exceeds maxval {maxval}")
    if maxval != 255:
        values = values * (255.0 / maxval)
    return values.reshape(height, width)


def _read_png(path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "P":
                im = im.convert("RGBA" if "transparency" in im.info else "RGB")
                mode = im.mode
            arr = np.asarray(im)
    except UnidentifiedImageError:
        raise UnsupportedFormatError(f"{path}: not a decodable PNG") from None
    except (OSError, SyntaxError, ValueError) as exc:
        raise ImageReadError(f"{path}: {exc}") from None

    if arr.size == 0:
        raise EmptyImageError(f"{path}: image has zero dimension")
    if mode in ("L", "1"):
        return arr.astype(np.float64) * (255.0 if mode == "1" else 1.0)
    if mode == "LA":
        return arr[..., 0].astype(np.float64)
    if mode in ("RGB", "RGBA"):
        return rgb_to_gray(arr[..., :3])
    if mode.startswith("I;16") or mode == "I":
        return arr.astype(np.float64) * (255.0 / 65535.0)
    raise UnsupportedFormatError(f"{path}: unsupported PNG mode {mode!r}")


def load_image(path) -> np.ndarray:
    """Read a PGM (P2/P5) or PNG file as a float64 grayscale image.

    RGB input is reduced with BT.601 luma. Samples with a maximum other
    than 255 (16-bit PNG/PGM, PGM with a small maxval) are rescaled to
    [0, 255].
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageReadError(f"{path}: {exc.strerror or exc}") from None

    if data[:2] in (b"P2", b"P5"):
        img = _read_pgm(data, path)
    elif data[:8] == b"\x89PNG\r\n\x1a\n":
        img = _read_png(path)
    else:
        raise UnsupportedFormatError(f"{path}: not a PGM (P2/P5) or PNG file")
    return as_gray(img)


def gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    """Truncated 1-D Gaussian of half-width ``radius``, normalized to sum 1."""
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    if radius < 1:
        raise ValueError("kernel_radius must be >= 1")
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _smooth_axis(img, kernel, axis):
    r = len(kernel) // 2
    n = img.shape[axis]
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    padded = np.pad(img, pad, mode="edge")
    out = img.copy()
    # accumulate weighted differences from the centre so that constant
    # regions come out bit-exact
    for i, w in enumerate(kernel):
        if i == r:
            continue
        shifted = padded[i:i + n, :] if axis == 0 else padded[:, i:i + n]
        out += w * (shifted - img)
    return out


def gaussian_smooth(img, sigma: float = 1.0, kernel_radius: int = 2) -> np.ndarray:
    """Separable Gaussian blur with replicate (clamp-to-edge) borders."""
    img = as_gray(img)
    kernel = gaussian_kernel(sigma, kernel_radius)
    out = _smooth_axis(_smooth_axis(img, kernel, 1), kernel, 0)
    return np.clip(out, 0.0, 255.0)


def _resize_axis(img, size, axis):
    src_size = img.shape[axis]
    dst = np.arange(size, dtype=np.float64)
    src = (dst + 0.5) * (src_size / size) - 0.5
    src = np.clip(src, 0.0, src_size - 1)
    i0 = np.floor(src).astype(np.intp)
    i1 = np.minimum(i0 + 1, src_size - 1)
    t = src - i0
    if axis == 0:
        a, b, t = img[i0, :], img[i1, :], t[:, None]
    else:
        a, b = img[:, i0], img[:, i1]
    return a + t * (b - a)


def resize_bilinear(img, size: int) -> np.ndarray:
    """Resize to ``size`` x ``size`` with bilinear interpolation.

    Uses the half-pixel-centre mapping ``src = (dst + 0.5) * scale - 0.5``
    clamped to the source grid.
    """
    if size < 1:
        raise ValueError("target size must be >= 1")
    img = as_gray(img)
    out = _resize_axis(_resize_axis(img, size, 1), size, 0)
    return np.clip(out, 0.0, 255.0)


def preprocess(img, cfg: PreprocessConfig | None = None) -> np.ndarray:
    cfg = cfg or PreprocessConfig()
    img = as_gray(img)
    if cfg.smoothing_enabled:
        img = gaussian_smooth(img, cfg.gaussian_sigma, cfg.kernel_radius)
    return resize_bilinear(img, cfg.target_size)
