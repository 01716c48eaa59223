"""Synthetic two-class texture corpus and a tiny PGM writer for fixtures."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .imageprep import gaussian_smooth


def smooth_noise_image(rng: np.random.Generator, size: int = 64, sigma: float = 3.0) -> np.ndarray:
    """Low-frequency texture: uniform noise blurred, then stretched to [0, 255]."""
    noise = rng.uniform(0.0, 255.0, (size, size))
    img = gaussian_smooth(noise, sigma, max(1, int(np.ceil(3 * sigma))))
    lo, hi = img.min(), img.max()
    if hi == lo:
        return img
    return np.clip((img - lo) * (255.0 / (hi - lo)), 0.0, 255.0)


def binary_noise_image(rng: np.random.Generator, size: int = 64) -> np.ndarray:
    """High-frequency texture: independent black/white pixels."""
    return rng.integers(0, 2, (size, size)).astype(np.float64) * 255.0


def texture_corpus(n_per_class: int = 100, size: int = 64, seed: int = 0) -> list:
    """``(image, label)`` pairs, classes ``"smooth"`` then ``"binary"``."""
    rng = np.random.default_rng(seed)
    smooth = [(smooth_noise_image(rng, size), "smooth") for _ in range(n_per_class)]
    binary = [(binary_noise_image(rng, size), "binary") for _ in range(n_per_class)]
    return smooth + binary


def write_pgm(path, img, binary: bool = True) -> Path:
    """Write ``img`` (values rounded to 0..255) as an 8-bit PGM."""
    path = Path(path)
    data = np.clip(np.rint(np.asarray(img, dtype=np.float64)), 0, 255).astype(np.uint8)
    h, w = data.shape
    if binary:
        path.write_bytes(b"P5\n%d %d\n255\n" % (w, h) + data.tobytes())
    else:
        rows = "\n".join(" ".join(str(v) for v in r) for r in data)
        path.write_text(f"P2\n{w} {h}\n255\n{rows}\n")
    return path
