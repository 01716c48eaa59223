"""Modified local binary patterns (MLBP).

Each interior pixel gets a label in ``0..P+1``: the number of neighbours
at least as bright as the centre when the circular bit pattern has at
most ``U_T`` 0/1 transitions, and ``P+1`` otherwise. The feature vector
is the normalized histogram of those labels.

Neighbour ``k`` (0-based) sits at angle ``2*pi*k/P`` counter-clockwise
from +x, with image rows growing downwards, so ``dy = -R*sin(theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import DataError, ImageTooSmallError
from .imageprep import PreprocessConfig, as_gray, preprocess

SNAP_TOL = 1e-6


@dataclass(frozen=True)
class NeighborhoodSpec:
    P: int = 8
    R: float = 1.0
    U_T: int | None = None

    def __post_init__(self):
        if int(self.P) != self.P or self.P < 4:
            raise ValueError(f"P must be an integer >= 4, got {self.P}")
        if not self.R > 0:
            raise ValueError(f"R must be > 0, got {self.R}")
        object.__setattr__(self, "P", int(self.P))
        object.__setattr__(self, "R", float(self.R))
        if self.U_T is None:
            object.__setattr__(self, "U_T", self.P // 4)
        if int(self.U_T) != self.U_T or not 0 <= self.U_T <= self.P:
            raise ValueError(f"U_T must be an integer in [0, P], got {self.U_T}")
        object.__setattr__(self, "U_T", int(self.U_T))

    @property
    def margin(self) -> int:
        return math.ceil(self.R)

    @property
    def n_labels(self) -> int:
        return self.P + 2

    @cached_property
    def offsets(self) -> np.ndarray:
        """``(P, 2)`` array of ``(dx, dy)`` sampling offsets."""
        return _circle_offsets(self.P, self.R)


def _snap(v):
    r = round(v)
    return float(r) if abs(v - r) <= SNAP_TOL else v


def _circle_offsets(P, R):
    if P % 4:
        ks = range(P)
        pts = [(_snap(R * math.cos(2 * math.pi * k / P)),
                _snap(-R * math.sin(2 * math.pi * k / P))) for k in ks]
        return np.array(pts)
    # build one quadrant and rotate it by exact 90-degree steps:
    # (dx, dy) -> (dy, -dx), so a rotated image samples bit-identical values
    q = P // 4
    quad = [(_snap(R * math.cos(2 * math.pi * k / P)),
             _snap(-R * math.sin(2 * math.pi * k / P))) for k in range(q)]
    pts = []
    for _ in range(4):
        pts.extend(quad)
        quad = [(dy, -dx) for dx, dy in quad]
    return np.array(pts) + 0.0  # drop negative zeros


@dataclass(frozen=True)
class BinaryPattern:
    """Ordered comparison bits ``b_1..b_P``; ``b_1`` is the least significant."""

    bits: tuple = field()

    @classmethod
    def from_code(cls, code: int, P: int) -> "BinaryPattern":
        if not 0 <= code < 2 ** P:
            raise ValueError(f"code {code} out of range for P={P}")
        return cls(tuple((code >> k) & 1 for k in range(P)))

    @classmethod
    def from_string(cls, s: str) -> "BinaryPattern":
        """Parse ``"01001100"`` as ``b_1 = 0, b_2 = 1, ...``."""
        return cls(tuple(int(c) for c in s))

    @property
    def P(self) -> int:
        return len(self.bits)

    @property
    def code(self) -> int:
        return sum(b << k for k, b in enumerate(self.bits))

    @property
    def ones(self) -> int:
        return sum(self.bits)


PatternLike = Union[BinaryPattern, Sequence[int], str]


def _bits(pattern: PatternLike) -> tuple:
    if isinstance(pattern, BinaryPattern):
        return pattern.bits
    if isinstance(pattern, str):
        return BinaryPattern.from_string(pattern).bits
    return tuple(int(b) for b in pattern)


def bilinear_at(img, fx: float, fy: float) -> float:
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    if not (-SNAP_TOL <= fx <= w - 1 + SNAP_TOL and -SNAP_TOL <= fy <= h - 1 + SNAP_TOL):
        raise DataError(f"sample point ({fx}, {fy}) outside a {w}x{h} image")
    fx, fy = _snap(fx), _snap(fy)
    x0 = min(int(math.floor(fx)), w - 1)
    y0 = min(int(math.floor(fy)), h - 1)
    a, b = fx - x0, fy - y0
    if a == 0 and b == 0:
        return float(img[y0, x0])
    x1, y1 = min(x0 + 1, w - 1), min(y0 + 1, h - 1)
    return float((1 - a) * (1 - b) * img[y0, x0] + a * (1 - b) * img[y0, x1]
                 + (1 - a) * b * img[y1, x0] + a * b * img[y1, x1])


def _check_interior(shape, spec):
    m = spec.margin
    h, w = shape
    if h <= 2 * m or w <= 2 * m:
        raise ImageTooSmallError(
            f"{w}x{h} image has no interior pixels for radius {spec.R}")


def sample_neighbors(img, xc: int, yc: int, spec: NeighborhoodSpec) -> np.ndarray:
    """Intensities ``g_1..g_P`` around the interior pixel ``(xc, yc)``."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    m = spec.margin
    if not (m <= xc < w - m and m <= yc < h - m):
        raise DataError(f"({xc}, {yc}) is not an interior pixel for radius {spec.R}")
    return np.array([bilinear_at(img, xc + dx, yc + dy) for dx, dy in spec.offsets])


def lbp_code(gc: float, neighbors) -> BinaryPattern:
    return BinaryPattern(tuple(1 if g - gc >= 0 else 0 for g in neighbors))


def uniformity(pattern: PatternLike) -> int:
    """Number of circular 0/1 transitions in the pattern."""
    bits = _bits(pattern)
    return sum(bits[k] != bits[k - 1] for k in range(len(bits)))


def label_for_pattern(pattern: PatternLike, U_T: int) -> int:
    bits = _bits(pattern)
    return sum(bits) if uniformity(bits) <= U_T else len(bits) + 1


def mlbp_label(gc: float, neighbors, spec: NeighborhoodSpec) -> int:
    if len(neighbors) != spec.P:
        raise ValueError(f"expected {spec.P} neighbours, got {len(neighbors)}")
    return label_for_pattern(lbp_code(gc, neighbors), spec.U_T)


def _axis_taps(v):
    """Integer shifts and interpolation weights along one axis.

    Weights come from ``|v|`` only, so ``v`` and ``-v`` use bit-identical
    weights (needed for exact rotation behaviour).
    """
    s = -1 if v < 0 else 1
    av = abs(v)
    n = math.floor(av)
    f = av - n  # exact
    if f <= SNAP_TOL:
        return [(s * n, 1.0)]
    if f >= 1 - SNAP_TOL:
        return [(s * (n + 1), 1.0)]
    return [(s * n, 1.0 - f), (s * (n + 1), f)]


def neighbor_differences(img, spec: NeighborhoodSpec) -> np.ndarray:
    """``g_k - g_c`` for every interior pixel, shape ``(P, h, w)``.

    Each bilinear sample is formed from centre-relative differences and
    its (up to four) weighted terms are added in sorted order, so the
    result does not depend on which axis is interpolated first and a
    sample that lands exactly on the centre value reads as a tie.
    """
    img = np.asarray(img, dtype=np.float64)
    _check_interior(img.shape, spec)
    m = spec.margin
    H, W = img.shape
    h, w = H - 2 * m, W - 2 * m
    center = img[m:m + h, m:m + w]
    out = np.empty((spec.P, h, w))
    for k, (dx, dy) in enumerate(spec.offsets):
        terms = []
        for sy, wy in _axis_taps(dy):
            for sx, wx in _axis_taps(dx):
                d = img[m + sy:m + sy + h, m + sx:m + sx + w] - center
                terms.append(d if wx * wy == 1.0 else (wx * wy) * d)
        if len(terms) == 1:
            out[k] = terms[0]
            continue
        terms = np.sort(np.stack(terms), axis=0)
        acc = terms[0] + terms[1]
        for t in terms[2:]:
            acc = acc + t
        out[k] = acc
    return out


def label_image(img, spec: NeighborhoodSpec | None = None) -> np.ndarray:
    """MLBP label of every interior pixel, shape ``(H - 2m, W - 2m)``."""
    spec = spec or NeighborhoodSpec()
    bits = neighbor_differences(img, spec) >= 0
    ones = bits.sum(axis=0)
    transitions = (bits != np.roll(bits, 1, axis=0)).sum(axis=0)
    return np.where(transitions <= spec.U_T, ones, spec.P + 1).astype(np.intp)


def histogram_features(labels, spec: NeighborhoodSpec | None = None) -> np.ndarray:
    """Occurrence probability of each label, length ``P + 2``."""
    spec = spec or NeighborhoodSpec()
    labels = np.asarray(labels)
    if labels.size == 0:
        raise DataError("empty label image")
    if labels.min() < 0 or labels.max() > spec.P + 1:
        raise ValueError(f"labels must lie in [0, {spec.P + 1}]")
    counts = np.bincount(labels.ravel(), minlength=spec.P + 2)
    return counts / labels.size


SpecLike = Union[NeighborhoodSpec, Sequence[NeighborhoodSpec], None]


def as_specs(spec: SpecLike) -> tuple:
    if spec is None:
        return (NeighborhoodSpec(),)
    if isinstance(spec, NeighborhoodSpec):
        return (spec,)
    specs = tuple(spec)
    if not specs:
        raise ValueError("at least one NeighborhoodSpec is required")
    return specs


def feature_dim(spec: SpecLike) -> int:
    return sum(s.P + 2 for s in as_specs(spec))


def extract(img, spec: SpecLike = None, cfg: PreprocessConfig | None = None) -> np.ndarray:
    """Preprocess ``img`` and return its MLBP feature vector.

    Passing several specs concatenates one histogram per scale; each block
    sums to 1 on its own.
    """
    img = preprocess(as_gray(img), cfg or PreprocessConfig())
    return np.concatenate([histogram_features(label_image(img, s), s)
                           for s in as_specs(spec)])
