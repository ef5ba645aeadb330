"""Core colour math: illuminants, von Kries correction, cascades, angular error.

All reported estimates and ground truths are unit L2 vectors; correction divides
by the raw (possibly unnormalized) illuminant so callers control scale. Errors
are reported in degrees; the differentiable loss counterpart (radians) lives in
:mod:`tcclab.losses`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ColorDomainError(ValueError):
    """Raised when a colour operation receives out-of-domain input."""


@dataclass(frozen=True)
class Illuminant:
    """Positive RGB gain triple (linear-RGB, dimensionless)."""

    r: float
    g: float
    b: float

    def __post_init__(self):
        for name, v in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not math.isfinite(v) or v <= 0.0:
                raise ColorDomainError(
                    f"illuminant component {name}={v!r} must be strictly positive and finite"
                )

    @classmethod
    def from_array(cls, values) -> "Illuminant":
        arr = np.asarray(values, dtype=np.float64).reshape(3)
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    @classmethod
    def normalized(cls, r: float, g: float, b: float) -> "Illuminant":
        """Construct with unit Euclidean norm."""
        return cls(r, g, b).normalize()

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def normalize(self) -> "Illuminant":
        return Illuminant.from_array(self.as_array() / self.norm())

    def scaled(self, factor: float) -> "Illuminant":
        if factor <= 0.0 or not math.isfinite(factor):
            raise ColorDomainError(f"scale factor must be positive and finite, got {factor!r}")
        return Illuminant(self.r * factor, self.g * factor, self.b * factor)


@dataclass(frozen=True)
class ImageFrame:
    """Linear-RGB raster, H x W x 3, channel order (r, g, b), values >= 0."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ColorDomainError(f"image must be HxWx3 with H,W >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ColorDomainError("image contains non-finite values")
        if np.any(arr < 0.0):
            raise ColorDomainError("image contains negative values")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class EstimateTrace:
    """Per-stage cascade estimates plus their running component-wise products.

    ``cumulative[i]`` is the raw product of ``stage_estimates[0..i]``; the
    externally reported estimate is the normalized final product.
    """

    stage_estimates: tuple[Illuminant, ...]
    cumulative: tuple[Illuminant, ...] = field(default=())

    def __post_init__(self):
        if len(self.stage_estimates) < 1:
            raise ColorDomainError("trace requires at least one stage estimate")
        if not self.cumulative:
            object.__setattr__(
                self, "cumulative", _running_products(self.stage_estimates)
            )
        if len(self.cumulative) != len(self.stage_estimates):
            raise ColorDomainError("cumulative length must match stage count")
        expected = _running_products(self.stage_estimates)
        for got, want in zip(self.cumulative, expected):
            if not np.allclose(got.as_array(), want.as_array(), rtol=1e-7, atol=0.0):
                raise ColorDomainError("cumulative entries must equal running stage products")

    def __len__(self) -> int:
        return len(self.stage_estimates)

    @property
    def final(self) -> Illuminant:
        """Unit-normalized product of all stages."""
        return self.cumulative[-1].normalize()


def _running_products(stages: tuple[Illuminant, ...]) -> tuple[Illuminant, ...]:
    out = []
    acc = np.ones(3, dtype=np.float64)
    for est in stages:
        acc = acc * est.as_array()
        out.append(Illuminant.from_array(acc))
    return tuple(out)


def angular_error(estimate: Illuminant, truth: Illuminant) -> float:
    """Angle in degrees between the two illuminant vectors, in [0, 180].

    The cosine argument is clamped to [-1, 1] to absorb floating-point
    overshoot on near-parallel vectors.
    """
    a = estimate.as_array()
    b = truth.as_array()
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ColorDomainError("zero-norm illuminant has no direction")
    cosine = float(np.dot(a, b) / (na * nb))
    cosine = min(1.0, max(-1.0, cosine))
    return math.degrees(math.acos(cosine))


def apply_correction(image: ImageFrame, illuminant: Illuminant) -> ImageFrame:
    """von Kries correction: divide each channel by the illuminant component.

    Corrected values are not clipped; downstream cascade stages rely on the
    full linear range.
    """
    divisor = illuminant.as_array().reshape(1, 1, 3)
    return ImageFrame(image.data / divisor)


def cumulative_estimate(stage_estimates) -> Illuminant:
    """Unit-normalized component-wise product of the stage estimates."""
    stages = tuple(stage_estimates)
    if not stages:
        raise ColorDomainError("cumulative estimate requires at least one stage")
    acc = np.ones(3, dtype=np.float64)
    for est in stages:
        acc = acc * est.as_array()
    return Illuminant.from_array(acc).normalize()


def gray_world(image: ImageFrame) -> Illuminant:
    """Static baseline: illuminant proportional to the per-channel means.

    Channel means are floored at 1e-9 so a dark-but-not-black channel still
    yields a valid (strictly positive) illuminant.
    """
    means = image.data.reshape(-1, 3).mean(axis=0)
    if np.all(means == 0.0):
        raise ColorDomainError("gray-world estimate undefined for an all-zero image")
    means = np.maximum(means, 1e-9)
    return Illuminant.from_array(means).normalize()
