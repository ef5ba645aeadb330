"""Geometric transforms: augmentation, pseudo-zoom paths, frame selection.

One augmentation transform is sampled per sequence and applied identically to
every frame, preserving the temporal coherence the recurrent models consume.
Rotation fills borders by edge replication so augmented frames do not gain
black pixels that would bias illuminant statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import cv2
import numpy as np

from tcclab.color import ColorDomainError, ImageFrame
from tcclab.data.sequence import FrameSequence


@dataclass(frozen=True)
class AugmentSpec:
    rotation_range: tuple[float, float] = (-30.0, 30.0)
    crop_ratio_range: tuple[float, float] = (0.8, 1.0)
    hflip_probability: float = 0.5

    def __post_init__(self):
        lo, hi = self.rotation_range
        if lo != -hi:
            raise ColorDomainError(f"rotation range must be symmetric, got {self.rotation_range}")
        clo, chi = self.crop_ratio_range
        if not (0.0 < clo <= chi <= 1.0):
            raise ColorDomainError(f"crop ratio range must lie in (0, 1], got {self.crop_ratio_range}")
        if not (0.0 <= self.hflip_probability <= 1.0):
            raise ColorDomainError(f"flip probability must lie in [0, 1], got {self.hflip_probability}")


class SelectionStrategy(str, Enum):
    FULL = "full"
    LAST_K = "last_k"
    FIRST_MEDIAN_SHOT = "first_median_shot"


@dataclass(frozen=True)
class FrameSelection:
    """Which frames of a sequence feed the estimator; the shot frame always stays."""

    strategy: SelectionStrategy
    k: int | None = None

    def __post_init__(self):
        if self.strategy is SelectionStrategy.LAST_K:
            if self.k is None or self.k < 1:
                raise ColorDomainError(f"last-k selection requires k >= 1, got {self.k}")
        elif self.k is not None:
            raise ColorDomainError(f"{self.strategy.value} selection takes no k")

    @classmethod
    def full(cls) -> "FrameSelection":
        return cls(SelectionStrategy.FULL)

    @classmethod
    def last_k(cls, k: int) -> "FrameSelection":
        return cls(SelectionStrategy.LAST_K, k=k)

    @classmethod
    def first_median_shot(cls) -> "FrameSelection":
        return cls(SelectionStrategy.FIRST_MEDIAN_SHOT)

    @classmethod
    def parse(cls, text: str) -> "FrameSelection":
        """Parse 'full', 'last:<k>', or 'first-median-shot' / 'fms'."""
        value = text.strip().lower()
        if value == "full":
            return cls.full()
        if value in ("first-median-shot", "first_median_shot", "fms"):
            return cls.first_median_shot()
        if value.startswith("last:"):
            try:
                return cls.last_k(int(value.split(":", 1)[1]))
            except ValueError as exc:
                raise ColorDomainError(f"bad last-k selection {text!r}") from exc
        raise ColorDomainError(f"unknown frame selection {text!r}")

    def spec(self) -> str:
        if self.strategy is SelectionStrategy.LAST_K:
            return f"last:{self.k}"
        if self.strategy is SelectionStrategy.FIRST_MEDIAN_SHOT:
            return "first-median-shot"
        return "full"

    def indices(self, length: int) -> list[int]:
        if length < 1:
            raise ColorDomainError("selection needs a non-empty sequence")
        if self.strategy is SelectionStrategy.FULL:
            return list(range(length))
        if self.strategy is SelectionStrategy.LAST_K:
            return list(range(max(0, length - self.k), length))
        picks = [0, (length - 1) // 2, length - 1]
        deduped: list[int] = []
        for idx in picks:
            if idx not in deduped:
                deduped.append(idx)
        return deduped


def select_frames(sequence: FrameSequence, selection: FrameSelection) -> FrameSequence:
    """Keep the selected frame subset; ground truth carries over."""
    indices = selection.indices(len(sequence))
    return sequence.with_frames(sequence.frames[i] for i in indices)


def _rotate(data: np.ndarray, angle: float) -> np.ndarray:
    h, w = data.shape[:2]
    center = ((w - 1) / 2.0, (h - 1) / 2.0)
    matrix = cv2.getRotationMatrix2D(center, angle, 1.0)
    return cv2.warpAffine(
        data, matrix, (w, h), flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REPLICATE
    )


def _resize(data: np.ndarray, height: int, width: int) -> np.ndarray:
    if data.shape[0] == height and data.shape[1] == width:
        return data
    shrink = data.shape[0] >= height and data.shape[1] >= width
    interp = cv2.INTER_AREA if shrink else cv2.INTER_LINEAR
    return cv2.resize(data, (width, height), interpolation=interp)


def resize_frame(frame: ImageFrame, size: int) -> ImageFrame:
    """Resize to size x size (area interpolation when shrinking)."""
    if frame.height == size and frame.width == size:
        return frame
    return ImageFrame(_resize(frame.data, size, size))


def augment(sequence: FrameSequence, spec: AugmentSpec, rng: np.random.Generator) -> FrameSequence:
    """Rotate, crop, and maybe flip every frame with one shared sampled transform."""
    angle = float(rng.uniform(*spec.rotation_range))
    ratio = float(rng.uniform(*spec.crop_ratio_range))
    offset_y = float(rng.uniform(0.0, 1.0))
    offset_x = float(rng.uniform(0.0, 1.0))
    flip = bool(rng.uniform(0.0, 1.0) < spec.hflip_probability)

    h = sequence.frames[0].height
    w = sequence.frames[0].width
    crop_h = max(1, round(ratio * h))
    crop_w = max(1, round(ratio * w))
    top = round(offset_y * (h - crop_h))
    left = round(offset_x * (w - crop_w))

    out = []
    for frame in sequence.frames:
        data = frame.data
        if angle != 0.0:
            data = _rotate(data, angle)
        if (crop_h, crop_w) != (h, w):
            data = data[top:top + crop_h, left:left + crop_w]
            data = _resize(data, h, w)
        if flip:
            data = data[:, ::-1]
        # warps can produce -1e-17 on exact zeros; the domain is non-negative
        out.append(ImageFrame(np.maximum(data, 0.0)))
    return sequence.with_frames(out)


def pseudo_zoom(
    shot: ImageFrame,
    length: int,
    rng: np.random.Generator,
    resolution: int = 64,
) -> tuple[ImageFrame, ...]:
    """Zoom path over the shot frame: square crops shrinking linearly from the
    full short side down to 50%, centers on a bounded random walk (step <= 5%
    of each dimension), every element resized to the model input resolution.
    The final element snaps back to the full shot frame so the recurrent
    branch ends on global context.
    """
    if length < 1:
        raise ColorDomainError(f"pseudo-zoom length must be >= 1, got {length}")
    if shot.height < 8 or shot.width < 8:
        raise ColorDomainError("pseudo-zoom needs a shot frame of at least 8x8")

    h, w = shot.height, shot.width
    full = resize_frame(shot, resolution)
    if length == 1:
        return (full,)

    short = min(h, w)
    ratios = np.linspace(1.0, 0.5, length - 1)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    out: list[ImageFrame] = []
    for ratio in ratios:
        side = max(4, round(float(ratio) * short))
        half = side / 2.0
        cy = float(np.clip(cy, half, h - half))
        cx = float(np.clip(cx, half, w - half))
        top = int(np.clip(round(cy - half), 0, h - side))
        left = int(np.clip(round(cx - half), 0, w - side))
        crop = shot.data[top:top + side, left:left + side]
        out.append(ImageFrame(_resize(crop, resolution, resolution)))
        cy += float(rng.uniform(-0.05, 0.05)) * h
        cx += float(rng.uniform(-0.05, 0.05)) * w
    out.append(full)
    return tuple(out)
