"""Synthetic sequences for desk-scale verification.

Each frame is a random piecewise-constant colour mosaic (the canonical,
cast-free scene) multiplied channel-wise by a unit-norm illuminant from the
configured trajectory. Casting with unit illuminants means correcting a frame
by the ground truth recovers the canonical mosaic exactly, which the cascade
oracle tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from tcclab.color import ColorDomainError, Illuminant, ImageFrame
from tcclab.data.sequence import FrameSequence


class Trajectory(str, Enum):
    CONSTANT = "constant"
    DRIFT = "drift"
    SWITCH = "switch"


@dataclass(frozen=True)
class SynthConfig:
    frames: int
    height: int
    width: int
    trajectory: Trajectory = Trajectory.CONSTANT
    start_illuminant: tuple[float, float, float] | None = None
    end_illuminant: tuple[float, float, float] | None = None
    switch_at: int | None = None
    tile_size: int = 8
    scene_mean: tuple[float, float, float] = (0.5, 0.5, 0.5)

    def __post_init__(self):
        if self.frames < 1:
            raise ColorDomainError(f"need at least one frame, got {self.frames}")
        if self.height < 1 or self.width < 1:
            raise ColorDomainError(f"bad dimensions {self.height}x{self.width}")
        if self.tile_size < 1:
            raise ColorDomainError(f"tile size must be >= 1, got {self.tile_size}")
        if any(m <= 0.0 for m in self.scene_mean):
            raise ColorDomainError(f"scene mean must be positive, got {self.scene_mean}")
        if self.trajectory is Trajectory.SWITCH:
            if self.frames < 2:
                raise ColorDomainError("switch trajectory needs at least 2 frames")
            k = self.switch_at if self.switch_at is not None else self.frames // 2
            if not (1 <= k <= self.frames - 1):
                raise ColorDomainError(f"switch index {k} outside [1, {self.frames - 1}]")


@dataclass(frozen=True)
class SynthScene:
    """A synthetic sequence plus the cast-free frames and per-frame illuminants."""

    sequence: FrameSequence
    canonical_frames: tuple[ImageFrame, ...]
    illuminants: tuple[Illuminant, ...]


def _sample_illuminant(rng: np.random.Generator) -> Illuminant:
    return Illuminant.from_array(rng.uniform(0.25, 1.0, 3)).normalize()


def _trajectory_illuminants(config: SynthConfig, rng: np.random.Generator) -> tuple[Illuminant, ...]:
    start = (
        Illuminant.from_array(config.start_illuminant).normalize()
        if config.start_illuminant is not None
        else _sample_illuminant(rng)
    )
    if config.trajectory is Trajectory.CONSTANT:
        return tuple(start for _ in range(config.frames))
    end = (
        Illuminant.from_array(config.end_illuminant).normalize()
        if config.end_illuminant is not None
        else _sample_illuminant(rng)
    )
    if config.trajectory is Trajectory.SWITCH:
        k = config.switch_at if config.switch_at is not None else config.frames // 2
        return tuple(start if t < k else end for t in range(config.frames))
    if config.frames == 1:
        return (start,)
    a, b = start.as_array(), end.as_array()
    steps = np.linspace(0.0, 1.0, config.frames)
    return tuple(
        Illuminant.from_array((1.0 - s) * a + s * b).normalize() for s in steps
    )


def _mosaic(config: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    tiles_y = -(-config.height // config.tile_size)
    tiles_x = -(-config.width // config.tile_size)
    colors = rng.uniform(0.1, 1.0, (tiles_y, tiles_x, 3))
    data = np.repeat(np.repeat(colors, config.tile_size, axis=0), config.tile_size, axis=1)
    data = data[: config.height, : config.width]
    # force the configured canonical channel means, then fit into [0, 1]
    means = data.reshape(-1, 3).mean(axis=0)
    data = data * (np.asarray(config.scene_mean) / means).reshape(1, 1, 3)
    peak = data.max()
    if peak > 1.0:
        data = data / peak
    return data


def synth_scene(
    config: SynthConfig,
    rng: np.random.Generator,
    sequence_id: str | None = None,
) -> SynthScene:
    """Deterministic synthetic scene given the generator state."""
    illuminants = _trajectory_illuminants(config, rng)
    canonical = []
    cast = []
    for light in illuminants:
        scene = _mosaic(config, rng)
        canonical.append(ImageFrame(scene))
        cast.append(ImageFrame(scene * light.as_array().reshape(1, 1, 3)))
    sequence = FrameSequence(
        frames=tuple(cast),
        ground_truth=illuminants[-1],
        sequence_id=sequence_id,
    )
    return SynthScene(
        sequence=sequence,
        canonical_frames=tuple(canonical),
        illuminants=illuminants,
    )


def synth_sequence(
    config: SynthConfig,
    rng: np.random.Generator,
    sequence_id: str | None = None,
) -> FrameSequence:
    return synth_scene(config, rng, sequence_id).sequence
