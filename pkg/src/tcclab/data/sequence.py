"""Frame sequences: ordered frames with ground truth on the shot frame only."""

from __future__ import annotations

from dataclasses import dataclass

from tcclab.color import ColorDomainError, Illuminant, ImageFrame


@dataclass(frozen=True)
class FrameSequence:
    """Ordered frames of one video clip; the last frame is the shot frame.

    Ground truth, when present, describes the shot frame illuminant and is
    stored unit-normalized.
    """

    frames: tuple[ImageFrame, ...]
    ground_truth: Illuminant | None = None
    sequence_id: str | None = None

    def __post_init__(self):
        frames = tuple(self.frames)
        if len(frames) < 1:
            raise ColorDomainError("a sequence needs at least one frame")
        h, w = frames[0].height, frames[0].width
        for i, frame in enumerate(frames):
            if frame.height != h or frame.width != w:
                raise ColorDomainError(
                    f"frame {i} is {frame.height}x{frame.width}, expected {h}x{w}"
                )
        object.__setattr__(self, "frames", frames)
        if self.ground_truth is not None:
            object.__setattr__(self, "ground_truth", self.ground_truth.normalize())

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def shot_index(self) -> int:
        return len(self.frames) - 1

    @property
    def shot_frame(self) -> ImageFrame:
        return self.frames[-1]

    def with_frames(self, frames) -> "FrameSequence":
        return FrameSequence(
            frames=tuple(frames),
            ground_truth=self.ground_truth,
            sequence_id=self.sequence_id,
        )
