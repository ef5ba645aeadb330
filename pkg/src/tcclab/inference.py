"""Bridging frame sequences to model tensors and Illuminant estimates.

Estimators are callables mapping a FrameSequence to an Illuminant; the torch
models, the gray-world baseline, and the ground-truth oracle all fit behind
the same interface so evaluation and benchmarking stay model-agnostic.
"""

from __future__ import annotations

import zlib

import numpy as np
import torch

from tcclab.color import Illuminant, gray_world
from tcclab.data.sequence import FrameSequence
from tcclab.data.transforms import FrameSelection, pseudo_zoom, resize_frame, select_frames


def frames_to_tensor(frames, resolution: int) -> torch.Tensor:
    """Stack frames into a [T, 3, resolution, resolution] float64 tensor."""
    arrays = [resize_frame(f, resolution).data.transpose(2, 0, 1) for f in frames]
    return torch.from_numpy(np.ascontiguousarray(np.stack(arrays)))


def prepare_inputs(
    sequence: FrameSequence,
    selection: FrameSelection,
    resolution: int,
    rng: np.random.Generator,
    pz_length: int | None = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Select frames and build the (sequence, pseudo-zoom) tensor pair."""
    selected = select_frames(sequence, selection)
    seq_tensor = frames_to_tensor(selected.frames, resolution)
    length = pz_length if pz_length is not None else len(selected)
    pz_frames = pseudo_zoom(selected.shot_frame, length, rng, resolution)
    return seq_tensor, frames_to_tensor(pz_frames, resolution)


def _sequence_rng(seed: int, sequence: FrameSequence) -> np.random.Generator:
    tag = zlib.crc32((sequence.sequence_id or "").encode())
    return np.random.default_rng([seed, tag])


class ModelEstimator:
    """Deterministic sequence -> Illuminant wrapper around a torch model.

    The pseudo-zoom path rng derives from (seed, sequence id) so repeated
    calls on the same sequence are identical.
    """

    def __init__(
        self,
        model: torch.nn.Module,
        selection: FrameSelection | None = None,
        resolution: int | None = None,
        pz_length: int | None = None,
        seed: int = 0,
    ):
        self.model = model
        self.selection = selection or FrameSelection.full()
        self.resolution = resolution or model.model_config.backbone.input_resolution
        self.pz_length = pz_length
        self.seed = seed

    def __call__(self, sequence: FrameSequence) -> Illuminant:
        rng = _sequence_rng(self.seed, sequence)
        seq_t, pz_t = prepare_inputs(
            sequence, self.selection, self.resolution, rng, self.pz_length
        )
        with torch.no_grad():
            estimate, _ = self.model(seq_t, pz_t)
        return Illuminant.from_array(estimate.detach().cpu().numpy())


class GrayWorldEstimator:
    """Static baseline: gray-world on the shot frame."""

    def __call__(self, sequence: FrameSequence) -> Illuminant:
        return gray_world(sequence.shot_frame)


class OracleEstimator:
    """Returns the ground truth; pins the zero of the evaluation pipeline."""

    def __call__(self, sequence: FrameSequence) -> Illuminant:
        if sequence.ground_truth is None:
            raise ValueError(f"sequence {sequence.sequence_id!r} has no ground truth")
        return sequence.ground_truth
