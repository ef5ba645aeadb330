"""Training loop: RMSprop over per-sequence angular / multiply-accumulate loss.

Sequences are visited in a seeded shuffled order, one gradient step per
``batch_size`` items (the source protocol uses batch size 1). Each item goes
through frame selection, augmentation, and pseudo-zoom generation with an rng
derived from (seed, epoch, item) so runs are reproducible. The checkpoint
with the lowest validation mean angular error is returned.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
import torch

from tcclab.color import angular_error
from tcclab.data.sequence import FrameSequence
from tcclab.data.transforms import (
    AugmentSpec,
    FrameSelection,
    augment,
    pseudo_zoom,
    select_frames,
)
from tcclab.inference import ModelEstimator, frames_to_tensor
from tcclab.losses import angular_loss, mal_loss
from tcclab.models.backbone import BackboneConfig
from tcclab.models.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from tcclab.models.factory import (
    CascadeConfig,
    ModelConfig,
    ModelKind,
    build_model,
    trains_with_mal,
)

logger = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    def __init__(self, sequence_id: str | None, epoch: int):
        super().__init__(
            f"non-finite loss on sequence {sequence_id!r} in epoch {epoch}; aborting"
        )
        self.sequence_id = sequence_id
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    learning_rate: float = 3e-5
    batch_size: int = 1
    optimizer: str = "rmsprop_style"
    cascade: CascadeConfig = field(default_factory=CascadeConfig)
    seed: int = 0
    frame_selection: FrameSelection = field(default_factory=FrameSelection.full)
    backbone: BackboneConfig = field(default_factory=BackboneConfig)
    hidden_channels: int = 128
    kernel_size: int = 5
    augment_spec: AugmentSpec | None = field(default_factory=AugmentSpec)
    pz_length: int | None = None
    rmsprop_decay: float = 0.99
    rmsprop_epsilon: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0.0:
            raise ValueError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        if self.optimizer != "rmsprop_style":
            raise ValueError(f"unsupported optimizer {self.optimizer!r}")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    val_error: float
    seconds: float


@dataclass(frozen=True)
class TrainReport:
    records: tuple[EpochRecord, ...]
    best_epoch: int
    best_val_error: float


def model_config_for(kind: ModelKind, config: TrainConfig) -> ModelConfig:
    return ModelConfig(
        kind=kind,
        backbone=config.backbone,
        hidden_channels=config.hidden_channels,
        kernel_size=config.kernel_size,
        cascade=config.cascade,
    )


def warm_start(model: torch.nn.Module, checkpoint: bytes) -> None:
    """Initialize every cascade stage from a non-cascading checkpoint."""
    base = load_checkpoint(checkpoint)
    expected = {
        ModelKind.C_TCCNET: ModelKind.TCCNET,
        ModelKind.C_TCCNET_C4: ModelKind.TCCNET_C4,
    }.get(model.kind)
    if expected is None:
        raise CheckpointError(f"{model.kind.value} does not take a warm-start checkpoint")
    if base.kind is not expected:
        raise CheckpointError(
            f"warm start for {model.kind.value} needs a {expected.value} checkpoint, "
            f"got {base.kind.value}"
        )
    state = base.state_dict()
    for stage in model.stages:
        stage.load_state_dict(state, strict=True)


def validate_model(
    model: torch.nn.Module,
    sequences,
    selection: FrameSelection,
    seed: int = 0,
    pz_length: int | None = None,
) -> float:
    """Mean angular error (degrees) over sequences with ground truth."""
    estimator = ModelEstimator(
        model, selection=selection, pz_length=pz_length, seed=seed
    )
    errors = [
        angular_error(estimator(seq), seq.ground_truth)
        for seq in sequences
        if seq.ground_truth is not None
    ]
    if not errors:
        raise ValueError("validation needs at least one sequence with ground truth")
    return float(np.mean(errors))


def _item_loss(model, kind: ModelKind, seq_t, pz_t, truth: torch.Tensor) -> torch.Tensor:
    estimate, stages = model(seq_t, pz_t)
    if trains_with_mal(kind):
        return mal_loss(stages, truth)
    return angular_loss(estimate, truth)


def train_model(
    kind: ModelKind,
    config: TrainConfig,
    train_data: list[FrameSequence],
    val_data: list[FrameSequence],
    init_from: bytes | None = None,
) -> tuple[bytes, TrainReport]:
    if not train_data:
        raise ValueError("training needs at least one sequence")
    if any(seq.ground_truth is None for seq in train_data):
        raise ValueError("every training sequence needs a ground truth")
    if not val_data:
        val_data = train_data

    model = build_model(model_config_for(kind, config), seed=config.seed)
    if init_from is not None:
        warm_start(model, init_from)
    optimizer = torch.optim.RMSprop(
        model.parameters(),
        lr=config.learning_rate,
        alpha=config.rmsprop_decay,
        eps=config.rmsprop_epsilon,
    )
    resolution = config.backbone.input_resolution

    records: list[EpochRecord] = []
    best_val = math.inf
    best_epoch = 0
    best_checkpoint: bytes | None = None

    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        order = np.random.default_rng([config.seed, epoch]).permutation(len(train_data))
        losses = []
        model.train()
        optimizer.zero_grad()
        pending = 0
        for idx in order:
            seq = train_data[int(idx)]
            item_rng = np.random.default_rng([config.seed, epoch, int(idx)])
            selected = select_frames(seq, config.frame_selection)
            if config.augment_spec is not None:
                selected = augment(selected, config.augment_spec, item_rng)
            seq_t = frames_to_tensor(selected.frames, resolution)
            pz_len = config.pz_length if config.pz_length is not None else len(selected)
            pz_t = frames_to_tensor(
                pseudo_zoom(selected.shot_frame, pz_len, item_rng, resolution), resolution
            )
            truth = torch.from_numpy(seq.ground_truth.as_array())
            loss = _item_loss(model, kind, seq_t, pz_t, truth)
            if not torch.isfinite(loss):
                raise TrainingDiverged(seq.sequence_id, epoch)
            (loss / config.batch_size).backward()
            pending += 1
            if pending == config.batch_size:
                optimizer.step()
                optimizer.zero_grad()
                pending = 0
            losses.append(float(loss.item()))
        if pending:
            optimizer.step()
            optimizer.zero_grad()

        model.eval()
        val_error = validate_model(
            model, val_data, config.frame_selection, seed=config.seed,
            pz_length=config.pz_length,
        )
        record = EpochRecord(
            epoch=epoch,
            loss=float(np.mean(losses)),
            val_error=val_error,
            seconds=time.perf_counter() - started,
        )
        records.append(record)
        logger.info(
            "epoch %d: loss %.5f, val %.3f deg, %.1fs",
            record.epoch, record.loss, record.val_error, record.seconds,
        )
        if val_error < best_val:
            best_val = val_error
            best_epoch = epoch
            best_checkpoint = save_checkpoint(
                model, meta={"epoch": epoch, "val_error": val_error}
            )

    report = TrainReport(
        records=tuple(records), best_epoch=best_epoch, best_val_error=best_val
    )
    return best_checkpoint, report
