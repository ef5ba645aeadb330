"""Model construction from declarative configs.

Five kinds: the single-frame per-frame cascade, the two-branch temporal net
(plain backbone or per-frame-cascade encoders), and the sequence-level
cascading wrappers around either temporal net. Cascade stages have
independent weights by default; a tying flag shares one stage instance for
memory-constrained runs. All models are built in float64.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import torch
from torch import nn

from tcclab.models.backbone import BackboneConfig, FrameRegressor, build_backbone
from tcclab.models.c4 import C4Cascade, C4Encoder, SingleFrameC4
from tcclab.models.cascade import CascadingNet
from tcclab.models.convlstm import ConvLSTMCell
from tcclab.models.tccnet import TCCNet, TemporalBranch


class ModelKind(str, Enum):
    TCCNET = "tccnet"
    TCCNET_C4 = "tccnet-c4"
    C_TCCNET = "c-tccnet"
    C_TCCNET_C4 = "c-tccnet-c4"
    SINGLE_FRAME_C4 = "c4"

    @classmethod
    def parse(cls, text: str) -> "ModelKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown model kind {text!r}; expected one of "
                f"{[k.value for k in cls]}"
            ) from None


CASCADING_KINDS = frozenset(
    {ModelKind.SINGLE_FRAME_C4, ModelKind.C_TCCNET, ModelKind.C_TCCNET_C4}
)


def trains_with_mal(kind: ModelKind) -> bool:
    """Cascading kinds are supervised on all partial products (MAL loss)."""
    return kind in CASCADING_KINDS


@dataclass(frozen=True)
class CascadeConfig:
    stages: int = 3
    inner_c4_stages: int = 3

    def __post_init__(self):
        if self.stages < 1:
            raise ValueError(f"cascade stages must be >= 1, got {self.stages}")
        if self.inner_c4_stages < 1:
            raise ValueError(f"inner stages must be >= 1, got {self.inner_c4_stages}")


@dataclass(frozen=True)
class ModelConfig:
    kind: ModelKind
    backbone: BackboneConfig = field(default_factory=BackboneConfig)
    hidden_channels: int = 128
    kernel_size: int = 5
    cascade: CascadeConfig = field(default_factory=CascadeConfig)
    confidence_pooling: bool = False
    tie_cascade_weights: bool = False

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["kind"] = self.kind.value
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "ModelConfig":
        return cls(
            kind=ModelKind.parse(payload["kind"]),
            backbone=BackboneConfig(**payload["backbone"]),
            hidden_channels=int(payload["hidden_channels"]),
            kernel_size=int(payload["kernel_size"]),
            cascade=CascadeConfig(**payload["cascade"]),
            confidence_pooling=bool(payload["confidence_pooling"]),
            tie_cascade_weights=bool(payload["tie_cascade_weights"]),
        )


def _regressor(config: ModelConfig) -> FrameRegressor:
    return FrameRegressor(
        build_backbone(config.backbone), confidence_pooling=config.confidence_pooling
    )


def _encoder(config: ModelConfig) -> nn.Module:
    """Per-frame encoder for one branch: bare backbone, or a C4 encoder."""
    if config.kind in (ModelKind.TCCNET, ModelKind.C_TCCNET):
        return build_backbone(config.backbone)
    corrections = [_regressor(config) for _ in range(config.cascade.inner_c4_stages - 1)]
    return C4Encoder(corrections, build_backbone(config.backbone))


def _tccnet(config: ModelConfig) -> TCCNet:
    def branch() -> TemporalBranch:
        encoder = _encoder(config)
        lstm = ConvLSTMCell(
            encoder.feature_channels, config.hidden_channels, config.kernel_size
        )
        return TemporalBranch(encoder, lstm)

    return TCCNet(branch(), branch(), config.hidden_channels)


def _stage_list(config: ModelConfig, make_stage) -> list[nn.Module]:
    if config.tie_cascade_weights:
        stage = make_stage()
        return [stage] * config.cascade.stages
    return [make_stage() for _ in range(config.cascade.stages)]


def build_model(config: ModelConfig, seed: int | None = None) -> nn.Module:
    """Construct the configured model in double precision.

    A seed makes the random parameter initialization reproducible.
    """
    if seed is not None:
        torch.manual_seed(seed)
    if config.kind is ModelKind.SINGLE_FRAME_C4:
        n = config.cascade.inner_c4_stages
        if config.tie_cascade_weights:
            stages = [_regressor(config)] * n
        else:
            stages = [_regressor(config) for _ in range(n)]
        model: nn.Module = SingleFrameC4(C4Cascade(stages))
    elif config.kind in (ModelKind.TCCNET, ModelKind.TCCNET_C4):
        model = _tccnet(config)
    else:
        stage_kind = (
            ModelKind.TCCNET if config.kind is ModelKind.C_TCCNET else ModelKind.TCCNET_C4
        )
        stage_config = replace(config, kind=stage_kind)
        model = CascadingNet(_stage_list(config, lambda: _tccnet(stage_config)))
    model = model.to(torch.float64)
    model.kind = config.kind
    model.model_config = config
    return model


def parameter_count(model: nn.Module) -> int:
    """Number of scalar parameters (shared tensors counted once)."""
    seen = set()
    total = 0
    for p in model.parameters():
        if id(p) not in seen:
            seen.add(id(p))
            total += p.numel()
    return total
