"""Fully convolutional per-frame encoders and the illuminant regression head.

Two variants: ``tiny`` (three strided convs, meant for CPU desk-scale runs)
and ``squeeze_style`` (fire modules with squeeze/expand 1x1-3x3 branches).
Both reduce spatial dims by a stride product of 8. The regressor head emits a
per-location 3-channel map, pools it globally (mean, or confidence-weighted
when enabled), and returns a positive unit 3-vector per frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn


@dataclass(frozen=True)
class BackboneConfig:
    variant: str = "tiny"
    input_resolution: int = 64
    pretrained_weights: str | None = None

    def __post_init__(self):
        if self.variant not in ("tiny", "squeeze_style"):
            raise ValueError(f"unknown backbone variant {self.variant!r}")
        if self.input_resolution < 16:
            raise ValueError(f"input resolution must be >= 16, got {self.input_resolution}")


class TinyBackbone(nn.Module):
    """Three strided 3x3 convs; stride product 8."""

    stride = 8

    def __init__(self, feature_channels: int = 16):
        super().__init__()
        self.feature_channels = feature_channels
        mid = max(8, feature_channels // 2)
        self.net = nn.Sequential(
            nn.Conv2d(3, mid, 3, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(mid, feature_channels, 3, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(feature_channels, feature_channels, 3, stride=2, padding=1),
            nn.ReLU(inplace=True),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


class Fire(nn.Module):
    def __init__(self, in_channels: int, squeeze: int, expand: int):
        super().__init__()
        self.squeeze = nn.Conv2d(in_channels, squeeze, 1)
        self.expand1 = nn.Conv2d(squeeze, expand, 1)
        self.expand3 = nn.Conv2d(squeeze, expand, 3, padding=1)
        self.act = nn.ReLU(inplace=True)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        s = self.act(self.squeeze(x))
        return self.act(torch.cat([self.expand1(s), self.expand3(s)], dim=1))


class SqueezeStyleBackbone(nn.Module):
    """Shrunk squeeze/expand architecture; stride product 8."""

    stride = 8

    def __init__(self, feature_channels: int = 64):
        super().__init__()
        if feature_channels % 2:
            raise ValueError("squeeze_style feature channels must be even")
        half = feature_channels // 2
        self.feature_channels = feature_channels
        self.stem = nn.Sequential(
            nn.Conv2d(3, half, 3, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
        )
        self.fire1 = Fire(half, half // 4, half // 2)
        self.fire2 = Fire(half, half // 4, half)
        self.pool = nn.MaxPool2d(2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.stem(x)
        x = self.fire1(x)
        x = self.fire2(x)
        return self.pool(x)


def build_backbone(config: BackboneConfig, feature_channels: int | None = None) -> nn.Module:
    if config.variant == "tiny":
        backbone = TinyBackbone(feature_channels or 16)
    else:
        backbone = SqueezeStyleBackbone(feature_channels or 64)
    if config.pretrained_weights is not None:
        state = torch.load(Path(config.pretrained_weights), weights_only=True)
        backbone.load_state_dict(state)
    return backbone


class IlluminantHead(nn.Module):
    """Per-location 3-channel map, globally pooled, positive, unit norm."""

    def __init__(self, in_channels: int, confidence_pooling: bool = False):
        super().__init__()
        self.confidence_pooling = confidence_pooling
        out_channels = 4 if confidence_pooling else 3
        self.proj = nn.Conv2d(in_channels, out_channels, 1)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        m = self.proj(features)
        if self.confidence_pooling:
            rgb, conf = m[:, :3], m[:, 3:4]
            weights = nn.functional.softplus(conf) + 1e-6
            pooled = (rgb * weights).sum(dim=(2, 3)) / weights.sum(dim=(2, 3))
        else:
            pooled = m[:, :3].mean(dim=(2, 3))
        positive = pooled.abs().clamp(min=1e-9)
        return positive / positive.norm(dim=1, keepdim=True)


class FrameRegressor(nn.Module):
    """Backbone + head: batch of frames -> batch of unit illuminant estimates."""

    def __init__(self, backbone: nn.Module, confidence_pooling: bool = False):
        super().__init__()
        self.backbone = backbone
        self.head = IlluminantHead(backbone.feature_channels, confidence_pooling)

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        return self.head(self.backbone(frames))
