"""Per-frame cascades: estimate, correct the original image, re-estimate.

Every stage estimate multiplies into a running product; the next stage always
sees the ORIGINAL frame divided by that product (algebraically equivalent to
re-correcting corrected frames, without compounding float error). Estimate
components are clamped to >= 1e-4 before entering the correction divisor and
a diagnostic counter records when the clamp fires.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import torch
from torch import nn

logger = logging.getLogger(__name__)

CORRECTION_FLOOR = 1e-4


def _count_clamped(estimate: torch.Tensor, owner: nn.Module) -> None:
    clamped = int((estimate < CORRECTION_FLOOR).sum().item())
    if clamped:
        owner.last_clamp_count += clamped
        logger.warning(
            "%s: %d estimate component(s) below %.0e clamped before correction",
            type(owner).__name__, clamped, CORRECTION_FLOOR,
        )


@dataclass
class C4Run:
    """Stage-by-stage record of one per-frame cascade pass."""

    estimates: list[torch.Tensor]       # each [B, 3], unit norm
    cumulative: list[torch.Tensor]      # raw running products [B, 3]
    stage_inputs: list[torch.Tensor]    # image each stage saw [B, 3, H, W]

    @property
    def final(self) -> torch.Tensor:
        product = self.cumulative[-1]
        return product / product.norm(dim=1, keepdim=True)


class C4Cascade(nn.Module):
    """Cascade of per-frame regressors (any modules mapping [B,3,H,W] -> [B,3])."""

    def __init__(self, stages):
        super().__init__()
        stages = list(stages)
        if not stages:
            raise ValueError("cascade needs at least one stage")
        self.stages = nn.ModuleList(stages)
        self.last_clamp_count = 0

    def run(self, images: torch.Tensor) -> C4Run:
        self.last_clamp_count = 0
        b = images.shape[0]
        cum_raw = torch.ones(b, 3, dtype=images.dtype, device=images.device)
        cum_div = cum_raw.clone()
        current = images
        run = C4Run(estimates=[], cumulative=[], stage_inputs=[])
        for index, stage in enumerate(self.stages):
            run.stage_inputs.append(current)
            estimate = stage(current)
            _count_clamped(estimate, self)
            run.estimates.append(estimate)
            cum_raw = cum_raw * estimate
            run.cumulative.append(cum_raw)
            if index + 1 < len(self.stages):
                cum_div = cum_div * estimate.clamp(min=CORRECTION_FLOOR)
                current = images / cum_div.view(b, 3, 1, 1)
        return run


class C4Encoder(nn.Module):
    """Per-frame cascading encoder: correction stages feed a bare backbone.

    The estimate head of the last cascade stage is removed so the backbone's
    feature map (computed on the fully corrected frame) goes straight to the
    recurrent component.
    """

    def __init__(self, correction_stages, final_backbone: nn.Module):
        super().__init__()
        self.corrections = nn.ModuleList(list(correction_stages))
        self.final_backbone = final_backbone
        self.feature_channels = final_backbone.feature_channels
        self.last_clamp_count = 0

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        self.last_clamp_count = 0
        b = images.shape[0]
        cum_div = torch.ones(b, 3, dtype=images.dtype, device=images.device)
        current = images
        for stage in self.corrections:
            estimate = stage(current)
            _count_clamped(estimate, self)
            cum_div = cum_div * estimate.clamp(min=CORRECTION_FLOOR)
            current = images / cum_div.view(b, 3, 1, 1)
        return self.final_backbone(current)


class SingleFrameC4(nn.Module):
    """Single-frame estimator: the per-frame cascade applied to the shot frame."""

    def __init__(self, cascade: C4Cascade):
        super().__init__()
        self.cascade = cascade

    def forward(
        self, sequence: torch.Tensor, pseudo_zoom: torch.Tensor
    ) -> tuple[torch.Tensor, list[torch.Tensor]]:
        run = self.cascade.run(sequence[-1:])
        return run.final[0], [e[0] for e in run.estimates]
