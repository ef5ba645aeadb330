"""Sequence-level cascading: iterate a two-branch submodule coarse-to-fine.

Each stage predicts the shot-frame illuminant from the current sequences; the
running product of stage estimates corrects every frame of BOTH the original
and pseudo-zoom sequences (always dividing the original inputs by the
cumulative product) before the next stage runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from tcclab.models.c4 import CORRECTION_FLOOR, _count_clamped


@dataclass
class CascadeRun:
    """Stage-by-stage record of one sequence-level cascade pass."""

    estimate: torch.Tensor                    # final, unit norm [3]
    stage_estimates: list[torch.Tensor]       # per stage [3], unit norm
    cumulative: list[torch.Tensor]            # raw running products [3]
    stage_inputs_seq: list[torch.Tensor]      # sequence each stage saw
    stage_inputs_pz: list[torch.Tensor]       # pseudo-zoom each stage saw


class CascadingNet(nn.Module):
    """Cascade over submodules with the two-branch forward signature."""

    def __init__(self, stages):
        super().__init__()
        stages = list(stages)
        if not stages:
            raise ValueError("cascade needs at least one stage")
        self.stages = nn.ModuleList(stages)
        self.last_clamp_count = 0

    def run_cascade(self, sequence: torch.Tensor, pseudo_zoom: torch.Tensor) -> CascadeRun:
        self.last_clamp_count = 0
        cum_raw = torch.ones(3, dtype=sequence.dtype, device=sequence.device)
        cum_div = cum_raw.clone()
        cur_seq, cur_pz = sequence, pseudo_zoom
        estimates: list[torch.Tensor] = []
        cumulative: list[torch.Tensor] = []
        inputs_seq: list[torch.Tensor] = []
        inputs_pz: list[torch.Tensor] = []
        for index, stage in enumerate(self.stages):
            inputs_seq.append(cur_seq)
            inputs_pz.append(cur_pz)
            estimate, _ = stage(cur_seq, cur_pz)
            _count_clamped(estimate, self)
            estimates.append(estimate)
            cum_raw = cum_raw * estimate
            cumulative.append(cum_raw)
            if index + 1 < len(self.stages):
                cum_div = cum_div * estimate.clamp(min=CORRECTION_FLOOR)
                divisor = cum_div.view(1, 3, 1, 1)
                cur_seq = sequence / divisor
                cur_pz = pseudo_zoom / divisor
        final = cum_raw / cum_raw.norm()
        return CascadeRun(
            estimate=final,
            stage_estimates=estimates,
            cumulative=cumulative,
            stage_inputs_seq=inputs_seq,
            stage_inputs_pz=inputs_pz,
        )

    def forward(
        self, sequence: torch.Tensor, pseudo_zoom: torch.Tensor
    ) -> tuple[torch.Tensor, list[torch.Tensor]]:
        run = self.run_cascade(sequence, pseudo_zoom)
        return run.estimate, run.stage_estimates
