"""Two-branch temporal estimator.

The temporal branch encodes the original frames, the shot branch encodes the
pseudo-zoom sequence; each branch runs its own ConvLSTM over the encodings
(zero initial state). The two final hidden states are concatenated, spatially
mean-pooled, and a fully connected head maps them to a positive unit
3-vector.
"""

from __future__ import annotations

import torch
from torch import nn

from tcclab.models.convlstm import ConvLSTMCell


class TemporalBranch(nn.Module):
    def __init__(self, encoder: nn.Module, lstm: ConvLSTMCell):
        super().__init__()
        self.encoder = encoder
        self.lstm = lstm

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        """[T, 3, H, W] -> final hidden state [1, hidden, H', W']."""
        encodings = self.encoder(frames)
        state = self.lstm.init_state(encodings[:1])
        for t in range(encodings.shape[0]):
            state = self.lstm(encodings[t:t + 1], state)
        return state[0]


class TCCNet(nn.Module):
    """Original-sequence branch + pseudo-zoom branch, merged by an FC head."""

    def __init__(self, temporal_branch: TemporalBranch, shot_branch: TemporalBranch,
                 hidden_channels: int):
        super().__init__()
        self.temporal_branch = temporal_branch
        self.shot_branch = shot_branch
        self.head = nn.Linear(2 * hidden_channels, 3)

    def forward(
        self, sequence: torch.Tensor, pseudo_zoom: torch.Tensor
    ) -> tuple[torch.Tensor, list[torch.Tensor]]:
        if sequence.shape[0] < 1 or pseudo_zoom.shape[0] < 1:
            raise ValueError("sequence and pseudo-zoom inputs must be non-empty")
        hidden_a = self.temporal_branch(sequence)
        hidden_b = self.shot_branch(pseudo_zoom)
        merged = torch.cat([hidden_a, hidden_b], dim=1).mean(dim=(2, 3))
        raw = self.head(merged)[0]
        positive = raw.abs().clamp(min=1e-9)
        estimate = positive / positive.norm()
        return estimate, [estimate]
