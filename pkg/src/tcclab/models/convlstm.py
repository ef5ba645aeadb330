"""Convolutional LSTM cell: convolutions in both input-to-state and
state-to-state transitions, four-gate formulation."""

from __future__ import annotations

import torch
from torch import nn


class ConvLSTMCell(nn.Module):
    def __init__(self, input_channels: int, hidden_channels: int, kernel_size: int = 5):
        super().__init__()
        if kernel_size % 2 == 0:
            raise ValueError(f"kernel size must be odd, got {kernel_size}")
        self.input_channels = input_channels
        self.hidden_channels = hidden_channels
        self.gates = nn.Conv2d(
            input_channels + hidden_channels,
            4 * hidden_channels,
            kernel_size,
            padding=kernel_size // 2,
        )

    def init_state(self, reference: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Zero hidden/cell state matching the reference input's batch and spatial dims."""
        b, _, h, w = reference.shape
        shape = (b, self.hidden_channels, h, w)
        zeros = torch.zeros(shape, dtype=reference.dtype, device=reference.device)
        return zeros, zeros.clone()

    def forward(
        self, x: torch.Tensor, state: tuple[torch.Tensor, torch.Tensor]
    ) -> tuple[torch.Tensor, torch.Tensor]:
        hidden, cell = state
        if hidden.shape[-2:] != x.shape[-2:]:
            raise ValueError(
                f"state spatial dims {tuple(hidden.shape[-2:])} do not match input "
                f"{tuple(x.shape[-2:])}"
            )
        gates = self.gates(torch.cat([x, hidden], dim=1))
        i, f, o, g = gates.chunk(4, dim=1)
        i = torch.sigmoid(i)
        f = torch.sigmoid(f)
        o = torch.sigmoid(o)
        g = torch.tanh(g)
        cell_next = f * cell + i * g
        hidden_next = o * torch.tanh(cell_next)
        return hidden_next, cell_next
