"""Differentiable angular losses (radians).

The cosine is clamped to [-1 + 1e-12, 1 - 1e-12] before arccos: exactly
parallel or anti-parallel inputs land in the clamped region, which gives them
a zero sub-gradient and keeps the loss finite (at the cost of a ~1.4e-6 rad
offset there). Reported errors use the exact degree-valued counterpart in
:mod:`tcclab.color`.
"""

from __future__ import annotations

import torch

_ACOS_EPS = 1e-12


def _as_vector(value) -> torch.Tensor:
    if isinstance(value, torch.Tensor):
        vec = value
    else:
        as_array = getattr(value, "as_array", None)
        vec = torch.as_tensor(as_array() if as_array else value, dtype=torch.float64)
    if vec.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {tuple(vec.shape)}")
    return vec


def angular_loss(estimate, truth) -> torch.Tensor:
    """Angle between estimate and truth in radians (scalar tensor)."""
    e = _as_vector(estimate)
    t = _as_vector(truth)
    ne = e.norm()
    nt = t.norm()
    if ne.item() == 0.0 or nt.item() == 0.0:
        raise ValueError("zero-norm vector has no direction")
    cosine = (e * t).sum() / (ne * nt)
    cosine = cosine.clamp(-1.0, 1.0).clamp(-1.0 + _ACOS_EPS, 1.0 - _ACOS_EPS)
    return torch.acos(cosine)


def mal_loss(stage_estimates, truth) -> torch.Tensor:
    """Multiply-accumulate loss: sum of angular losses of all running
    stage-estimate products against the ground truth."""
    stages = [_as_vector(s) for s in stage_estimates]
    if not stages:
        raise ValueError("MAL loss needs at least one stage estimate")
    t = _as_vector(truth)
    total = None
    product = torch.ones(3, dtype=stages[0].dtype, device=stages[0].device)
    for stage in stages:
        product = product * stage
        term = angular_loss(product, t)
        total = term if total is None else total + term
    return total
