"""Self-describing checkpoint container.

Payload: format version, model kind, full model config, parameter blobs keyed
by hierarchical module names, and free-form metadata. Loading rebuilds the
model from its config and restores parameters bit-exactly; corrupted or
version-mismatched blobs fail loudly with no partial model.
"""

from __future__ import annotations

import io
from dataclasses import replace
from pathlib import Path

import torch
from torch import nn

from tcclab.models.factory import ModelConfig, build_model

FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Raised when a checkpoint cannot be written or restored."""


def save_checkpoint(model: nn.Module, meta: dict | None = None) -> bytes:
    config = getattr(model, "model_config", None)
    if config is None:
        raise CheckpointError("model was not built by the factory; no config to save")
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": config.kind.value,
        "config": config.to_dict(),
        "state": model.state_dict(),
        "meta": dict(meta or {}),
    }
    buffer = io.BytesIO()
    torch.save(payload, buffer)
    return buffer.getvalue()


def write_checkpoint(path: Path | str, model: nn.Module, meta: dict | None = None) -> int:
    data = save_checkpoint(model, meta)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return len(data)


def _load_payload(data: bytes) -> dict:
    try:
        payload = torch.load(io.BytesIO(data), weights_only=True)
    except Exception as exc:
        raise CheckpointError(f"corrupted checkpoint: {exc}") from exc
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise CheckpointError("not a checkpoint container")
    version = payload["format_version"]
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"checkpoint format version {version} not supported (expected {FORMAT_VERSION})"
        )
    return payload


def load_checkpoint(data: bytes) -> nn.Module:
    payload = _load_payload(data)
    config = ModelConfig.from_dict(payload["config"])
    # the saved parameters override any pretrained init, so drop the hook path
    config = replace(config, backbone=replace(config.backbone, pretrained_weights=None))
    model = build_model(config)
    try:
        model.load_state_dict(payload["state"], strict=True)
    except RuntimeError as exc:
        raise CheckpointError(f"parameter blobs do not match the config: {exc}") from exc
    model.eval()
    return model


def read_checkpoint(path: Path | str) -> nn.Module:
    return load_checkpoint(Path(path).read_bytes())


def checkpoint_meta(data: bytes) -> dict:
    payload = _load_payload(data)
    return {"kind": payload["kind"], "config": payload["config"], **payload["meta"]}
