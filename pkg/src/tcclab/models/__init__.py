from tcclab.models.backbone import (
    BackboneConfig,
    FrameRegressor,
    IlluminantHead,
    SqueezeStyleBackbone,
    TinyBackbone,
    build_backbone,
)
from tcclab.models.c4 import C4Cascade, C4Encoder, C4Run, SingleFrameC4
from tcclab.models.cascade import CascadeRun, CascadingNet
from tcclab.models.checkpoint import (
    CheckpointError,
    checkpoint_meta,
    load_checkpoint,
    read_checkpoint,
    save_checkpoint,
    write_checkpoint,
)
from tcclab.models.convlstm import ConvLSTMCell
from tcclab.models.factory import (
    CascadeConfig,
    ModelConfig,
    ModelKind,
    build_model,
    parameter_count,
    trains_with_mal,
)
from tcclab.models.tccnet import TCCNet, TemporalBranch

__all__ = [
    "BackboneConfig",
    "C4Cascade",
    "C4Encoder",
    "C4Run",
    "CascadeConfig",
    "CascadeRun",
    "CascadingNet",
    "CheckpointError",
    "ConvLSTMCell",
    "FrameRegressor",
    "IlluminantHead",
    "ModelConfig",
    "ModelKind",
    "SingleFrameC4",
    "SqueezeStyleBackbone",
    "TCCNet",
    "TemporalBranch",
    "TinyBackbone",
    "build_backbone",
    "build_model",
    "checkpoint_meta",
    "load_checkpoint",
    "parameter_count",
    "read_checkpoint",
    "save_checkpoint",
    "trains_with_mal",
    "write_checkpoint",
]
