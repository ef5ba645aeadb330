from tcclab.data.dataset import (
    DatasetError,
    DatasetSplit,
    generate_dataset,
    load_dataset,
    load_split,
    make_splits,
    read_frame_png,
    write_dataset,
    write_frame_png,
    write_split,
)
from tcclab.data.sequence import FrameSequence
from tcclab.data.synth import SynthConfig, SynthScene, Trajectory, synth_scene, synth_sequence
from tcclab.data.transforms import (
    AugmentSpec,
    FrameSelection,
    SelectionStrategy,
    augment,
    pseudo_zoom,
    resize_frame,
    select_frames,
)

__all__ = [
    "AugmentSpec",
    "DatasetError",
    "DatasetSplit",
    "FrameSelection",
    "FrameSequence",
    "SelectionStrategy",
    "SynthConfig",
    "SynthScene",
    "Trajectory",
    "augment",
    "generate_dataset",
    "load_dataset",
    "load_split",
    "make_splits",
    "pseudo_zoom",
    "read_frame_png",
    "resize_frame",
    "select_frames",
    "synth_scene",
    "synth_sequence",
    "write_dataset",
    "write_frame_png",
    "write_split",
]
