"""On-disk dataset layout and split management.

Layout::

    <root>/sequences/<id>/frame_0000.png ...   8- or 16-bit PNG, linear RGB
    <root>/groundtruth.json                    id -> [r, g, b]
    <root>/splits/<name>.json                  {"train": [...], "test": [...]}

The synthetic generator writes the same layout; an adapter for any published
dataset maps onto it.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from tcclab.color import ColorDomainError, Illuminant, ImageFrame
from tcclab.data.sequence import FrameSequence
from tcclab.data.synth import SynthConfig, synth_sequence


class DatasetError(ValueError):
    """Raised on malformed dataset layouts or split requests."""


@dataclass(frozen=True)
class DatasetSplit:
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "train_ids", tuple(self.train_ids))
        object.__setattr__(self, "test_ids", tuple(self.test_ids))
        if set(self.train_ids) & set(self.test_ids):
            raise DatasetError("train and test ids overlap")


def write_frame_png(path: Path, frame: ImageFrame, bit_depth: int = 16) -> None:
    if bit_depth not in (8, 16):
        raise DatasetError(f"bit depth must be 8 or 16, got {bit_depth}")
    peak = 255 if bit_depth == 8 else 65535
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    quantized = np.round(np.clip(frame.data, 0.0, 1.0) * peak).astype(dtype)
    if not cv2.imwrite(str(path), quantized[:, :, ::-1]):
        raise DatasetError(f"failed to write {path}")


def read_frame_png(path: Path) -> ImageFrame:
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DatasetError(f"failed to read {path}")
    if raw.ndim != 3 or raw.shape[2] < 3:
        raise DatasetError(f"{path} is not an RGB image")
    raw = raw[:, :, :3][:, :, ::-1]
    peak = 65535.0 if raw.dtype == np.uint16 else 255.0
    return ImageFrame(raw.astype(np.float64) / peak)


def load_dataset(root: Path | str) -> list[FrameSequence]:
    """Load every sequence under ``root``, frames ordered by filename."""
    root = Path(root)
    seq_root = root / "sequences"
    if not seq_root.is_dir():
        warnings.warn(f"no sequences directory under {root}; empty dataset")
        return []
    ids = sorted(p.name for p in seq_root.iterdir() if p.is_dir())
    if not ids:
        warnings.warn(f"no sequences under {seq_root}; empty dataset")
        return []

    gt_path = root / "groundtruth.json"
    if not gt_path.is_file():
        raise DatasetError(f"missing ground truth file {gt_path}")
    ground_truth = json.loads(gt_path.read_text())

    sequences = []
    for seq_id in ids:
        if seq_id not in ground_truth:
            raise DatasetError(f"sequence {seq_id!r} has no ground truth entry")
        frame_paths = sorted((seq_root / seq_id).glob("frame_*.png"))
        if not frame_paths:
            raise DatasetError(f"sequence {seq_id!r} has no frames")
        frames = [read_frame_png(p) for p in frame_paths]
        try:
            sequences.append(
                FrameSequence(
                    frames=tuple(frames),
                    ground_truth=Illuminant.from_array(ground_truth[seq_id]),
                    sequence_id=seq_id,
                )
            )
        except ColorDomainError as exc:
            raise DatasetError(f"sequence {seq_id!r}: {exc}") from exc
    return sequences


def write_dataset(
    root: Path | str,
    sequences: list[FrameSequence],
    bit_depth: int = 16,
) -> None:
    """Write sequences and ground truth in the documented layout."""
    root = Path(root)
    (root / "sequences").mkdir(parents=True, exist_ok=True)
    ground_truth = {}
    for seq in sequences:
        if seq.sequence_id is None:
            raise DatasetError("sequences need ids to be written")
        if seq.ground_truth is None:
            raise DatasetError(f"sequence {seq.sequence_id!r} has no ground truth")
        seq_dir = root / "sequences" / seq.sequence_id
        seq_dir.mkdir(parents=True, exist_ok=True)
        for i, frame in enumerate(seq.frames):
            write_frame_png(seq_dir / f"frame_{i:04d}.png", frame, bit_depth=bit_depth)
        ground_truth[seq.sequence_id] = list(seq.ground_truth.as_array())
    (root / "groundtruth.json").write_text(json.dumps(ground_truth, indent=2, sort_keys=True))


def generate_dataset(
    root: Path | str,
    config: SynthConfig,
    count: int,
    seed: int,
    bit_depth: int = 16,
) -> list[str]:
    """Synthesize ``count`` sequences into the layout; returns their ids."""
    if count < 1:
        raise DatasetError(f"need at least one sequence, got {count}")
    rng = np.random.default_rng(seed)
    sequences = [
        synth_sequence(config, rng, sequence_id=f"seq_{i:04d}") for i in range(count)
    ]
    write_dataset(root, sequences, bit_depth=bit_depth)
    return [s.sequence_id for s in sequences]


def _sequence_ids(dataset) -> list[str]:
    ids = []
    for item in dataset:
        if isinstance(item, str):
            ids.append(item)
        elif item.sequence_id is not None:
            ids.append(item.sequence_id)
        else:
            raise DatasetError("sequence without id cannot be split")
    if len(set(ids)) != len(ids):
        raise DatasetError("duplicate sequence ids")
    return ids


def make_splits(
    dataset,
    seed: int,
    count: int,
    benchmark: DatasetSplit | None = None,
) -> list[DatasetSplit]:
    """Deterministic 2/3-1/3 splits with pairwise-disjoint test sets.

    When a benchmark split is supplied it becomes the first result and only
    the remaining ``count - 1`` generated splits need mutually disjoint test
    sets (they may overlap the benchmark's, as in the source protocol).
    """
    ids = _sequence_ids(dataset)
    if not ids:
        raise DatasetError("cannot split an empty dataset")
    if count < 1:
        raise DatasetError(f"need at least one split, got {count}")
    n = len(ids)
    test_size = max(1, round(n / 3))
    generated = count - 1 if benchmark is not None else count
    if generated * test_size > n:
        raise DatasetError(
            f"{count} splits need {generated * test_size} disjoint test items "
            f"but only {n} sequences exist"
        )

    rng = np.random.default_rng(seed)
    shuffled = list(ids)
    rng.shuffle(shuffled)

    splits: list[DatasetSplit] = []
    if benchmark is not None:
        missing = (set(benchmark.train_ids) | set(benchmark.test_ids)) - set(ids)
        if missing:
            raise DatasetError(f"benchmark split references unknown ids {sorted(missing)}")
        splits.append(benchmark)
    for i in range(generated):
        test = shuffled[i * test_size:(i + 1) * test_size]
        train = [x for x in ids if x not in set(test)]
        splits.append(DatasetSplit(train_ids=tuple(train), test_ids=tuple(test)))
    return splits


def write_split(path: Path | str, split: DatasetSplit) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps({"train": list(split.train_ids), "test": list(split.test_ids)}, indent=2)
    )


def load_split(path: Path | str) -> DatasetSplit:
    payload = json.loads(Path(path).read_text())
    try:
        return DatasetSplit(train_ids=tuple(payload["train"]), test_ids=tuple(payload["test"]))
    except KeyError as exc:
        raise DatasetError(f"split file {path} missing key {exc}") from exc
