"""Angular-error statistics and inference benchmarking.

Quartiles interpolate linearly at rank q*(n-1) over the sorted sample; the
best/worst percentile slices use k = max(1, floor(fraction*n)) elements so
tiny test sets still produce non-empty slices.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from tcclab.color import angular_error
from tcclab.data.sequence import FrameSequence


@dataclass(frozen=True)
class ErrorSummary:
    mean: float
    median: float
    trimean: float
    best25_mean: float
    worst25_mean: float
    worst5_mean: float

    def __post_init__(self):
        values = (
            self.mean, self.median, self.trimean,
            self.best25_mean, self.worst25_mean, self.worst5_mean,
        )
        if any(not math.isfinite(v) or v < 0.0 for v in values):
            raise ValueError(f"summary statistics must be finite and >= 0, got {values}")
        chain = (self.best25_mean, self.median, self.worst25_mean, self.worst5_mean)
        for lo, hi in zip(chain, chain[1:]):
            if lo > hi + 1e-9:
                raise ValueError(f"summary ordering violated: {chain}")

    def as_row(self) -> list[float]:
        return [
            self.mean, self.median, self.trimean,
            self.best25_mean, self.worst25_mean, self.worst5_mean,
        ]


def _slice_size(fraction: float, n: int) -> int:
    return max(1, math.floor(fraction * n))


def error_summary(errors) -> ErrorSummary:
    arr = np.asarray(list(errors), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("summary needs at least one error value")
    ordered = np.sort(arr)
    q1, median, q3 = np.percentile(ordered, [25.0, 50.0, 75.0])
    k25 = _slice_size(0.25, arr.size)
    k5 = _slice_size(0.05, arr.size)
    return ErrorSummary(
        mean=float(arr.mean()),
        median=float(median),
        trimean=float((q1 + 2.0 * median + q3) / 4.0),
        best25_mean=float(ordered[:k25].mean()),
        worst25_mean=float(ordered[-k25:].mean()),
        worst5_mean=float(ordered[-k5:].mean()),
    )


def evaluate_errors(estimator, sequences) -> list[float]:
    """Per-sequence angular error (degrees) of an estimator against ground truth."""
    errors = []
    for seq in sequences:
        if seq.ground_truth is None:
            raise ValueError(f"sequence {seq.sequence_id!r} has no ground truth")
        errors.append(angular_error(estimator(seq), seq.ground_truth))
    return errors


@dataclass(frozen=True)
class BenchReport:
    model: str
    selection: str
    mean_seconds: float
    model_size_bytes: int

    def __post_init__(self):
        if self.mean_seconds <= 0.0:
            raise ValueError(f"mean seconds must be > 0, got {self.mean_seconds}")


def benchmark_inference(
    estimator,
    sequences: list[FrameSequence],
    selection_name: str,
    repeats: int = 1,
    model_size_bytes: int = 0,
    model_name: str = "model",
) -> BenchReport:
    """Wall-clock mean per-sequence inference time over ``repeats`` passes.

    One warmup pass over all sequences runs first and is excluded from the
    mean; timings use the monotonic performance counter.
    """
    if not sequences:
        raise ValueError("benchmark needs at least one sequence")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    for seq in sequences:
        estimator(seq)
    total = 0.0
    for _ in range(repeats):
        start = time.perf_counter()
        for seq in sequences:
            estimator(seq)
        total += time.perf_counter() - start
    return BenchReport(
        model=model_name,
        selection=selection_name,
        mean_seconds=total / (repeats * len(sequences)),
        model_size_bytes=model_size_bytes,
    )
