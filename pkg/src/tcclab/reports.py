"""Report emission: delimited records plus rendered figures.

Every report exists in two forms side by side: a CSV with a fixed column
schema (round-trippable) and a PNG figure for quick visual inspection.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from tcclab.evaluation import BenchReport, ErrorSummary
from tcclab.training import EpochRecord, TrainReport

ERROR_COLUMNS = ["model", "split", "mean", "median", "trimean", "best25", "worst25", "worst5"]
STAT_COLUMNS = ["comparison", "p_raw", "p_adjusted", "d", "label", "degenerate"]
BENCH_COLUMNS = ["model", "selection", "mean_seconds", "model_size_bytes"]
TRAIN_COLUMNS = ["epoch", "loss", "val_error", "seconds"]


@dataclass(frozen=True)
class ErrorRecord:
    """One row of the error table.

    Usually a validated ErrorSummary flattened per (model, split); the
    cross-split "avg"/"std" aggregation rows reuse the same columns without
    the summary's ordering invariant.
    """

    model: str
    split: str
    mean: float
    median: float
    trimean: float
    best25: float
    worst25: float
    worst5: float

    @classmethod
    def from_summary(cls, model: str, split: str, summary: ErrorSummary) -> "ErrorRecord":
        return cls(model, split, *summary.as_row())

    def values(self) -> list[float]:
        return [self.mean, self.median, self.trimean, self.best25, self.worst25, self.worst5]


@dataclass(frozen=True)
class StatRecord:
    comparison: str
    p_raw: float
    p_adjusted: float
    d: float
    label: str
    degenerate: bool = False


def _write_rows(path: Path, columns: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def _read_rows(path: Path, columns: list[str]) -> list[dict]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != columns:
            raise ValueError(f"{path} columns {reader.fieldnames} != expected {columns}")
        return list(reader)


def write_error_records(path: Path | str, records: list[ErrorRecord]) -> None:
    _write_rows(
        Path(path), ERROR_COLUMNS,
        ([r.model, r.split, *(f"{v:.6f}" for v in r.values())] for r in records),
    )


def read_error_records(path: Path | str) -> list[ErrorRecord]:
    return [
        ErrorRecord(
            model=row["model"],
            split=row["split"],
            mean=float(row["mean"]),
            median=float(row["median"]),
            trimean=float(row["trimean"]),
            best25=float(row["best25"]),
            worst25=float(row["worst25"]),
            worst5=float(row["worst5"]),
        )
        for row in _read_rows(Path(path), ERROR_COLUMNS)
    ]


def write_stat_records(path: Path | str, records: list[StatRecord]) -> None:
    _write_rows(
        Path(path), STAT_COLUMNS,
        (
            [r.comparison, f"{r.p_raw:.6g}", f"{r.p_adjusted:.6g}", f"{r.d:.6g}",
             r.label, str(r.degenerate).lower()]
            for r in records
        ),
    )


def read_stat_records(path: Path | str) -> list[StatRecord]:
    return [
        StatRecord(
            comparison=row["comparison"],
            p_raw=float(row["p_raw"]),
            p_adjusted=float(row["p_adjusted"]),
            d=float(row["d"]),
            label=row["label"],
            degenerate=row["degenerate"] == "true",
        )
        for row in _read_rows(Path(path), STAT_COLUMNS)
    ]


def write_bench_records(path: Path | str, records: list[BenchReport]) -> None:
    _write_rows(
        Path(path), BENCH_COLUMNS,
        (
            [r.model, r.selection, f"{r.mean_seconds:.9f}", str(r.model_size_bytes)]
            for r in records
        ),
    )


def read_bench_records(path: Path | str) -> list[BenchReport]:
    return [
        BenchReport(
            model=row["model"],
            selection=row["selection"],
            mean_seconds=float(row["mean_seconds"]),
            model_size_bytes=int(row["model_size_bytes"]),
        )
        for row in _read_rows(Path(path), BENCH_COLUMNS)
    ]


def write_train_report(path: Path | str, report: TrainReport) -> None:
    _write_rows(
        Path(path), TRAIN_COLUMNS,
        (
            [str(r.epoch), f"{r.loss:.8f}", f"{r.val_error:.6f}", f"{r.seconds:.4f}"]
            for r in report.records
        ),
    )


def read_train_report(path: Path | str) -> TrainReport:
    records = tuple(
        EpochRecord(
            epoch=int(row["epoch"]),
            loss=float(row["loss"]),
            val_error=float(row["val_error"]),
            seconds=float(row["seconds"]),
        )
        for row in _read_rows(Path(path), TRAIN_COLUMNS)
    )
    best = min(records, key=lambda r: r.val_error)
    return TrainReport(records=records, best_epoch=best.epoch, best_val_error=best.val_error)


def render_error_figure(path: Path | str, records: list[ErrorRecord]) -> None:
    """Grouped bars: one cluster per statistic, one bar per (model, split)."""
    stats = ["mean", "median", "trimean", "best25", "worst25", "worst5"]
    fig, ax = plt.subplots(figsize=(9, 4.5))
    width = 0.8 / max(1, len(records))
    for i, rec in enumerate(records):
        offsets = [j + i * width for j in range(len(stats))]
        ax.bar(offsets, rec.values(), width=width, label=f"{rec.model}/{rec.split}")
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(stats))])
    ax.set_xticklabels(stats)
    ax.set_ylabel("angular error (deg)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_stat_figure(path: Path | str, records: list[StatRecord]) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    names = [r.comparison for r in records]
    ax1.bar(names, [r.p_adjusted for r in records], color="tab:blue")
    ax1.axhline(0.05, color="tab:red", linestyle="--", linewidth=1)
    ax1.set_ylabel("adjusted p")
    ax1.tick_params(axis="x", rotation=30)
    finite_d = [min(abs(r.d), 10.0) for r in records]
    ax2.bar(names, finite_d, color="tab:green")
    for threshold in (0.6, 0.8):
        ax2.axhline(threshold, color="gray", linestyle=":", linewidth=1)
    ax2.set_ylabel("|Cohen's d| (clipped at 10)")
    ax2.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_bench_figure(path: Path | str, records: list[BenchReport]) -> None:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    labels = [f"{r.model}\n{r.selection}" for r in records]
    ax.bar(labels, [r.mean_seconds for r in records], color="tab:purple")
    ax.set_ylabel("mean seconds / sequence")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_train_figure(path: Path | str, report: TrainReport) -> None:
    fig, ax1 = plt.subplots(figsize=(7, 3.5))
    epochs = [r.epoch for r in report.records]
    ax1.plot(epochs, [r.loss for r in report.records], color="tab:blue", label="loss")
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("training loss (rad)", color="tab:blue")
    ax2 = ax1.twinx()
    ax2.plot(
        epochs, [r.val_error for r in report.records], color="tab:orange", label="val error"
    )
    ax2.set_ylabel("validation error (deg)", color="tab:orange")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
