"""Command-line entry point.

Commands: ``synth``, ``train``, ``eval``, ``compare``, ``bench``. Values come
from --config files (flat dotted keys) overridden by flags; every run
directory receives the resolved configuration, tool version, and seed. Exit
codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import functools
import json
from pathlib import Path

import click
import numpy as np

import tcclab
from tcclab.color import ColorDomainError
from tcclab.config import (
    ConfigError,
    load_config_file,
    parse_triple,
    resolve,
    write_run_provenance,
)
from tcclab.data import (
    AugmentSpec,
    DatasetError,
    FrameSelection,
    SynthConfig,
    Trajectory,
    generate_dataset,
    load_dataset,
    load_split,
    make_splits,
    write_split,
)
from tcclab.evaluation import benchmark_inference, error_summary, evaluate_errors
from tcclab.inference import GrayWorldEstimator, ModelEstimator, OracleEstimator
from tcclab.models import (
    BackboneConfig,
    CascadeConfig,
    CheckpointError,
    ModelKind,
    read_checkpoint,
)
from tcclab.stats import (
    StatsError,
    benjamini_hochberg,
    cohens_d_paired,
    effect_size_label,
    paired_t_one_tailed,
)
from tcclab.training import TrainConfig, TrainingDiverged, train_model
from tcclab import reports

_RUNTIME_ERRORS = (
    ColorDomainError,
    ConfigError,
    DatasetError,
    CheckpointError,
    StatsError,
    TrainingDiverged,
    ValueError,
    OSError,
)

MODEL_KIND_CHOICES = [k.value for k in ModelKind]
SELECTION_HELP = "frame selection: 'full', 'last:<k>', or 'first-median-shot'"


def _command_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except _RUNTIME_ERRORS as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
@click.version_option(version=tcclab.__version__)
def main():
    """Temporal colour constancy lab."""


def _load_file_values(config_path: str | None) -> dict[str, str]:
    return load_config_file(config_path) if config_path else {}


def _sequences_by_id(data_root: str):
    dataset = load_dataset(data_root)
    return {seq.sequence_id: seq for seq in dataset}


def _pick(by_id: dict, ids, what: str):
    missing = [i for i in ids if i not in by_id]
    if missing:
        raise click.ClickException(f"{what} references unknown sequences {missing[:5]}")
    return [by_id[i] for i in ids]


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--force", is_flag=True, help="overwrite a non-empty output directory")
@click.option("--seed", type=int, default=None)
@click.option("--sequences", "n_sequences", type=click.IntRange(min=1), default=None)
@click.option("--frames", type=click.IntRange(min=1), default=None)
@click.option("--height", type=click.IntRange(min=8), default=None)
@click.option("--width", type=click.IntRange(min=8), default=None)
@click.option("--trajectory", type=click.Choice([t.value for t in Trajectory]), default=None)
@click.option("--tile-size", type=click.IntRange(min=1), default=None)
@click.option("--scene-mean", type=str, default=None, help="canonical channel means 'r,g,b'")
@click.option("--splits", "n_splits", type=click.IntRange(min=0), default=None)
@click.option("--bit-depth", type=click.Choice(["8", "16"]), default=None)
@_command_errors
def synth(config_path, out, force, seed, n_sequences, frames, height, width,
          trajectory, tile_size, scene_mean, n_splits, bit_depth):
    """Generate a synthetic dataset in the documented layout."""
    values = _load_file_values(config_path)
    seed = resolve(seed, values, "seed", 0, int)
    n_sequences = resolve(n_sequences, values, "synth.sequences", 10, int)
    frames = resolve(frames, values, "synth.frames", 5, int)
    height = resolve(height, values, "synth.height", 64, int)
    width = resolve(width, values, "synth.width", 64, int)
    trajectory = resolve(trajectory, values, "synth.trajectory", "constant")
    tile_size = resolve(tile_size, values, "synth.tile_size", 8, int)
    scene_mean = resolve(
        scene_mean and parse_triple(scene_mean), values, "synth.scene_mean",
        (0.5, 0.5, 0.5), parse_triple,
    )
    n_splits = resolve(n_splits, values, "synth.splits", 1, int)
    bit_depth = int(resolve(bit_depth, values, "synth.bit_depth", "16"))

    out_dir = Path(out)
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        raise click.ClickException(
            f"{out_dir} is not empty; pass --force to overwrite"
        )

    synth_config = SynthConfig(
        frames=frames, height=height, width=width,
        trajectory=Trajectory(trajectory), tile_size=tile_size,
        scene_mean=tuple(scene_mean),
    )
    ids = generate_dataset(out_dir, synth_config, n_sequences, seed, bit_depth=bit_depth)
    split_names = []
    if n_splits:
        for i, split in enumerate(make_splits(ids, seed, n_splits)):
            name = f"split_{i}.json"
            write_split(out_dir / "splits" / name, split)
            split_names.append(name)

    resolved = {
        "seed": seed,
        "synth.sequences": n_sequences,
        "synth.frames": frames,
        "synth.height": height,
        "synth.width": width,
        "synth.trajectory": trajectory,
        "synth.tile_size": tile_size,
        "synth.scene_mean": ",".join(f"{v:g}" for v in scene_mean),
        "synth.splits": n_splits,
        "synth.bit_depth": bit_depth,
    }
    write_run_provenance(out_dir, "synth", resolved)
    manifest = {"seed": seed, "sequences": ids, "splits": split_names, **{
        k: v for k, v in resolved.items() if k.startswith("synth.")
    }}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    click.echo(json.dumps(manifest, indent=2))


def _train_val_split(sequences, val_fraction: float, seed: int):
    if len(sequences) < 2 or val_fraction <= 0.0:
        return list(sequences), list(sequences)
    order = np.random.default_rng([seed, 7001]).permutation(len(sequences))
    n_val = min(len(sequences) - 1, max(1, round(val_fraction * len(sequences))))
    val_idx = set(int(i) for i in order[:n_val])
    train = [s for i, s in enumerate(sequences) if i not in val_idx]
    val = [s for i, s in enumerate(sequences) if i in val_idx]
    return train, val


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--split", "split_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(MODEL_KIND_CHOICES), default=None)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--epochs", type=click.IntRange(min=1), default=None)
@click.option("--learning-rate", type=float, default=None)
@click.option("--batch-size", type=click.IntRange(min=1), default=None)
@click.option("--stages", type=click.IntRange(min=1), default=None)
@click.option("--inner-stages", type=click.IntRange(min=1), default=None)
@click.option("--hidden-channels", type=click.IntRange(min=1), default=None)
@click.option("--kernel-size", type=click.IntRange(min=1), default=None)
@click.option("--backbone", type=click.Choice(["tiny", "squeeze_style"]), default=None)
@click.option("--resolution", type=click.IntRange(min=16), default=None)
@click.option("--frames", "frames_mode", type=str, default=None, help=SELECTION_HELP)
@click.option("--pz-length", type=click.IntRange(min=1), default=None)
@click.option("--val-fraction", type=float, default=None)
@click.option("--no-augment", is_flag=True)
@click.option("--init-from", type=click.Path(exists=True, dir_okay=False), default=None,
              help="warm-start cascade stages from a non-cascading checkpoint")
@_command_errors
def train(config_path, data, split_path, kind, out, seed, epochs, learning_rate,
          batch_size, stages, inner_stages, hidden_channels, kernel_size, backbone,
          resolution, frames_mode, pz_length, val_fraction, no_augment, init_from):
    """Train a model and write checkpoint + report."""
    values = _load_file_values(config_path)
    seed = resolve(seed, values, "seed", 0, int)
    kind = ModelKind.parse(resolve(kind, values, "train.kind", "tccnet"))
    epochs = resolve(epochs, values, "train.epochs", 100, int)
    learning_rate = resolve(learning_rate, values, "train.learning_rate", 3e-5, float)
    batch_size = resolve(batch_size, values, "train.batch_size", 1, int)
    stages = resolve(stages, values, "train.stages", 3, int)
    inner_stages = resolve(inner_stages, values, "train.inner_stages", 3, int)
    hidden_channels = resolve(hidden_channels, values, "train.hidden_channels", 128, int)
    kernel_size = resolve(kernel_size, values, "train.kernel_size", 5, int)
    backbone = resolve(backbone, values, "train.backbone", "tiny")
    resolution = resolve(resolution, values, "train.resolution", 64, int)
    frames_mode = resolve(frames_mode, values, "train.frames", "full")
    val_fraction = resolve(val_fraction, values, "train.val_fraction", 0.25, float)

    selection = FrameSelection.parse(frames_mode)
    train_config = TrainConfig(
        epochs=epochs,
        learning_rate=learning_rate,
        batch_size=batch_size,
        cascade=CascadeConfig(stages=stages, inner_c4_stages=inner_stages),
        seed=seed,
        frame_selection=selection,
        backbone=BackboneConfig(variant=backbone, input_resolution=resolution),
        hidden_channels=hidden_channels,
        kernel_size=kernel_size,
        augment_spec=None if no_augment else AugmentSpec(),
        pz_length=pz_length,
    )

    by_id = _sequences_by_id(data)
    split = load_split(split_path)
    pool = _pick(by_id, split.train_ids, "split train set")
    train_seqs, val_seqs = _train_val_split(pool, val_fraction, seed)

    init_bytes = Path(init_from).read_bytes() if init_from else None
    checkpoint, report = train_model(kind, train_config, train_seqs, val_seqs,
                                     init_from=init_bytes)

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "checkpoint.pt").write_bytes(checkpoint)
    reports.write_train_report(out_dir / "report.csv", report)
    reports.render_train_figure(out_dir / "training.png", report)
    write_run_provenance(out_dir, "train", {
        "seed": seed,
        "data.root": str(data),
        "data.split": str(split_path),
        "train.kind": kind.value,
        "train.epochs": epochs,
        "train.learning_rate": learning_rate,
        "train.batch_size": batch_size,
        "train.stages": stages,
        "train.inner_stages": inner_stages,
        "train.hidden_channels": hidden_channels,
        "train.kernel_size": kernel_size,
        "train.backbone": backbone,
        "train.resolution": resolution,
        "train.frames": selection.spec(),
        "train.pz_length": pz_length if pz_length is not None else "match",
        "train.val_fraction": val_fraction,
        "train.augment": not no_augment,
        "train.init_from": init_from or "",
    })
    click.echo(
        f"trained {kind.value}: best epoch {report.best_epoch} "
        f"val {report.best_val_error:.3f} deg -> {out_dir / 'checkpoint.pt'}"
    )


def _build_estimator(checkpoint, baseline, selection, seed, pz_length, name):
    if checkpoint and baseline:
        raise click.UsageError("give either --checkpoint or --model, not both")
    if checkpoint:
        model = read_checkpoint(checkpoint)
        estimator = ModelEstimator(model, selection=selection, seed=seed, pz_length=pz_length)
        return estimator, name or model.kind.value
    if baseline == "gray-world":
        return GrayWorldEstimator(), name or "gray-world"
    if baseline == "oracle":
        return OracleEstimator(), name or "oracle"
    raise click.UsageError("one of --checkpoint or --model is required")


@main.command("eval")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--split", "split_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--model", "baseline", type=click.Choice(["gray-world", "oracle"]), default=None)
@click.option("--name", type=str, default=None, help="model label in the records")
@click.option("--frames", "frames_mode", type=str, default=None, help=SELECTION_HELP)
@click.option("--pz-length", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@_command_errors
def eval_cmd(config_path, data, split_paths, checkpoint, baseline, name, frames_mode,
             pz_length, seed, out):
    """Evaluate a checkpoint or baseline on test splits."""
    values = _load_file_values(config_path)
    seed = resolve(seed, values, "seed", 0, int)
    frames_mode = resolve(frames_mode, values, "eval.frames", "full")
    selection = FrameSelection.parse(frames_mode)

    estimator, model_name = _build_estimator(
        checkpoint, baseline, selection, seed, pz_length, name
    )
    by_id = _sequences_by_id(data)

    records = []
    rows = []
    for split_path in split_paths:
        split = load_split(split_path)
        test_seqs = _pick(by_id, split.test_ids, f"split {split_path} test set")
        errors = evaluate_errors(estimator, test_seqs)
        summary = error_summary(errors)
        records.append(
            reports.ErrorRecord.from_summary(model_name, Path(split_path).stem, summary)
        )
        rows.append(summary.as_row())
    if len(rows) > 1:
        matrix = np.asarray(rows)
        records.append(reports.ErrorRecord(model_name, "avg", *matrix.mean(axis=0)))
        records.append(reports.ErrorRecord(model_name, "std", *matrix.std(axis=0, ddof=1)))

    out_dir = Path(out)
    reports.write_error_records(out_dir / "errors.csv", records)
    reports.render_error_figure(out_dir / "errors.png", records)
    write_run_provenance(out_dir, "eval", {
        "seed": seed,
        "data.root": str(data),
        "eval.model": model_name,
        "eval.checkpoint": checkpoint or "",
        "eval.frames": selection.spec(),
        "eval.splits": ";".join(str(p) for p in split_paths),
    })
    for rec in records:
        click.echo(
            f"{rec.model:>14s} {rec.split:>12s}  " +
            "  ".join(f"{v:7.3f}" for v in rec.values())
        )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--records", "record_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False), help="eval errors.csv files")
@click.option("--baseline", required=True, type=str)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@_command_errors
def compare(config_path, record_paths, baseline, out):
    """Paired one-tailed t-tests of baseline vs every other model, BH-adjusted."""
    all_records = []
    for path in record_paths:
        all_records.extend(reports.read_error_records(path))
    per_model: dict[str, dict[str, float]] = {}
    for rec in all_records:
        if rec.split in ("avg", "std"):
            continue
        per_model.setdefault(rec.model, {})[rec.split] = rec.mean

    if baseline not in per_model:
        raise click.ClickException(
            f"baseline {baseline!r} not in records (have {sorted(per_model)})"
        )
    challengers = sorted(m for m in per_model if m != baseline)
    if not challengers:
        raise click.ClickException("need at least one challenger model")

    base_splits = per_model[baseline]
    results = []
    for challenger in challengers:
        ch_splits = per_model[challenger]
        if set(ch_splits) != set(base_splits):
            raise click.ClickException(
                f"{challenger} splits {sorted(ch_splits)} do not pair with "
                f"baseline splits {sorted(base_splits)}"
            )
        keys = sorted(base_splits)
        a = [base_splits[k] for k in keys]
        b = [ch_splits[k] for k in keys]
        t_res = paired_t_one_tailed(a, b)
        d = cohens_d_paired(a, b)
        results.append((challenger, t_res, d))

    adjusted = benjamini_hochberg([r[1].p for r in results])
    stat_records = [
        reports.StatRecord(
            comparison=f"{baseline} vs {challenger}",
            p_raw=t_res.p,
            p_adjusted=p_adj,
            d=d,
            label=effect_size_label(d),
            degenerate=t_res.degenerate,
        )
        for (challenger, t_res, d), p_adj in zip(results, adjusted)
    ]

    out_dir = Path(out)
    reports.write_stat_records(out_dir / "comparison.csv", stat_records)
    reports.render_stat_figure(out_dir / "comparison.png", stat_records)
    write_run_provenance(out_dir, "compare", {
        "compare.baseline": baseline,
        "compare.records": ";".join(str(p) for p in record_paths),
    })
    for rec in stat_records:
        flag = " (degenerate)" if rec.degenerate else ""
        click.echo(
            f"{rec.comparison}: p={rec.p_raw:.4g} adj={rec.p_adjusted:.4g} "
            f"d={rec.d:.3f} [{rec.label}]{flag}"
        )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--split", "split_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--selection", "selections", multiple=True, type=str,
              help=SELECTION_HELP + " (repeatable)")
@click.option("--repeats", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--name", type=str, default=None)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@_command_errors
def bench(config_path, checkpoint, data, split_path, selections, repeats, seed, name, out):
    """Benchmark inference time per frame-selection mode."""
    values = _load_file_values(config_path)
    seed = resolve(seed, values, "seed", 0, int)
    repeats = resolve(repeats, values, "bench.repeats", 3, int)
    if not selections:
        selections = ("full", "first-median-shot")

    model = read_checkpoint(checkpoint)
    model_name = name or model.kind.value
    size_bytes = Path(checkpoint).stat().st_size
    by_id = _sequences_by_id(data)
    if split_path:
        sequences = _pick(by_id, load_split(split_path).test_ids, "split test set")
    else:
        sequences = list(by_id.values())

    bench_records = []
    for text in selections:
        selection = FrameSelection.parse(text)
        estimator = ModelEstimator(model, selection=selection, seed=seed)
        bench_records.append(
            benchmark_inference(
                estimator, sequences, selection.spec(), repeats=repeats,
                model_size_bytes=size_bytes, model_name=model_name,
            )
        )

    out_dir = Path(out)
    reports.write_bench_records(out_dir / "bench.csv", bench_records)
    reports.render_bench_figure(out_dir / "bench.png", bench_records)
    write_run_provenance(out_dir, "bench", {
        "seed": seed,
        "bench.checkpoint": str(checkpoint),
        "bench.repeats": repeats,
        "bench.selections": ";".join(s.spec() for s in map(FrameSelection.parse, selections)),
        "data.root": str(data),
        "data.split": split_path or "",
    })
    for rec in bench_records:
        click.echo(
            f"{rec.model} [{rec.selection}]: {rec.mean_seconds * 1000:.2f} ms/seq, "
            f"{rec.model_size_bytes} bytes"
        )


if __name__ == "__main__":
    main()
