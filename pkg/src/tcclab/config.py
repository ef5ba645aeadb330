"""Flat run configuration: dotted keys, flag overrides, canonical provenance.

Config files are line-oriented ``key = value`` pairs (``#`` comments). CLI
flags override file values. Every command writes its fully resolved
configuration, tool version, and seed into the run directory so the run can
be reproduced from that file alone.
"""

from __future__ import annotations

from pathlib import Path

import tcclab


class ConfigError(ValueError):
    """Raised on unparseable config files or values."""


def load_config_file(path: Path | str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_triple(text: str) -> tuple[float, float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise ConfigError(f"expected three comma-separated numbers, got {text!r}")
    return tuple(float(p) for p in parts)


def resolve(flag_value, file_values: dict[str, str], key: str, default, cast=str):
    """Precedence: explicit CLI flag, then config file entry, then default."""
    if flag_value is not None:
        return flag_value
    if key in file_values:
        try:
            return cast(file_values[key])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"config key {key}: {exc}") from exc
    return default


def canonical_text(resolved: dict[str, object]) -> str:
    lines = [f"{key} = {value}" for key, value in sorted(resolved.items())]
    return "\n".join(lines) + "\n"


def write_run_provenance(out_dir: Path | str, command: str, resolved: dict[str, object]) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"command": command, "tool.version": tcclab.__version__, **resolved}
    path = out_dir / "config.resolved.txt"
    path.write_text(canonical_text(payload))
    return path
