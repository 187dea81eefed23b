"""Experiment configuration files.

Configs are flat key/value text with optional [section] headers, a
small TOML subset: quoted strings, integers, floats (scientific
notation included), and booleans. Full-line and trailing # comments
are stripped; # inside a quoted string is kept. That subset covers
every knob an experiment has, and parse errors always name the key.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .sampling import Strategy, StrategyError, StrategyKind

VARIANTS = ("original", "reordered", "fixed-vocab")
WINDOW_MODES = ("sliding", "tumbling")


class ConfigError(ValueError):
    """A config file is malformed or inconsistent."""


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        elif ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out).strip()


def _parse_value(raw: str, key: str) -> object:
    if raw.startswith('"'):
        if len(raw) < 2 or not raw.endswith('"') or '"' in raw[1:-1]:
            raise ConfigError(f"{key}: unterminated or nested quote in {raw!r}")
        return raw[1:-1]
    if raw == "true":
        return True
    if raw == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse value {raw!r}") from None


def parse_kv_text(text: str) -> dict:
    """Parse key/value text into a dict; [section] keys nest one level."""
    root: dict = {}
    table = root
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line)
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"line {lineno}: bad section header {line!r}")
            section = line[1:-1].strip()
            if section in root:
                raise ConfigError(f"line {lineno}: duplicate section [{section}]")
            table = root.setdefault(section, {})
            continue
        key, eq, raw = line.partition("=")
        key = key.strip()
        if not eq or not key:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        full_key = f"{section}.{key}" if section else key
        if key in table:
            raise ConfigError(f"{full_key}: defined twice")
        table[key] = _parse_value(raw.strip(), full_key)
    return root


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run needs, resolved and validated."""

    stream_path: Path
    seed_size: int
    strategy: Strategy
    output_dir: Path
    variant: str = "original"
    window_length: int = 100
    window_mode: str = "sliding"
    query_timeout: float = 120.0


def _take(table: dict, key: str, kind: type, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = table.pop(key)
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}")
    return value


def config_from_dict(data: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Validate a parsed config; relative paths resolve against base_dir."""
    data = {k: (dict(v) if isinstance(v, dict) else v) for k, v in data.items()}
    base = base_dir or Path(".")

    stream = _take(data, "stream", str, required=True)
    seed_size = _take(data, "seed_size", int, required=True)
    output_dir = _take(data, "output_dir", str, required=True)
    variant = _take(data, "variant", str, default="original")
    timeout = _take(data, "query_timeout", float, default=120.0)
    if variant not in VARIANTS:
        raise ConfigError(f"variant: must be one of {VARIANTS}, got {variant!r}")
    if seed_size < 2:
        raise ConfigError(f"seed_size: must be at least 2, got {seed_size}")
    if timeout <= 0:
        raise ConfigError(f"query_timeout: must be positive, got {timeout}")

    strat_table = data.pop("strategy", None)
    if not isinstance(strat_table, dict):
        raise ConfigError("missing required section [strategy]")
    kind_raw = _take(strat_table, "kind", str, required=True)
    try:
        kind = StrategyKind(kind_raw)
    except ValueError:
        choices = ", ".join(k.value for k in StrategyKind)
        raise ConfigError(
            f"strategy.kind: must be one of {choices}, got {kind_raw!r}"
        ) from None
    alpha = _take(strat_table, "alpha", float)
    budget = _take(strat_table, "budget", float)
    rng_seed = _take(strat_table, "rng_seed", int)
    if strat_table:
        raise ConfigError(f"strategy: unknown keys {sorted(strat_table)}")
    try:
        strategy = Strategy(kind, alpha=alpha, budget=budget, rng_seed=rng_seed)
    except StrategyError as exc:
        raise ConfigError(f"strategy: {exc}") from exc

    window_table = data.pop("window", {})
    if not isinstance(window_table, dict):
        raise ConfigError("window: expected a [window] section")
    length = _take(window_table, "length", int, default=100)
    mode = _take(window_table, "mode", str, default="sliding")
    if window_table:
        raise ConfigError(f"window: unknown keys {sorted(window_table)}")
    if length < 1:
        raise ConfigError(f"window.length: must be at least 1, got {length}")
    if mode not in WINDOW_MODES:
        raise ConfigError(f"window.mode: must be one of {WINDOW_MODES}, got {mode!r}")

    if data:
        raise ConfigError(f"unknown keys {sorted(data)}")

    return ExperimentConfig(
        stream_path=(base / stream).resolve() if not Path(stream).is_absolute() else Path(stream),
        seed_size=seed_size,
        strategy=strategy,
        output_dir=(base / output_dir) if not Path(output_dir).is_absolute() else Path(output_dir),
        variant=variant,
        window_length=length,
        window_mode=mode,
        query_timeout=timeout,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate an experiment config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return config_from_dict(parse_kv_text(text), base_dir=path.parent)
