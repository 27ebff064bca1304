"""Dataset ingestion, forecast interchange, run configuration and reports.

Three delimited-text formats are supported:

* series files: wide CSV, header row required, optional leading
  ``timestamp`` column (carried through but never interpreted), one column
  per channel;
* forecast files: long CSV with header ``t,channel,h1,...,hH``, one row
  per (time step, channel) holding the horizon-length forecast made at
  ``t``;
* run config files: ``key = value`` lines with ``#`` comments.

Numbers are written with ``repr`` (shortest round-trip form), so every
serialization is lossless at double precision and independent of locale.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .config import WEIGHTER_MODES, RollingConfig
from .errors import InsufficientData, InvalidConfig, IoError, ParseError


@dataclass
class Series:
    """In-memory multichannel series."""

    values: np.ndarray           # (T, C) float64
    channel_names: list
    timestamps: list = None      # optional, same length as values

    @property
    def shape(self):
        return self.values.shape

    def __getitem__(self, key):
        return self.values[key]

    def __len__(self):
        return self.values.shape[0]


def _fmt(x: float) -> str:
    return repr(float(x))


# -- series files -------------------------------------------------------------

def load_series(path) -> Series:
    """Read a wide-format series file."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError("file is empty, header row required", line=1)
    header = [h.strip() for h in rows[0]]
    has_timestamp = bool(header) and header[0].lower() == "timestamp"
    names = header[1:] if has_timestamp else header
    if not names:
        raise ParseError("header names no channels", line=1)
    if len(set(names)) != len(names):
        raise ParseError("channel names must be unique", line=1)
    data_rows = rows[1:]
    if not data_rows:
        raise InsufficientData(f"{path} holds a header but no data rows")
    width = len(header)
    values = np.empty((len(data_rows), len(names)))
    timestamps = [] if has_timestamp else None
    for i, row in enumerate(data_rows):
        line_no = i + 2
        if len(row) != width:
            raise ParseError(
                f"expected {width} cells, found {len(row)}", line=line_no)
        cells = row[1:] if has_timestamp else row
        if has_timestamp:
            timestamps.append(row[0])
        for j, cell in enumerate(cells):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"cell {cell!r} is not a number", line=line_no,
                    column=j + (2 if has_timestamp else 1)) from None
    return Series(values=values, channel_names=names, timestamps=timestamps)


def write_series(series: Series, path) -> None:
    """Write a series back to wide CSV, losslessly."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if series.timestamps is not None:
                writer.writerow(["timestamp"] + list(series.channel_names))
                for ts, row in zip(series.timestamps, series.values):
                    writer.writerow([ts] + [_fmt(v) for v in row])
            else:
                writer.writerow(list(series.channel_names))
                for row in series.values:
                    writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# -- forecast files -----------------------------------------------------------

def write_forecasts(rows, horizon: int, path) -> None:
    """Write (t, channel_name, vector) triples as a long-format file."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "channel"] + [f"h{i + 1}" for i in range(horizon)])
            for t, name, vec in rows:
                vec = np.asarray(vec, dtype=np.float64)
                if vec.shape != (horizon,):
                    raise InvalidConfig(
                        f"forecast at ({t}, {name!r}) has shape {vec.shape}, "
                        f"expected ({horizon},)")
                writer.writerow([int(t), name] + [_fmt(v) for v in vec])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_forecasts(path):
    """Read a long-format forecast file.

    Returns
    -------
    (table, horizon) where table maps ``(t, channel_name)`` to the
    forecast vector.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError("file is empty, header row required", line=1)
    header = [h.strip() for h in rows[0]]
    if len(header) < 3 or header[0] != "t" or header[1] != "channel":
        raise ParseError("header must read t,channel,h1,...,hH", line=1)
    expected = [f"h{i + 1}" for i in range(len(header) - 2)]
    if header[2:] != expected:
        raise ParseError("horizon columns must be h1..hH in order", line=1)
    horizon = len(expected)
    table = {}
    for i, row in enumerate(rows[1:]):
        line_no = i + 2
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(row)}",
                             line=line_no)
        try:
            t = int(row[0])
        except ValueError:
            raise ParseError(f"time step {row[0]!r} is not an integer",
                             line=line_no, column=1) from None
        name = row[1]
        key = (t, name)
        if key in table:
            raise ParseError(f"duplicate forecast for (t={t}, channel={name!r})",
                             line=line_no)
        vec = np.empty(horizon)
        for j, cell in enumerate(row[2:]):
            try:
                vec[j] = float(cell)
            except ValueError:
                raise ParseError(f"cell {cell!r} is not a number",
                                 line=line_no, column=j + 3) from None
        table[key] = vec
    return table, horizon


# -- run config files ---------------------------------------------------------

# keys that belong to RollingConfig, by their file spelling
_CONFIG_KEYS = {
    "context_length": ("context_length", int),
    "horizon": ("horizon", int),
    "update_period": ("update_period", int),
    "seasonality": ("seasonality", int),
    "lambda": ("lam", float),
    "alpha": ("alpha", float),
    "eta": ("eta", float),
    "fast_window": ("fast_window", int),
    "warmup": ("warmup", int),
    "weighter": ("weighter_mode", str),
    "instance_norm": ("instance_norm", bool),
    "channel_scaling": ("channel_scaling", bool),
    "shared_weights": ("shared_weights", bool),
}

# run-level keys outside RollingConfig
_RUN_KEYS = {
    "dataset": str,
    "base": str,
    "forecasts": str,
    "out": str,
    "format": str,
    "dump_forecasts": str,
}


def _parse_bool(raw: str, key: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise InvalidConfig(f"{key} expects a boolean, got {raw!r}")


def parse_config_value(key: str, raw: str):
    """Coerce one ``key = value`` setting to its typed form."""
    raw = raw.strip()
    if key in _CONFIG_KEYS:
        _, typ = _CONFIG_KEYS[key]
    elif key in _RUN_KEYS:
        typ = _RUN_KEYS[key]
    else:
        known = sorted(list(_CONFIG_KEYS) + list(_RUN_KEYS))
        raise InvalidConfig(f"unknown config key {key!r}; known keys: {', '.join(known)}")
    if typ is bool:
        return _parse_bool(raw, key)
    try:
        return typ(raw)
    except ValueError:
        raise InvalidConfig(f"{key} expects {typ.__name__}, got {raw!r}") from None


def load_run_config(path) -> dict:
    """Parse a ``key = value`` run config file into a typed dict."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    settings = {}
    for i, line in enumerate(lines):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ParseError(f"expected 'key = value', got {text!r}", line=i + 1)
        key, raw = (part.strip() for part in text.split("=", 1))
        settings[key] = parse_config_value(key, raw)
    return settings


def build_rolling_config(settings: dict) -> RollingConfig:
    """RollingConfig from a settings dict, validated."""
    kwargs = {}
    for file_key, (attr, _) in _CONFIG_KEYS.items():
        if file_key in settings:
            kwargs[attr] = settings[file_key]
    cfg = RollingConfig(**kwargs).validate()
    if cfg.weighter_mode not in WEIGHTER_MODES:
        raise InvalidConfig(f"weighter must be one of {WEIGHTER_MODES}")
    return cfg


# -- reports ------------------------------------------------------------------

def write_report(report, path, fmt: str = "json") -> None:
    """Serialize a RunReport as JSON (full structure) or CSV (flat table)."""
    if fmt == "json":
        payload = json.dumps(report.to_dict(), sort_keys=True, indent=2)
        try:
            with open(path, "w") as fh:
                fh.write(payload + "\n")
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
    elif fmt == "csv":
        try:
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["dataset", "channel", "stream", "mase", "rmsse",
                                 "windows", "floored_windows"])
                for name in report.channel_names:
                    entry = report.per_channel[name]
                    for stream in ("base", "adaptive", "combined"):
                        m = entry[stream]["mase"]
                        r = entry[stream]["rmsse"]
                        writer.writerow([
                            report.dataset_name, name, stream,
                            "" if m is None else _fmt(m),
                            "" if r is None else _fmt(r),
                            entry["windows"], entry["floored_windows"],
                        ])
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
    else:
        raise InvalidConfig(f"unknown report format {fmt!r}")


def write_json(payload, path) -> None:
    """Write any JSON-serializable payload with sorted keys."""
    try:
        with open(path, "w") as fh:
            fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_report_json(path) -> dict:
    """Load a JSON report back into the dict produced by ``to_dict``."""
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", line=exc.lineno) from exc
