"""CSV and JSON emission.

CSVs are comma separated, UTF-8, LF terminated, with a header row and
numbers written with 15 significant digits.
"""

import csv
import json
import os

import numpy as np

from .trajectory import COLUMNS

NUMBER_FORMAT = "%.15g"
ENSEMBLE_COLUMNS = ("t", "mean", "stderr")
BASELINE_COLUMNS = ("t", "F_DQEC", "F1", "F3")


class SchemaError(ValueError):
    pass


def write_csv(path, header, rows):
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != len(header):
        raise SchemaError(f"{path}: expected {len(header)} columns, got shape {rows.shape}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, rows, fmt=NUMBER_FORMAT, delimiter=",", newline="\n")
    return path


def read_csv(path, expected=None):
    """Return ``(header, data)``; validate the header if ``expected`` is given."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        data = [[float(x) for x in row] for row in reader if row]
    if expected is not None and header != tuple(expected):
        raise SchemaError(f"{path}: header {header} does not match {tuple(expected)}")
    data = np.array(data, dtype=float).reshape(-1, len(header))
    return header, data


def write_trajectory_csv(path, result):
    return write_csv(path, COLUMNS, result.rows)


def write_ensemble_csv(path, result):
    return write_csv(path, ENSEMBLE_COLUMNS, np.column_stack([result.times, result.mean, result.stderr]))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def trajectory_summary(result, config):
    return {
        "final_fidelity": result.final_fidelity,
        "events": result.events,
        "dw_checksum": result.dw_checksum,
        "diagnostics": result.diagnostics,
        "wall_time": result.wall_time,
        "n_steps": result.meta["n_steps"],
        "config": config.to_dict(),
    }


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
