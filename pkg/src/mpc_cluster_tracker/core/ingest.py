"""Snapshot and ground-truth CSV reading and writing.

Snapshot files have the header

    snapshot,path_id,x_ms,y_ms,z_ms,x_bs,y_bs,z_bs,power_db

and one row per MPC. Instead of power_db a file may carry the complex
path gain as gain_re,gain_im; its phase is dropped.
"""

from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from ..exceptions import ParseError, ValidationError
from ..models import Mpc, Snapshot
from ..utils import db_to_linear, gain_to_power, linear_to_db, validate_snapshot
from .synth import LabeledSnapshot

INDEX_COLUMNS = ["snapshot", "path_id"]
COORD_COLUMNS = ["x_ms", "y_ms", "z_ms", "x_bs", "y_bs", "z_bs"]
POWER_DB_COLUMNS = ["power_db"]
GAIN_COLUMNS = ["gain_re", "gain_im"]
SNAPSHOT_COLUMNS = INDEX_COLUMNS + COORD_COLUMNS + POWER_DB_COLUMNS
TRUTH_COLUMNS = ["snapshot", "path_id", "label"]

SUPPORTED_FORMATS = ("csv",)
FLOAT_FORMAT = "%.9g"

# Data rows start on line 2, after the header.
_FIRST_DATA_LINE = 2


def _read_table(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path, dtype=str, keep_default_na=False, skipinitialspace=True, encoding="utf-8"
        )
    except FileNotFoundError as e:
        raise ParseError(f"File not found: {path}") from e
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise ParseError(f"Could not read {path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"File is empty: {path}") from e


def _numeric(frame: pd.DataFrame, columns: list[str], integer: bool) -> pd.DataFrame:
    """Convert columns to numbers, reporting the first bad line."""
    converted = frame[columns].apply(pd.to_numeric, errors="coerce")
    bad = converted.isna()
    if integer:
        bad |= converted.notna() & (converted % 1 != 0)
    if bad.to_numpy().any():
        row = int(np.flatnonzero(bad.to_numpy().any(axis=1))[0])
        column = bad.columns[bad.iloc[row].to_numpy()][0]
        raise ParseError(
            f"Invalid value {frame[column].iloc[row]!r} in column '{column}'",
            line_number=row + _FIRST_DATA_LINE,
        )
    return converted.astype(np.int64) if integer else converted.astype(float)


def _require_columns(frame: pd.DataFrame, columns: list[str]) -> None:
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ParseError(f"Missing required columns: {', '.join(missing)}", line_number=1)


def ingest_snapshots(path: Path | str, format: str = "csv") -> list[Snapshot]:
    """Read and validate a snapshot file.

    Args:
        path: Path to the snapshot file.
        format: File format; only "csv" is supported.

    Returns:
        Validated snapshots sorted by ascending index.

    Raises:
        ParseError: If the file is missing, malformed or has a bad value.
        ValidationError: If a snapshot violates an MPC invariant.
    """
    if format not in SUPPORTED_FORMATS:
        raise ParseError(f"Unsupported snapshot format: {format}")

    frame = _read_table(Path(path))
    _require_columns(frame, INDEX_COLUMNS + COORD_COLUMNS)
    if set(POWER_DB_COLUMNS) <= set(frame.columns):
        power = db_to_linear(_numeric(frame, POWER_DB_COLUMNS, integer=False)["power_db"])
    elif set(GAIN_COLUMNS) <= set(frame.columns):
        gains = _numeric(frame, GAIN_COLUMNS, integer=False)
        power = gain_to_power(gains["gain_re"], gains["gain_im"])
    else:
        raise ParseError("Need a power_db column or gain_re,gain_im columns", line_number=1)

    if frame.empty:
        raise ParseError(f"No MPC rows in {path}")

    index = _numeric(frame, INDEX_COLUMNS, integer=True)
    coords = _numeric(frame, COORD_COLUMNS, integer=False).to_numpy()
    negative = np.flatnonzero(index["snapshot"].to_numpy() < 0)
    if negative.size:
        raise ParseError(
            "Snapshot index must not be negative",
            line_number=int(negative[0]) + _FIRST_DATA_LINE,
        )

    rows: dict[int, list[Mpc]] = {}
    for i, (snap, pid) in enumerate(index.itertuples(index=False, name=None)):
        c = coords[i]
        rows.setdefault(int(snap), []).append(
            Mpc(
                path_id=int(pid),
                ms_pos=(float(c[0]), float(c[1]), float(c[2])),
                bs_pos=(float(c[3]), float(c[4]), float(c[5])),
                power=float(power[i]),
            )
        )

    snapshots = []
    for snap in sorted(rows):
        snapshot = Snapshot(index=snap, mpcs=tuple(rows[snap]))
        try:
            snapshots.append(validate_snapshot(snapshot))
        except ValidationError as e:
            e.add_note(f"in {path}")
            raise
    return snapshots


def snapshots_frame(snapshots: Sequence[Snapshot]) -> pd.DataFrame:
    """Tabulate snapshots in the snapshot file layout."""
    records = [
        (s.index, m.path_id, *m.ms_pos, *m.bs_pos, m.power)
        for s in snapshots
        for m in s.mpcs
    ]
    frame = pd.DataFrame.from_records(
        records, columns=INDEX_COLUMNS + COORD_COLUMNS + ["power"]
    )
    frame["power_db"] = linear_to_db(frame.pop("power").to_numpy(dtype=float))
    return frame[SNAPSHOT_COLUMNS]


def write_snapshots(snapshots: Sequence[Snapshot], path: Path | str) -> Path:
    """Write snapshots as a snapshot CSV file.

    Returns:
        The written path.
    """
    path = Path(path)
    snapshots_frame(snapshots).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_truth(labelled: Sequence[LabeledSnapshot], path: Path | str) -> Path:
    """Write the ground-truth label of every generated MPC."""
    records = [
        (item.snapshot.index, mpc.path_id, int(label))
        for item in labelled
        for mpc, label in zip(item.snapshot.mpcs, item.truth)
    ]
    path = Path(path)
    pd.DataFrame.from_records(records, columns=TRUTH_COLUMNS).to_csv(path, index=False)
    return path


def read_truth(path: Path | str, snapshots: Sequence[Snapshot]) -> list[LabeledSnapshot]:
    """Attach ground-truth labels from a truth CSV to snapshots.

    Raises:
        ParseError: If the file is malformed or lacks a label for an MPC.
    """
    frame = _read_table(Path(path))
    _require_columns(frame, TRUTH_COLUMNS)
    values = _numeric(frame, TRUTH_COLUMNS, integer=True)
    labels = {
        (int(s), int(p)): int(lab)
        for s, p, lab in values.itertuples(index=False, name=None)
    }

    result = []
    for snapshot in snapshots:
        try:
            truth = [labels[(snapshot.index, mpc.path_id)] for mpc in snapshot.mpcs]
        except KeyError as e:
            raise ParseError(f"No truth label for snapshot/path {e.args[0]}") from e
        result.append(
            LabeledSnapshot(snapshot=snapshot, truth=np.array(truth, dtype=np.int64))
        )
    return result
