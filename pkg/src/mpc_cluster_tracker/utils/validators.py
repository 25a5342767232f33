"""Snapshot validation and side selection."""

import math

import numpy as np
import numpy.typing as npt

from ..exceptions import (
    DuplicatePathId,
    EmptySnapshot,
    NonFiniteCoordinate,
    NonPositivePower,
)
from ..models import Side, Snapshot


def validate_snapshot(snapshot: Snapshot) -> Snapshot:
    """Check every MPC invariant of a snapshot.

    Args:
        snapshot: The snapshot to validate.

    Returns:
        The same snapshot, unchanged.

    Raises:
        EmptySnapshot: If the snapshot has no MPCs.
        NonPositivePower: If an MPC has power <= 0.
        NonFiniteCoordinate: If a coordinate or power is NaN or infinite.
        DuplicatePathId: If two MPCs share a path ID.
    """
    index = snapshot.index
    if not snapshot.mpcs:
        raise EmptySnapshot("Snapshot has no MPCs", snapshot_index=index)

    seen: set[int] = set()
    for mpc in snapshot.mpcs:
        coords = (*mpc.ms_pos, *mpc.bs_pos)
        if len(coords) != 6 or not all(math.isfinite(c) for c in coords):
            raise NonFiniteCoordinate(
                f"Path {mpc.path_id} has a non-finite coordinate",
                snapshot_index=index,
            )
        if not math.isfinite(mpc.power):
            raise NonFiniteCoordinate(
                f"Path {mpc.path_id} has non-finite power", snapshot_index=index
            )
        if mpc.power <= 0:
            raise NonPositivePower(
                f"Path {mpc.path_id} has non-positive power {mpc.power}",
                snapshot_index=index,
            )
        if mpc.path_id in seen:
            raise DuplicatePathId(
                f"Path ID {mpc.path_id} appears more than once", snapshot_index=index
            )
        seen.add(mpc.path_id)

    return snapshot


def select_side(snapshot: Snapshot, side: Side | str) -> npt.NDArray[np.float64]:
    """Project a snapshot onto one side's interaction coordinates.

    Args:
        snapshot: A validated snapshot.
        side: Side.MS for the coordinates nearest the mobile station,
            Side.BS for those nearest the base station.

    Returns:
        An (L, 3) array, row i taken from mpcs[i].
    """
    side = Side(side)
    if side is Side.MS:
        rows = [mpc.ms_pos for mpc in snapshot.mpcs]
    else:
        rows = [mpc.bs_pos for mpc in snapshot.mpcs]
    return np.array(rows, dtype=float).reshape(len(rows), 3)
