"""Multipath component and snapshot data models."""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

Vector3 = tuple[float, float, float]


@dataclass(frozen=True)
class Mpc:
    """A single multipath component.

    Attributes:
        path_id: Identifier of the path, unique within its snapshot.
        ms_pos: Interaction coordinate closest to the mobile station, metres.
        bs_pos: Interaction coordinate closest to the base station, metres.
        power: Linear power (|complex gain|²).
    """

    path_id: int
    ms_pos: Vector3
    bs_pos: Vector3
    power: float

    @property
    def is_single_bounce(self) -> bool:
        """Return True if the first and last interactions coincide."""
        return self.ms_pos == self.bs_pos


@dataclass(frozen=True)
class Snapshot:
    """All MPCs of one link (one mobile station position).

    Attributes:
        index: Snapshot index n >= 0.
        mpcs: The MPCs of this snapshot, in file order.
    """

    index: int
    mpcs: tuple[Mpc, ...]

    @property
    def mpc_count(self) -> int:
        """Return the number of MPCs L^(n)."""
        return len(self.mpcs)

    @property
    def powers(self) -> npt.NDArray[np.float64]:
        """Return the linear power vector."""
        return np.array([mpc.power for mpc in self.mpcs], dtype=float)

    @property
    def path_ids(self) -> npt.NDArray[np.int64]:
        """Return the path IDs in MPC order."""
        return np.array([mpc.path_id for mpc in self.mpcs], dtype=np.int64)

    @property
    def total_power(self) -> float:
        """Return the summed linear power of the snapshot."""
        return float(sum(mpc.power for mpc in self.mpcs))
