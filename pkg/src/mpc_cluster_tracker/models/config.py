"""Pipeline configuration data model."""

from dataclasses import asdict, dataclass, fields, replace
from enum import StrEnum
from typing import Any

from ..exceptions import ConfigError


class Side(StrEnum):
    """Which interaction coordinate of each MPC is clustered."""

    MS = "ms"
    BS = "bs"


class McdNormalization(StrEnum):
    """Which point set the MCD axis ranges are computed over."""

    PER_SNAPSHOT = "per_snapshot"
    GLOBAL = "global"


@dataclass(frozen=True)
class PipelineConfig:
    """Thresholds and model parameters for clustering and tracking.

    Attributes:
        k_max: Maximum number of clusters per snapshot.
        min_centroid_power_frac: Seeding stops when a new centroid captures
            no more than this fraction of the snapshot power.
        min_cluster_power_frac: Clustering restarts with one seed fewer when
            a cluster holds less than this fraction of clustered power.
        power_keep_frac: Fraction of snapshot power kept after noise pruning.
        q_scale: State-noise variance scale (Q = q_scale * I).
        r_scale: Observation-noise variance scale (R = r_scale * I), m².
        side: Interaction side to cluster.
        mcd_normalization: Scope of the MCD axis ranges.
        spread_regularization_eps: Added to spread diagonals before the
            closeness density is evaluated, m².
        max_lloyd_iters: Iteration cap for one KPowerMeans round.
        initial_velocity_var_factor: New-track velocity variance as a
            multiple of r_scale.
    """

    k_max: int = 10
    min_centroid_power_frac: float = 1e-4
    min_cluster_power_frac: float = 0.01
    power_keep_frac: float = 0.99
    q_scale: float = 1e-4
    r_scale: float = 0.04
    side: Side = Side.MS
    mcd_normalization: McdNormalization = McdNormalization.PER_SNAPSHOT
    spread_regularization_eps: float = 1e-6
    max_lloyd_iters: int = 100
    initial_velocity_var_factor: float = 10.0

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "side", Side(self.side))
            object.__setattr__(
                self, "mcd_normalization", McdNormalization(self.mcd_normalization)
            )
        except ValueError as e:
            raise ConfigError(str(e)) from e

        if not (
            0
            < self.min_centroid_power_frac
            < self.min_cluster_power_frac
            < self.power_keep_frac
            <= 1
        ):
            raise ConfigError(
                "Thresholds must satisfy 0 < min_centroid_power_frac < "
                "min_cluster_power_frac < power_keep_frac <= 1"
            )
        if self.k_max < 1:
            raise ConfigError(f"k_max must be at least 1 (got {self.k_max})")
        if self.q_scale <= 0 or self.r_scale <= 0:
            raise ConfigError("q_scale and r_scale must be positive")
        if self.spread_regularization_eps < 0:
            raise ConfigError("spread_regularization_eps must not be negative")
        if self.max_lloyd_iters < 1:
            raise ConfigError("max_lloyd_iters must be at least 1")
        if self.initial_velocity_var_factor <= 0:
            raise ConfigError("initial_velocity_var_factor must be positive")

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> "PipelineConfig":
        """Build a config from a mapping of field names to values.

        Raises:
            ConfigError: If a key is unknown or a value is invalid.
        """
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**values)
        except TypeError as e:
            raise ConfigError(f"Invalid config value: {e}") from e

    def with_overrides(self, **overrides: Any) -> "PipelineConfig":
        """Return a copy with every non-None override applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if not changes:
            return self
        return self.from_dict({**self.to_dict(), **changes})

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-serializable mapping of all fields."""
        values = asdict(self)
        values["side"] = self.side.value
        values["mcd_normalization"] = self.mcd_normalization.value
        return values
