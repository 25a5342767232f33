"""Power unit conversion utilities."""

import numpy as np
import numpy.typing as npt


def db_to_linear(power_db: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Convert power in dB to linear power.

    Args:
        power_db: Power values, 10*log10 of linear power.

    Returns:
        Linear power values.
    """
    return np.power(10.0, np.asarray(power_db, dtype=float) / 10.0)


def linear_to_db(power: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Convert linear power to dB."""
    return 10.0 * np.log10(np.asarray(power, dtype=float))


def gain_to_power(gain_re: npt.ArrayLike, gain_im: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Convert complex path gains to linear power, dropping the phase.

    Args:
        gain_re: Real parts of the complex gains.
        gain_im: Imaginary parts of the complex gains.

    Returns:
        |gain|² per path.
    """
    re = np.asarray(gain_re, dtype=float)
    im = np.asarray(gain_im, dtype=float)
    return re * re + im * im
