"""Uniform array layouts and LAD/angle conversions.

LAD (linear angular domain) is ``sin(theta) / 2``; the AAL (antenna aperture
location) axis is ``2 x / wavelength``.  All other modules work in LAD.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConfigError, NonPhysicalLad

SPEED_OF_LIGHT = 299792458.0


def wavelength_from_frequency(frequency: float) -> float:
    "Free-space wavelength in meters."
    return SPEED_OF_LIGHT / frequency


@dataclass(frozen=True)
class UlaGeometry:
    """Uniform linear array of ``n_elements`` spaced ``spacing`` meters apart."""

    n_elements: int
    spacing: float
    wavelength: float

    def __post_init__(self):
        if int(self.n_elements) != self.n_elements or self.n_elements < 2:
            raise ConfigError(f"n_elements must be an integer >= 2, got {self.n_elements}")
        if not self.spacing > 0:
            raise ConfigError(f"spacing must be positive, got {self.spacing}")
        if not self.wavelength > 0:
            raise ConfigError(f"wavelength must be positive, got {self.wavelength}")
        object.__setattr__(self, "n_elements", int(self.n_elements))

    @classmethod
    def half_wavelength(cls, n_elements: int, wavelength: float = 1.0) -> "UlaGeometry":
        return cls(n_elements, wavelength / 2, wavelength)

    @property
    def spacing_ratio(self) -> float:
        "d / lambda"
        return self.spacing / self.wavelength

    @property
    def bandwidth(self) -> float:
        "LAD sampling rate B_N = 2 d N / lambda."
        return 2 * self.spacing * self.n_elements / self.wavelength

    @property
    def alias_period(self) -> float:
        "Replica spacing lambda / (2 d) of the LAD response."
        return self.wavelength / (2 * self.spacing)

    @property
    def period(self) -> float:
        "Period P_N of the LAD response; doubles for even N because replicas flip sign."
        return self.alias_period * (1 + (self.n_elements - 1) % 2)

    def aal_sampling_ok(self) -> bool:
        return self.spacing <= self.wavelength / 2


@dataclass(frozen=True)
class UraGeometry:
    """Rectangular array as the sum co-array of a horizontal and a vertical ULA."""

    horizontal: UlaGeometry
    vertical: UlaGeometry

    def __post_init__(self):
        if not np.isclose(self.horizontal.wavelength, self.vertical.wavelength, rtol=1e-12, atol=0):
            raise ConfigError("horizontal and vertical ULAs must share the wavelength")

    @property
    def wavelength(self) -> float:
        return self.horizontal.wavelength

    @property
    def shape(self) -> tuple[int, int]:
        return self.horizontal.n_elements, self.vertical.n_elements


def element_positions(g: UlaGeometry) -> NDArray[np.float64]:
    "Element positions in meters, centred on the origin."
    n = np.arange(g.n_elements)
    return (n - (g.n_elements - 1) / 2) * g.spacing


def aal_positions(g: UlaGeometry) -> NDArray[np.float64]:
    "Element positions on the AAL axis, y = 2 x / lambda."
    n = np.arange(g.n_elements)
    return (n - (g.n_elements - 1) / 2) * (2 * g.spacing_ratio)


def lad_from_angle(theta: ArrayLike) -> NDArray[np.float64] | float:
    """LAD of an incidence angle in radians.

    Back-lobe angles fold onto the front: ``theta`` and ``pi - theta`` share
    one LAD, as the ULA response is symmetric about the array axis.
    """
    return np.sin(theta) / 2


def angle_from_lad(lad: ArrayLike) -> NDArray[np.float64] | float:
    "Front-lobe angle (radians) of a physical LAD."
    lad_arr = np.asarray(lad, dtype=float)
    if np.any(np.abs(lad_arr) > 0.5):
        raise NonPhysicalLad(f"LAD outside [-0.5, 0.5]: {lad}")
    out = np.arcsin(2 * lad_arr)
    return float(out) if out.ndim == 0 else out


def sum_coarray(g: UlaGeometry) -> UlaGeometry:
    "Virtual ULA formed by pairwise sums of transmit and receive positions (2N - 1 elements)."
    return UlaGeometry(2 * g.n_elements - 1, g.spacing, g.wavelength)


def wrap_lad(lad: ArrayLike, period: float = 1.0) -> NDArray[np.float64] | float:
    "Wrap onto [-period/2, period/2)."
    out = np.mod(np.asarray(lad, dtype=float) + period / 2, period) - period / 2
    return float(out) if out.ndim == 0 else out
