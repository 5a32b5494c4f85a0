"""Per-antenna signals, beamformed LAD responses and simulated angular scans."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConfigError, DimensionError, PlanError
from .geometry import UlaGeometry, UraGeometry, aal_positions

RX_ONLY = "rx_only"
MONOSTATIC = "monostatic"
MODES = (RX_ONLY, MONOSTATIC)


@dataclass(frozen=True)
class Scatterer:
    """Unit-gain point scatterer.

    ``lad`` is a float for 1D scenes and an ``(az, el)`` pair for 2D ones;
    ``radial_speed`` is in m/s, positive towards the array.
    """

    lad: float | tuple[float, float]
    amplitude: complex = 1.0
    radial_speed: float = 0.0

    def __post_init__(self):
        lad = np.atleast_1d(np.asarray(self.lad, dtype=float))
        if lad.size not in (1, 2) or np.any(np.abs(lad) > 0.5):
            raise ConfigError(f"scatterer LAD must be 1 or 2 values in [-0.5, 0.5], got {self.lad}")
        if not np.isfinite(complex(self.amplitude)):
            raise ConfigError("scatterer amplitude must be finite")


@dataclass
class Scene:
    scatterers: list[Scatterer] = field(default_factory=list)
    noise_power: float = 0.0
    "Per-antenna noise power sigma_n^2 (linear), before combining."

    def __post_init__(self):
        if self.noise_power < 0:
            raise ConfigError("noise_power must be >= 0")

    @property
    def lads(self) -> NDArray[np.float64]:
        return np.array([s.lad for s in self.scatterers], dtype=float)

    @property
    def amplitudes(self) -> NDArray[np.complex128]:
        return np.array([s.amplitude for s in self.scatterers], dtype=complex)

    @property
    def speeds(self) -> NDArray[np.float64]:
        return np.array([s.radial_speed for s in self.scatterers], dtype=float)

    @classmethod
    def from_dict(cls, doc: dict) -> "Scene":
        scatterers = [
            Scatterer(
                lad=tuple(s["lad"]) if isinstance(s["lad"], (list, tuple)) else float(s["lad"]),
                amplitude=complex(s.get("amp_re", 1.0), s.get("amp_im", 0.0)),
                radial_speed=float(s.get("speed", 0.0)),
            )
            for s in doc.get("scatterers", [])
        ]
        db = doc.get("noise_power_db")
        noise = 0.0 if db is None else 10 ** (float(db) / 10)
        return cls(scatterers, noise)

    def to_dict(self) -> dict:
        return {
            "scatterers": [
                {
                    "lad": list(s.lad) if isinstance(s.lad, tuple) else s.lad,
                    "amp_re": complex(s.amplitude).real,
                    "amp_im": complex(s.amplitude).imag,
                    "speed": s.radial_speed,
                }
                for s in self.scatterers
            ],
            "noise_power_db": None if self.noise_power == 0 else 10 * np.log10(self.noise_power),
        }

    @classmethod
    def load(cls, path) -> "Scene":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)


@dataclass(frozen=True)
class ScanRecord:
    """Sequential angular scan: measured values at ascending LAD sample points."""

    lads: NDArray[np.float64]
    values: NDArray[np.complex128]
    times: NDArray[np.float64]
    scan_period: float = 0.0

    def __post_init__(self):
        if not (len(self.lads) == len(self.values) == len(self.times)):
            raise DimensionError("lads, values and times must have equal length")
        if np.any(np.diff(self.lads) <= 0):
            raise PlanError("scan entries must be strictly ascending in LAD")

    def __len__(self):
        return len(self.lads)

    @property
    def entries(self) -> list[tuple[float, complex, float]]:
        return list(zip(self.lads.tolist(), self.values.tolist(), self.times.tolist()))


@dataclass(frozen=True)
class ScanRecord2D:
    """Scan over a cartesian LAD grid; ``values[i, j]`` is at ``(az[i], el[j])``."""

    az: NDArray[np.float64]
    el: NDArray[np.float64]
    values: NDArray[np.complex128]

    def __post_init__(self):
        if self.values.shape != (len(self.az), len(self.el)):
            raise DimensionError("values must have shape (len(az), len(el))")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")


def steering_weights(g: UlaGeometry, lad: float) -> NDArray[np.complex128]:
    "Analog beamforming weights w_n = exp(-j 2 pi y_n lad)."
    return np.exp(-2j * np.pi * aal_positions(g) * lad)


def planar_wave(g: UlaGeometry, eta: float, amplitude: complex = 1.0) -> NDArray[np.complex128]:
    "Per-antenna signal of a planar wave incident at LAD ``eta`` (zero phase at the array centre)."
    return amplitude * np.exp(2j * np.pi * aal_positions(g) * eta)


def beamform(a: ArrayLike, g: UlaGeometry, lad: ArrayLike) -> complex | NDArray[np.complex128]:
    """Matched-beamformer LAD response ``(1/N) sum_n a_n exp(-j 2 pi y_n lad)``.

    ``a`` may carry arbitrary complex (e.g. tapered) element signals.  ``lad``
    may be a scalar or an array of look directions.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape[-1] != g.n_elements:
        raise DimensionError(f"signal has {a.shape[-1]} elements, geometry has {g.n_elements}")
    lad_arr = np.asarray(lad, dtype=float)
    phases = np.exp(-2j * np.pi * np.multiply.outer(lad_arr, aal_positions(g)))
    out = phases @ a / g.n_elements
    return complex(out) if out.ndim == 0 else out


def dirichlet(n: int, u: ArrayLike) -> NDArray[np.float64] | float:
    """Dirichlet kernel ``sin(pi n u) / (n sin(pi u))``.

    At integer ``u`` the removable singularity evaluates to ``(-1)^(u (n - 1))``.
    The argument is reduced around the nearest integer first so the kernel is
    accurate close to its replicas.
    """
    if n < 1:
        raise ConfigError("Dirichlet order must be >= 1")
    u = np.asarray(u, dtype=float)
    k = np.rint(u)
    delta = u - k
    small = np.abs(delta) < 1e-8
    den = n * np.sin(np.pi * np.where(small, 1.0, delta))
    core = np.where(
        small,
        1 - (n * n - 1) * (np.pi * delta) ** 2 / 6,
        np.sin(np.pi * n * delta) / den,
    )
    if n % 2 == 0:
        core = core * (1 - 2 * np.mod(k, 2))
    return float(core) if core.ndim == 0 else core


def point_spread(g: UlaGeometry, offset: ArrayLike, mode: str = MONOSTATIC) -> NDArray[np.float64] | float:
    """Noiseless response of a unit scatterer at LAD offset ``lad - eta``.

    Monostatic operation squares the kernel (transmit and receive beams), whose
    bandwidth is that of the 2N - 1 element sum co-array.
    """
    _check_mode(mode)
    d = dirichlet(g.n_elements, 2 * g.spacing_ratio * np.asarray(offset, dtype=float))
    return d * d if mode == MONOSTATIC else d


def planar_wave_response(g: UlaGeometry, lad: ArrayLike, eta: ArrayLike):
    "Receive-only LAD response to a unit planar wave at ``eta``."
    return dirichlet(g.n_elements, 2 * g.spacing_ratio * (np.asarray(lad, dtype=float) - np.asarray(eta)))


def doppler_rate(g: UlaGeometry, radial_speed: ArrayLike, mode: str = MONOSTATIC) -> NDArray[np.float64]:
    "Phase rotation in rad/s; two-way for monostatic scans."
    _check_mode(mode)
    factor = 2.0 if mode == MONOSTATIC else 1.0
    return 2 * np.pi * factor * np.asarray(radial_speed, dtype=float) / g.wavelength


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(rng)))


def complex_noise(rng, variance: float, shape) -> NDArray[np.complex128]:
    "Circular complex Gaussian samples with E|n|^2 = variance."
    rng = _rng(rng)
    if variance == 0:
        return np.zeros(shape, dtype=complex)
    scale = np.sqrt(variance / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def lad_response(scene: Scene, g: UlaGeometry, lads: ArrayLike, mode: str = MONOSTATIC) -> NDArray[np.complex128]:
    "Noiseless static response of ``scene`` at arbitrary LADs (dense direct scan)."
    lads = np.asarray(lads, dtype=float)
    if not scene.scatterers:
        return np.zeros(lads.shape, dtype=complex)
    psf = point_spread(g, np.subtract.outer(lads, scene.lads), mode)
    return psf @ scene.amplitudes


def scan_scene(
    scene: Scene,
    g: UlaGeometry,
    plan,
    mode: str = MONOSTATIC,
    scan_period: float = 0.0,
    rng=None,
) -> ScanRecord:
    """Simulate a sequential sweep over the LADs of ``plan``.

    Sample ``i`` is taken at ``t_i = i * scan_period``; each scatterer's
    coefficient rotates by its Doppler phase at that time while its LAD stays
    fixed.  Post-combining noise has variance ``noise_power / N``.
    """
    _check_mode(mode)
    lads = np.asarray(getattr(plan, "lad_points", plan), dtype=float)
    if lads.ndim != 1 or lads.size == 0:
        raise PlanError("plan must be a nonempty 1D sequence of LADs")
    if np.any(np.diff(lads) <= 0):
        raise PlanError("plan must be sorted ascending without duplicates")
    times = np.arange(lads.size) * scan_period
    values = np.zeros(lads.size, dtype=complex)
    if scene.scatterers:
        psf = point_spread(g, np.subtract.outer(lads, scene.lads), mode)
        rot = np.exp(1j * np.outer(times, doppler_rate(g, scene.speeds, mode)))
        values = (psf * rot) @ scene.amplitudes
    values = values + complex_noise(rng, scene.noise_power / g.n_elements, lads.size)
    return ScanRecord(lads, values, times, scan_period)


def lad_response_2d(
    scene: Scene, g2: UraGeometry, az: ArrayLike, el: ArrayLike, mode: str = RX_ONLY
) -> NDArray[np.complex128]:
    "Noiseless 2D response on the cartesian grid ``az x el``; shape ``(len(az), len(el))``."
    az = np.asarray(az, dtype=float)
    el = np.asarray(el, dtype=float)
    if not scene.scatterers:
        return np.zeros((az.size, el.size), dtype=complex)
    pos = scene.lads
    if pos.ndim != 2:
        raise DimensionError("2D scans need scatterers with (az, el) LAD pairs")
    kh = point_spread(g2.horizontal, np.subtract.outer(az, pos[:, 0]), mode)
    kv = point_spread(g2.vertical, np.subtract.outer(el, pos[:, 1]), mode)
    return (kh * scene.amplitudes) @ kv.T


def scan_scene_2d(scene: Scene, g2: UraGeometry, plan, mode: str = RX_ONLY, rng=None) -> ScanRecord2D:
    """Static 2D scan over the cartesian product grid of ``plan``.

    Noise variance per sample is ``noise_power / (N M)``.
    """
    _check_mode(mode)
    az = np.asarray(plan.az_points, dtype=float)
    el = np.asarray(plan.el_points, dtype=float)
    values = lad_response_2d(scene, g2, az, el, mode)
    n_total = g2.horizontal.n_elements * g2.vertical.n_elements
    values = values + complex_noise(rng, scene.noise_power / n_total, values.shape)
    return ScanRecord2D(az, el, values)


def random_phase_scene(
    lads: Sequence[float], rng, noise_power: float = 0.0, speed: float = 0.0
) -> Scene:
    """Unit-modulus scatterers with uniform random phases.

    A nonzero ``speed`` is projected onto a uniformly random orientation,
    giving radial speed ``speed * cos(psi)``.
    """
    rng = _rng(rng)
    lads = list(lads)
    phases = rng.uniform(0, 2 * np.pi, len(lads))
    psi = rng.uniform(0, 2 * np.pi, len(lads))
    return Scene(
        [Scatterer(float(l), complex(np.exp(1j * p)), float(speed * np.cos(s))) for l, p, s in zip(lads, phases, psi)],
        noise_power,
    )
