"""CFAR-gated iterative peak extraction with coherent removal."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError
from .geometry import wrap_lad
from .reconstruction import LadResponse
from .signal_model import MONOSTATIC, MODES, dirichlet


def cfar_threshold(noise_power: float, p_fa: float, n_samples: int) -> float:
    """Magnitude threshold with false-alarm probability ``p_fa`` over ``n_samples`` noise samples.

    Each sample magnitude is Rayleigh with ``E|n|^2 = noise_power``.
    """
    if not 0 < p_fa < 1:
        raise ConfigError(f"p_fa must lie in (0, 1), got {p_fa}")
    if not noise_power > 0:
        raise ConfigError("noise_power must be positive")
    per_sample = -np.expm1(np.log1p(-p_fa) / n_samples)
    return float(np.sqrt(-noise_power * np.log(per_sample)))


@lru_cache(maxsize=None)
def sidelobe_level(order: int, power: int = 1) -> float:
    """First sidelobe of ``|D_order|**power`` relative to the main lobe.

    Golden-section search between the first and second nulls.
    """
    if order < 3:
        return 0.0
    res = minimize_scalar(
        lambda u: -abs(dirichlet(order, u)) ** power,
        bracket=(1.0 / order, 1.5 / order, 2.0 / order),
        method="golden",
        tol=1e-10,
    )
    return float(-res.fun)


@dataclass(frozen=True)
class DetectorConfig:
    """Detector settings.

    ``kernel_order`` is the element count N of the physical array whose
    Dirichlet kernel (squared for monostatic scans) models one target;
    ``noise_power_post`` is the per-sample noise power after combining.
    """

    noise_power_post: float
    kernel_order: int
    p_fa: float = 1e-3
    kappa: float = 6.0
    max_iterations: int = 10
    mode: str = MONOSTATIC
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if not 0 < self.p_fa < 1:
            raise ConfigError(f"p_fa must lie in (0, 1), got {self.p_fa}")
        if self.kappa < 0:
            raise ConfigError("kappa must be >= 0")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")

    @property
    def scan_order(self) -> int:
        "Samples per sweep: 2N - 1 for monostatic, N for receive-only."
        return 2 * self.kernel_order - 1 if self.mode == MONOSTATIC else self.kernel_order

    @property
    def window(self) -> float:
        "Main-lobe half width in LAD, used by the false-peak rejection rule."
        return 1.0 / (2 * self.spacing_ratio * self.scan_order)

    @property
    def sidelobe(self) -> float:
        return sidelobe_level(self.kernel_order, 2 if self.mode == MONOSTATIC else 1)

    @property
    def zeta(self) -> float:
        return cfar_threshold(self.noise_power_post, self.p_fa, self.scan_order)


@dataclass(frozen=True)
class Peak:
    lad: float
    amplitude: complex
    iteration: int


@dataclass
class DetectionReport:
    peaks: list[Peak] = field(default_factory=list)
    zeta: float = 0.0
    zeta_prime: float | None = None

    @property
    def lads(self) -> np.ndarray:
        return np.array([p.lad for p in self.peaks])

    def to_json(self, **extra) -> str:
        peaks = [
            {"lad": p.lad, "amp_re": complex(p.amplitude).real, "amp_im": complex(p.amplitude).imag, "iteration": p.iteration}
            for p in self.peaks
        ]
        return json.dumps({**extra, "peaks": peaks, "zeta": self.zeta, "zeta_prime": self.zeta_prime})

    @classmethod
    def from_json(cls, line: str) -> "DetectionReport":
        doc = json.loads(line)
        peaks = [Peak(p["lad"], complex(p["amp_re"], p["amp_im"]), p["iteration"]) for p in doc["peaks"]]
        return cls(peaks, doc["zeta"], doc["zeta_prime"])


def refine_peak(resp: LadResponse, idx: int) -> tuple[float, complex]:
    """Parabolic refinement of the grid maximum at ``idx``.

    The vertex offset comes from the magnitudes of the three samples; the
    complex amplitude is interpolated quadratically at that offset.
    Neighbours wrap around the grid edges (with the replica sign).
    """
    vals = resp.values
    n = vals.size
    lo = vals[idx - 1] if idx > 0 else resp.wrap_sign * vals[-1]
    hi = vals[idx + 1] if idx < n - 1 else resp.wrap_sign * vals[0]
    f0 = vals[idx]
    m_lo, m0, m_hi = abs(lo), abs(f0), abs(hi)
    den = m_lo - 2 * m0 + m_hi
    delta = 0.0 if den == 0 else float(np.clip(0.5 * (m_lo - m_hi) / den, -0.5, 0.5))
    amp = f0 + delta * (hi - lo) / 2 + delta**2 * (hi - 2 * f0 + lo) / 2
    coord = resp.axis[idx] + delta * resp.step
    lad = float(resp.to_lad(coord))
    if resp.domain == "lad":
        lad = float(wrap_lad(lad, n * resp.step))
    return lad, complex(amp)


def subtract_peak(
    resp: LadResponse, lad_hat: float, amp: complex, kernel_order: int, mode: str = MONOSTATIC, spacing_ratio: float = 0.5
) -> LadResponse:
    "Remove one target's contribution ``amp * D(...)`` (``D**2`` for monostatic) over the whole grid."
    kern = dirichlet(kernel_order, 2 * spacing_ratio * (resp.lads - lad_hat))
    if mode == MONOSTATIC:
        kern = kern * kern
    return resp.with_values(resp.values - amp * kern)


def _local_max_lads(resp: LadResponse) -> np.ndarray:
    m = np.abs(resp.values)
    peak = (m > np.roll(m, 1)) & (m > np.roll(m, -1))
    return resp.lads[peak]


def detect(resp: LadResponse, cfg: DetectorConfig) -> DetectionReport:
    """Iteratively extract targets from ``resp``.

    Each iteration takes the global maximum of the residual, stops when it
    no longer exceeds the active threshold, refines it and removes it
    coherently.  Later peaks are kept only if the original response has a
    local maximum within one main-lobe half width.  After the first
    detection the threshold rises to ``max(zeta, kappa * S_N * |R_1(eta_1)|)``.
    """
    zeta = cfg.zeta
    report = DetectionReport(zeta=zeta)
    original_peaks = _local_max_lads(resp)
    alias = 1.0 / (2 * cfg.spacing_ratio)
    threshold = zeta
    current = resp
    for it in range(cfg.max_iterations):
        mags = np.abs(current.values)
        idx = int(np.argmax(mags))
        if not mags[idx] > threshold:
            break
        lad_hat, amp = refine_peak(current, idx)
        current = subtract_peak(current, lad_hat, amp, cfg.kernel_order, cfg.mode, cfg.spacing_ratio)
        if report.peaks:
            near = np.abs(wrap_lad(original_peaks - lad_hat, alias)) <= cfg.window
            if not np.any(near):
                continue
        report.peaks.append(Peak(lad_hat, amp, it))
        if len(report.peaks) == 1:
            report.zeta_prime = max(zeta, cfg.kappa * cfg.sidelobe * abs(amp))
            threshold = report.zeta_prime
    return report
