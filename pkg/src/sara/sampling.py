"""Angular sampling plans: the minimal uniform-LAD set and its variants."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import PlanError
from .geometry import UlaGeometry, UraGeometry

LAD_UNIFORM = "lad_uniform"
ANGLE_UNIFORM = "angle_uniform"
REDUCED = "reduced"
EXTENDED = "extended"
KINDS = (LAD_UNIFORM, ANGLE_UNIFORM, REDUCED, EXTENDED)


def index_set(n: int) -> NDArray[np.int64]:
    "Integers n with -N/2 <= n < N/2, ascending."
    return np.arange(math.ceil(-n / 2), math.ceil(n / 2))


@dataclass(frozen=True)
class SamplingPlan:
    """LAD points to scan plus what reconstruction needs to know about them.

    ``kernel_order`` is the Dirichlet order used for reconstruction and
    ``grid_order`` the order whose lattice ``n / B`` the points sit on.  They
    differ for extended plans.  Lattice points absent from ``lad_points``
    are zero-filled at reconstruction time.
    """

    lad_points: NDArray[np.float64]
    kind: str
    kernel_order: int
    grid_order: int
    spacing_ratio: float = 0.5

    def __post_init__(self):
        pts = np.asarray(self.lad_points, dtype=float)
        object.__setattr__(self, "lad_points", pts)
        if self.kind not in KINDS:
            raise PlanError(f"unknown plan kind {self.kind!r}")
        if pts.ndim != 1 or pts.size == 0:
            raise PlanError("plan needs a nonempty 1D array of points")
        if np.any(np.diff(pts) <= 0):
            raise PlanError("plan points must be sorted and distinct")

    def __len__(self):
        return self.lad_points.size

    @property
    def bandwidth(self) -> float:
        "Sampling rate of the lattice, B = 2 d grid_order / lambda."
        return 2 * self.spacing_ratio * self.grid_order

    @property
    def lattice(self) -> NDArray[np.float64]:
        "Full lattice of the plan's grid order, ``n / B`` for n in the index set."
        return index_set(self.grid_order) / self.bandwidth

    @property
    def zero_filled(self) -> NDArray[np.float64]:
        "Lattice points not scanned."
        lat = self.lattice
        hit = np.isclose(lat[:, None], self.lad_points[None, :], atol=1e-9, rtol=0).any(axis=1)
        return lat[~hit]

    @property
    def angles(self) -> NDArray[np.float64]:
        return np.arcsin(np.clip(2 * self.lad_points, -1, 1))

    def to_dict(self) -> dict:
        return {
            "lad_points": self.lad_points.tolist(),
            "kind": self.kind,
            "kernel_order": self.kernel_order,
            "grid_order": self.grid_order,
            "spacing_ratio": self.spacing_ratio,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SamplingPlan":
        return cls(
            np.asarray(doc["lad_points"], dtype=float),
            doc["kind"],
            int(doc["kernel_order"]),
            int(doc.get("grid_order", doc["kernel_order"])),
            float(doc.get("spacing_ratio", 0.5)),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "SamplingPlan":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class SamplingPlan2D:
    "Cartesian product of an azimuth and an elevation plan."

    azimuth: SamplingPlan
    elevation: SamplingPlan

    @property
    def az_points(self):
        return self.azimuth.lad_points

    @property
    def el_points(self):
        return self.elevation.lad_points

    @property
    def lad_points(self) -> NDArray[np.float64]:
        "All ``(az, el)`` pairs, azimuth-major."
        az, el = np.meshgrid(self.az_points, self.el_points, indexing="ij")
        return np.column_stack([az.ravel(), el.ravel()])

    def __len__(self):
        return len(self.azimuth) * len(self.elevation)


def _uniform(order: int, spacing_ratio: float, kind: str, kernel_order: int | None = None) -> SamplingPlan:
    pts = index_set(order) / (2 * spacing_ratio * order)
    return SamplingPlan(pts, kind, kernel_order or order, order, spacing_ratio)


def lad_uniform_plan(g: UlaGeometry) -> SamplingPlan:
    """The N points ``n / B_N`` that determine the LAD response without loss.

    For monostatic scans pass the sum co-array geometry.
    """
    return _uniform(g.n_elements, g.spacing_ratio, LAD_UNIFORM)


def angle_uniform_plan(n_scan: int) -> SamplingPlan:
    """Baseline with angles ``n pi / n_scan`` spread uniformly over [-pi/2, pi/2).

    Points are stored as LADs; reconstruction works on the angle axis,
    treating ``theta / pi`` as a half-wavelength lattice of order ``n_scan``.
    """
    if n_scan < 2:
        raise PlanError("angle-uniform plan needs at least 2 samples")
    theta = index_set(n_scan) * np.pi / n_scan
    return SamplingPlan(np.sin(theta) / 2, ANGLE_UNIFORM, n_scan, n_scan, 0.5)


def reduced_plan(g: UlaGeometry, n_avail: int, roi: tuple[float, float] | None = None) -> SamplingPlan:
    """Plan for fewer scans than ``g`` needs.

    With ``roi`` the scans are the ``n_avail`` lattice points of
    ``lad_uniform_plan(g)`` closest to the interval (the rest are zero-filled,
    the full kernel order is kept).  Without ``roi`` the plan is that of a
    contiguous ``n_avail``-element sub-array, i.e. a lower kernel order.
    """
    if n_avail <= 0:
        raise PlanError("n_avail must be positive")
    if n_avail >= g.n_elements:
        raise PlanError("reduced plan needs n_avail < N; use lad_uniform_plan")
    if roi is None:
        return _uniform(n_avail, g.spacing_ratio, REDUCED)
    lo, hi = sorted(roi)
    full = lad_uniform_plan(g).lad_points
    outside = np.maximum(lo - full, 0) + np.maximum(full - hi, 0)
    centre_dist = np.abs(full - (lo + hi) / 2)
    order = np.lexsort((centre_dist, outside))[:n_avail]
    return SamplingPlan(np.sort(full[order]), REDUCED, g.n_elements, g.n_elements, g.spacing_ratio)


def extended_plan(g: UlaGeometry, n_scan: int) -> SamplingPlan:
    "Finer lattice of ``n_scan > N`` points; reconstruction keeps kernel order N."
    if n_scan <= g.n_elements:
        raise PlanError("extended plan needs more scans than elements")
    return _uniform(n_scan, g.spacing_ratio, EXTENDED, kernel_order=g.n_elements)


def ura_plan(g2: UraGeometry) -> SamplingPlan2D:
    return SamplingPlan2D(lad_uniform_plan(g2.horizontal), lad_uniform_plan(g2.vertical))


def acquisitions_required(n_points: int, chains: int = 1) -> int:
    "Sequential acquisitions with ``chains`` digital chains steering in parallel."
    if chains < 1:
        raise PlanError("need at least one chain")
    return -(-n_points // chains)
