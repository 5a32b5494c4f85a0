"""Loss-less upsampling of sampled LAD responses.

Sample and kernel vectors are *fft-ordered*: index 0 is LAD 0 and indices
past ``V // 2`` hold negative LADs.  ``LadResponse`` values are always in
natural (ascending) order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicSpline

from .errors import DimensionError, GridError, PlanError
from .geometry import UraGeometry
from .sampling import ANGLE_UNIFORM, SamplingPlan, index_set
from .signal_model import ScanRecord, ScanRecord2D, dirichlet

LAD = "lad"
ANGLE = "angle"


@dataclass(frozen=True)
class LadGrid:
    """Fine LAD grid of one reconstruction.

    ``order`` is the Dirichlet kernel order, ``n_scan`` the order of the
    sample lattice (equal unless more scans than elements were taken) and
    ``upsample`` the factor U.  Outputs carry ``n_scan * U`` points over one
    alias period; the circular buffers are twice as long for even ``order``.
    """

    order: int
    upsample: int = 16
    n_scan: int | None = None
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.n_scan is None:
            object.__setattr__(self, "n_scan", self.order)
        if self.order < 1 or self.n_scan < 1 or self.upsample < 1:
            raise GridError("order, n_scan and upsample must be positive")

    @property
    def output_length(self) -> int:
        return self.n_scan * self.upsample

    @property
    def length(self) -> int:
        "Circular buffer length V."
        return self.output_length * (1 + (self.order - 1) % 2)

    @property
    def step(self) -> float:
        "LAD spacing of the fine grid, 1 / B_{n_scan U}."
        return 1.0 / (2 * self.spacing_ratio * self.output_length)

    @property
    def period(self) -> float:
        return self.length * self.step

    @property
    def wrap_sign(self) -> int:
        "Factor picked up when moving one alias period (replica sign)."
        return -1 if self.order % 2 == 0 else 1

    @property
    def output_indices(self) -> NDArray[np.int64]:
        "Signed fine-grid indices of the natural-order output."
        return index_set(self.output_length)

    @property
    def lads(self) -> NDArray[np.float64]:
        return self.output_indices * self.step

    def signed_indices(self) -> NDArray[np.int64]:
        "Signed index of every fft-ordered buffer position."
        v = self.length
        return (np.arange(v) + v // 2) % v - v // 2


def to_natural(buffer: NDArray, grid: LadGrid) -> NDArray:
    """Pick the output samples from an fft-ordered buffer in ascending LAD order.

    For even kernel orders this drops the buffer's central half, i.e. the
    indices ``UN/2 .. 3UN/2 - 1``.
    """
    if buffer.shape[-1] != grid.length:
        raise DimensionError(f"buffer length {buffer.shape[-1]} != V = {grid.length}")
    return buffer[..., grid.output_indices % grid.length]


@dataclass(frozen=True)
class LadResponse:
    """Reconstructed response on a uniform axis.

    ``axis`` is in LAD, or in radians when ``domain == "angle"``.
    """

    values: NDArray[np.complex128]
    axis: NDArray[np.float64]
    domain: str = LAD
    wrap_sign: int = 1
    grid: LadGrid | None = None

    def __post_init__(self):
        if self.values.shape[-1] != self.axis.size:
            raise DimensionError("values and axis lengths differ")

    def __len__(self):
        return self.axis.size

    @property
    def step(self) -> float:
        return float(self.axis[1] - self.axis[0])

    @property
    def lads(self) -> NDArray[np.float64]:
        return self.axis if self.domain == LAD else np.sin(self.axis) / 2

    def to_lad(self, coord):
        "Axis coordinate to LAD."
        return coord if self.domain == LAD else np.sin(coord) / 2

    def with_values(self, values) -> "LadResponse":
        return LadResponse(np.asarray(values), self.axis, self.domain, self.wrap_sign, self.grid)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([self.domain, "re", "im", "abs"])
            for x, v in zip(self.axis, self.values):
                w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v)))])

    @classmethod
    def from_csv(cls, path, wrap_sign: int = 1) -> "LadResponse":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        domain = rows[0][0]
        data = np.array(rows[1:], dtype=float)
        return cls(data[:, 1] + 1j * data[:, 2], data[:, 0], domain, wrap_sign)


@lru_cache(maxsize=128)
def _kernel(order: int, n_scan: int, upsample: int, spacing_ratio: float):
    grid = LadGrid(order, upsample, n_scan, spacing_ratio)
    d = dirichlet(order, grid.signed_indices() / grid.output_length)
    spec = np.fft.fft(d)
    d.setflags(write=False)
    spec.setflags(write=False)
    return d, spec


def build_kernel_vector(grid: LadGrid) -> NDArray[np.float64]:
    "Dirichlet kernel sampled on the fine grid, ``d_u = D_order(u / (n_scan U))``, fft-ordered."
    return _kernel(grid.order, grid.n_scan, grid.upsample, grid.spacing_ratio)[0]


def _lattice_slots(coords: ArrayLike, grid: LadGrid) -> NDArray[np.int64]:
    coords = np.asarray(coords, dtype=float)
    n = coords * (2 * grid.spacing_ratio * grid.n_scan)
    n_int = np.rint(n)
    if np.any(np.abs(n - n_int) > 1e-9 * max(1, grid.n_scan)):
        raise GridError("sample points are not on the n / B lattice of the grid")
    valid = index_set(grid.n_scan)
    if np.any((n_int < valid[0]) | (n_int > valid[-1])):
        raise GridError("sample points fall outside one alias period")
    return (grid.upsample * n_int.astype(np.int64)) % grid.length


def build_sample_vector(record: ScanRecord, grid: LadGrid, coords: ArrayLike | None = None) -> NDArray[np.complex128]:
    """Scatter scan values into the zero-padded, fft-ordered buffer of length V.

    Sample ``n / B`` lands at index ``U n mod V``; unscanned lattice points
    stay zero.  ``coords`` overrides the record's LADs (angle-axis plans).
    """
    pts = record.lads if coords is None else coords
    return _place(record.values, pts, grid)


def _place(values: NDArray, coords: ArrayLike, grid: LadGrid) -> NDArray[np.complex128]:
    values = np.asarray(values, dtype=complex)
    slots = _lattice_slots(coords, grid)
    if values.shape[-1] != slots.size:
        raise DimensionError("values and coordinates lengths differ")
    buf = np.zeros(values.shape[:-1] + (grid.length,), dtype=complex)
    buf[..., slots] = values
    return buf


def _finish(buffer: NDArray, grid: LadGrid, domain: str = LAD) -> LadResponse:
    values = to_natural(buffer, grid) * (grid.order / grid.n_scan)
    axis = grid.lads if domain == LAD else grid.lads * np.pi
    return LadResponse(values, axis, domain, grid.wrap_sign, grid)


def _check_lengths(l: NDArray, d: NDArray | None, grid: LadGrid) -> None:
    if l.shape[-1] != grid.length or (d is not None and d.shape[-1] != grid.length):
        raise DimensionError(f"sample and kernel vectors must both have length V = {grid.length}")


def reconstruct_lr(l: NDArray, d: NDArray | None, grid: LadGrid, domain: str = LAD) -> LadResponse:
    """Direct circular convolution of samples and kernel (cost ~ U N^2).

    Only nonzero sample slots are visited.  ``l`` may carry leading batch axes.
    """
    l = np.asarray(l, dtype=complex)
    d = build_kernel_vector(grid) if d is None else np.asarray(d)
    _check_lengths(l, d, grid)
    v = grid.length
    nz = np.flatnonzero(np.any(l.reshape(-1, v) != 0, axis=0))
    idx = (np.arange(v)[:, None] - nz[None, :]) % v
    r = l[..., nz] @ d[idx].T
    return _finish(r, grid, domain)


def reconstruct_ar(l: NDArray, d: NDArray | None, grid: LadGrid, domain: str = LAD) -> LadResponse:
    """Same circular convolution through the DFT, ``ifft(fft(l) * fft(d))``.

    Passing ``d=None`` uses the cached kernel spectrum for ``grid``.
    """
    l = np.asarray(l, dtype=complex)
    if d is None:
        spec = _kernel(grid.order, grid.n_scan, grid.upsample, grid.spacing_ratio)[1]
    else:
        _check_lengths(l, np.asarray(d), grid)
        spec = np.fft.fft(d)
    _check_lengths(l, None, grid)
    r = np.fft.ifft(np.fft.fft(l, axis=-1) * spec, axis=-1)
    return _finish(r, grid, domain)


def plan_grid(plan: SamplingPlan, upsample: int = 16) -> LadGrid:
    return LadGrid(plan.kernel_order, upsample, plan.grid_order, plan.spacing_ratio)


def _plan_coords(record: ScanRecord, plan: SamplingPlan):
    if plan.kind == ANGLE_UNIFORM:
        return np.arcsin(np.clip(2 * record.lads, -1, 1)) / np.pi, ANGLE
    return record.lads, LAD


def reconstruct(record: ScanRecord, plan: SamplingPlan, upsample: int = 16, method: str = "ar") -> LadResponse:
    """Upsample a scan taken on ``plan`` by ``upsample``.

    ``method`` is ``"ar"`` (DFT), ``"lr"`` (direct convolution) or
    ``"cubic"`` (spline baseline).  Angle-uniform plans are reconstructed on
    the angle axis.
    """
    if method == "cubic":
        return cubic_baseline(record, plan, upsample)
    grid = plan_grid(plan, upsample)
    coords, domain = _plan_coords(record, plan)
    l = build_sample_vector(record, grid, coords)
    if method == "ar":
        return reconstruct_ar(l, None, grid, domain)
    if method == "lr":
        return reconstruct_lr(l, None, grid, domain)
    raise ValueError(f"unknown reconstruction method {method!r}")


def reconstruct_scaled(
    record: ScanRecord, order_kernel: int, n_scan: int, upsample: int = 16, spacing_ratio: float = 0.5
) -> LadResponse:
    """Reconstruct ``n_scan`` uniform samples with a kernel of order ``order_kernel``.

    The result is weighted by ``order_kernel / n_scan``; for ``n_scan`` at or
    above the kernel order it equals the minimal reconstruction.
    """
    grid = LadGrid(order_kernel, upsample, n_scan, spacing_ratio)
    return reconstruct_ar(build_sample_vector(record, grid), None, grid)


def direct_interpolation(
    record: ScanRecord, order: int, lads: ArrayLike, spacing_ratio: float = 0.5, n_scan: int | None = None
) -> NDArray[np.complex128]:
    """Evaluate ``(order / n_scan) sum_n L(l_n) D_order(2 d / lambda (lad - l_n))`` at any LADs.

    Plain summation, no FFT; also serves as a reference for the fast paths.
    """
    n_scan = order if n_scan is None else n_scan
    lads = np.asarray(lads, dtype=float)
    k = dirichlet(order, 2 * spacing_ratio * np.subtract.outer(lads, record.lads))
    return (order / n_scan) * (k @ record.values)


@dataclass(frozen=True)
class LadResponse2D:
    "2D response; ``values[i, j]`` at ``(az[i], el[j])``."

    values: NDArray[np.complex128]
    az: NDArray[np.float64]
    el: NDArray[np.float64]

    def to_csv(self, path) -> None:
        write_grid_csv(path, np.abs(self.values).T, self.az, self.el)


def write_grid_csv(path, rows: NDArray, x_axis: NDArray, y_axis: NDArray, x_name="az_lad", y_name="el_lad") -> None:
    """Row-major grid; two comment lines declare the column (x) and row (y) axes.

    Complex cells are written as ``re+imj``.
    """
    def axis_line(name, ax):
        step = float(ax[1] - ax[0]) if len(ax) > 1 else 0.0
        return f"# {name}: start={float(ax[0])!r} step={step!r} count={len(ax)}\n"

    with open(path, "w") as fh:
        fh.write(axis_line(f"columns {x_name}", x_axis))
        fh.write(axis_line(f"rows {y_name}", y_axis))
        for row in rows:
            if np.iscomplexobj(row):
                fh.write(",".join(f"{float(v.real)!r}{float(v.imag):+.17g}j" for v in row) + "\n")
            else:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_grid_csv(path):
    "Inverse of ``write_grid_csv``: returns ``(rows, x_axis, y_axis)``."
    axes = []
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                fields = dict(kv.split("=") for kv in line.split(":", 1)[1].split())
                start, step, count = float(fields["start"]), float(fields["step"]), int(fields["count"])
                axes.append(start + step * np.arange(count))
            elif line.strip():
                rows.append([complex(c) if "j" in c else float(c) for c in line.strip().split(",")])
    return np.array(rows), axes[0], axes[1]


def reconstruct_2d(record: ScanRecord2D, g2: UraGeometry, upsample: int = 10, method: str = "ar") -> LadResponse2D:
    """Separable 2D reconstruction: elevation columns first, then azimuth rows.

    The 2D Dirichlet kernel is the product of the two 1D kernels, so the axis
    order does not matter.
    """
    if method == "cubic":
        return cubic_baseline_2d(record, upsample)
    gh, gv = g2.horizontal, g2.vertical
    grid_el = LadGrid(gv.n_elements, upsample, spacing_ratio=gv.spacing_ratio)
    grid_az = LadGrid(gh.n_elements, upsample, spacing_ratio=gh.spacing_ratio)
    recon = reconstruct_ar if method == "ar" else reconstruct_lr
    step1 = recon(_place(record.values, record.el, grid_el), None, grid_el).values
    step2 = recon(_place(step1.T, record.az, grid_az), None, grid_az).values
    return LadResponse2D(step2.T, grid_az.lads, grid_el.lads)


def _spline(x, values, x_new, axis=-1):
    values = np.asarray(values)
    re = CubicSpline(x, values.real, axis=axis, bc_type="natural")(x_new)
    im = CubicSpline(x, values.imag, axis=axis, bc_type="natural")(x_new)
    return re + 1j * im


def cubic_baseline(record: ScanRecord, plan: SamplingPlan, upsample: int = 16) -> LadResponse:
    """Natural cubic spline through the scanned samples (real and imaginary parts separately).

    Works on the plan's sample axis (LAD, or angle for angle-uniform plans)
    and is evaluated on the same fine grid as the Dirichlet reconstruction.
    """
    if len(record) < 4:
        raise PlanError("cubic baseline needs at least 4 samples")
    grid = plan_grid(plan, upsample)
    if plan.kind == ANGLE_UNIFORM:
        x = np.arcsin(np.clip(2 * record.lads, -1, 1))
        axis, domain = grid.lads * np.pi, ANGLE
    else:
        x, (axis, domain) = record.lads, (grid.lads, LAD)
    return LadResponse(_spline(x, record.values, axis), axis, domain, grid.wrap_sign, grid)


def cubic_baseline_2d(record: ScanRecord2D, upsample: int = 10, spacing_ratios=(0.5, 0.5)) -> LadResponse2D:
    "Tensor-product natural cubic spline onto the same fine grid as ``reconstruct_2d``."
    if len(record.az) < 4 or len(record.el) < 4:
        raise PlanError("cubic baseline needs at least 4 samples per axis")
    az = LadGrid(len(record.az), upsample, spacing_ratio=spacing_ratios[0]).lads
    el = LadGrid(len(record.el), upsample, spacing_ratio=spacing_ratios[1]).lads
    tmp = _spline(record.el, record.values, el, axis=1)
    return LadResponse2D(_spline(record.az, tmp, az, axis=0), az, el)
