"""Monte Carlo campaigns: single and multiple targets, 2D imaging, runtime benchmark."""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .detection import DetectorConfig, detect, refine_peak
from .errors import ConfigError
from .geometry import UlaGeometry, UraGeometry, sum_coarray, wavelength_from_frequency
from .metrics import (
    MISSED_LAD_ERROR,
    TrialOutcome,
    crlb,
    fa_md_rates,
    lad_error,
    multi_target_errors,
    normalized_rmse_2d,
    rmse,
)
from .reconstruction import (
    LadGrid,
    LadResponse,
    cubic_baseline_2d,
    reconstruct,
    reconstruct_2d,
    write_grid_csv,
)
from .sampling import (
    angle_uniform_plan,
    extended_plan,
    lad_uniform_plan,
    reduced_plan,
    ura_plan,
)
from .signal_model import (
    MODES,
    MONOSTATIC,
    RX_ONLY,
    Scatterer,
    Scene,
    dirichlet,
    lad_response_2d,
    random_phase_scene,
    scan_scene,
    scan_scene_2d,
)

METHODS = ("sara-ar", "sara-lr", "cubic", "absmax", "sara-red")
SAMPLINGS = ("lad", "angle")
_RECON = {"sara-ar": "ar", "sara-lr": "lr", "cubic": "cubic", "sara-red": "ar"}


@dataclass
class ScenarioConfig:
    """Campaign parameters.  Defaults: 16 elements at 28 GHz, half-wavelength spacing, static targets within +-pi/3."""

    n_elements: int = 16
    carrier_frequency: float = 28e9
    spacing_ratio: float = 0.5
    scan_period: float = 8.93e-6
    target_speed: float = 0.0
    theta_max: float = math.pi / 3
    noise_power_db: list = field(default_factory=lambda: [-40.0, -30.0, -20.0, -10.0, 0.0])
    trials: int = 10_000
    upsample: int = 16
    sampling: str = "lad"
    methods: list = field(default_factory=lambda: ["sara-ar", "cubic"])
    mode: str = MONOSTATIC
    extra_scans: int = 0
    p_fa: float = 1e-3
    kappa: float = 6.0
    max_iterations: int = 10
    rng_seed: int = 0
    n_targets: int = 3
    multi_elements: list = field(default_factory=lambda: [8, 16])
    multi_noise_power_db: list = field(default_factory=lambda: [-5.0, -30.0])
    kappas: list = field(default_factory=lambda: [0.0, 6.0])
    delta_units: list = field(default_factory=lambda: [0.3, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0])

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("n_elements", "carrier_frequency", "spacing_ratio", "theta_max", "trials", "upsample"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.scan_period < 0 or self.target_speed < 0:
            raise ConfigError("scan_period and target_speed must be >= 0")
        if self.theta_max > math.pi / 2:
            raise ConfigError("theta_max must be <= pi/2")
        if self.sampling not in SAMPLINGS:
            raise ConfigError(f"sampling must be one of {SAMPLINGS}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ConfigError(f"unknown methods {sorted(bad)}")
        if not 0 < self.p_fa < 1:
            raise ConfigError("p_fa must lie in (0, 1)")

    @property
    def wavelength(self) -> float:
        return wavelength_from_frequency(self.carrier_frequency)

    def geometry(self, n_elements: int | None = None) -> UlaGeometry:
        lam = self.wavelength
        return UlaGeometry(n_elements or self.n_elements, self.spacing_ratio * lam, lam)

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    "Independent counter-based stream for one trial, keyed by its position in the campaign."
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))))


def worker_count() -> int:
    env = os.environ.get("SARA_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_trials(fn, argsets, workers: int | None = None) -> list:
    "Map ``fn`` over ``argsets`` preserving order, so reductions do not depend on parallelism."
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [fn(*a) for a in argsets]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda a: fn(*a), argsets))


def scan_geometry(g: UlaGeometry, mode: str) -> UlaGeometry:
    "Array whose lattice governs the scan: the sum co-array for monostatic operation."
    return sum_coarray(g) if mode == MONOSTATIC else g


def build_plan(cfg: ScenarioConfig, g: UlaGeometry, method: str, sampling: str | None = None):
    sampling = sampling or cfg.sampling
    sg = scan_geometry(g, cfg.mode)
    if method == "sara-red":
        return reduced_plan(sg, g.n_elements) if cfg.mode == MONOSTATIC else reduced_plan(g, max(g.n_elements // 2, 1))
    n_scan = sg.n_elements + cfg.extra_scans
    if sampling == "angle":
        return angle_uniform_plan(n_scan)
    if cfg.extra_scans > 0:
        return extended_plan(sg, n_scan)
    return lad_uniform_plan(sg)


def estimate_peak(resp: LadResponse) -> tuple[float, complex]:
    "Grid maximum of ``|resp|`` refined by a parabola through its neighbours."
    return refine_peak(resp, int(np.argmax(np.abs(resp.values))))


def _method_estimate(record, plan, method, upsample):
    if method == "absmax":
        i = int(np.argmax(np.abs(record.values)))
        return float(record.lads[i]), complex(record.values[i])
    return estimate_peak(reconstruct(record, plan, upsample, _RECON[method]))


def single_target_trial(cfg: ScenarioConfig, noise_power: float, rng, methods=None, sampling=None):
    """One random target; returns ``{method: (lad_error, true_amp, est_amp)}``."""
    methods = methods or cfg.methods
    g = cfg.geometry()
    eta = math.sin(rng.uniform(-cfg.theta_max, cfg.theta_max)) / 2
    scene = random_phase_scene([eta], rng, noise_power, cfg.target_speed)
    records = {}
    out = {}
    alias = 1 / (2 * cfg.spacing_ratio)
    for m in methods:
        plan = build_plan(cfg, g, m, sampling)
        key = (plan.kind, plan.kernel_order, plan.grid_order)
        if key not in records:
            records[key] = scan_scene(scene, g, plan, cfg.mode, cfg.scan_period, rng)
        lad_hat, amp = _method_estimate(records[key], plan, m, cfg.upsample)
        out[m] = (float(lad_error(eta, lad_hat, alias)), scene.amplitudes[0], amp)
    return out


def run_single_target(cfg: ScenarioConfig, workers: int | None = None, scenario: str = "single") -> list[dict]:
    """LAD RMSE and peak RMSE per noise level and method, with CRLB references."""
    rows = []
    for li, db in enumerate(cfg.noise_power_db):
        noise = 10 ** (db / 10)
        args = [(cfg, noise, trial_rng(cfg.rng_seed, li, t)) for t in range(cfg.trials)]
        results = run_trials(single_target_trial, args, workers)
        sigma_n = math.sqrt(noise)
        refs = {
            "crlb": crlb(sigma_n, cfg.n_elements, cfg.spacing_ratio),
            "crlb_coarray": crlb(sigma_n, 2 * cfg.n_elements - 1, cfg.spacing_ratio),
        }
        for m in cfg.methods:
            errs = np.array([r[m][0] for r in results])
            amps = np.array([(r[m][1], r[m][2]) for r in results])
            metrics = {"lad_rmse": rmse(errs), "peak_rmse": rmse(amps[:, 0] - amps[:, 1]), **refs}
            for name, val in metrics.items():
                rows.append(
                    {
                        **_params(cfg, noise_power_db=db),
                        "method": m,
                        "scenario": scenario,
                        "sweep_name": "noise_power_db",
                        "sweep_value": db,
                        "metric": name,
                        "value": val,
                        "trials": cfg.trials,
                    }
                )
    return rows


def _params(cfg: ScenarioConfig, **over) -> dict:
    p = {
        "n_elements": cfg.n_elements,
        "mode": cfg.mode,
        "sampling": cfg.sampling,
        "noise_power_db": "",
        "target_speed": cfg.target_speed,
        "theta_max": cfg.theta_max,
        "upsample": cfg.upsample,
        "extra_scans": cfg.extra_scans,
        "kappa": "",
        "rng_seed": cfg.rng_seed,
    }
    p.update(over)
    return p


PARAM_FIELDS = list(_params(ScenarioConfig(trials=1)).keys()) + ["method"]


def place_targets(rng, n_targets: int, delta: float, lad_max: float) -> np.ndarray:
    """``n_targets`` LADs spaced exactly ``delta`` apart, the group placed uniformly in ``[-lad_max, lad_max]``."""
    span = delta * (n_targets - 1)
    if span > 2 * lad_max:
        raise ConfigError("targets do not fit inside the placement interval")
    start = rng.uniform(-lad_max, lad_max - span)
    return start + delta * np.arange(n_targets)


def multi_target_trial(cfg, n_elements, noise_power, delta, rng, methods, sampling=None):
    """Three (by default) closely spaced targets; returns ``{(method, kappa): TrialOutcome}``."""
    sub = replace(cfg, n_elements=n_elements)
    g = sub.geometry()
    lads = place_targets(rng, cfg.n_targets, delta, math.sin(cfg.theta_max) / 2)
    scene = random_phase_scene(lads, rng, noise_power, cfg.target_speed)
    records = {}
    out = {}
    for m in methods:
        plan = build_plan(sub, g, m, sampling)
        key = (plan.kind, plan.kernel_order, plan.grid_order)
        if key not in records:
            records[key] = scan_scene(scene, g, plan, cfg.mode, cfg.scan_period, rng)
        resp = reconstruct(records[key], plan, cfg.upsample, _RECON[m])
        for kappa in cfg.kappas:
            det = DetectorConfig(
                noise_power / n_elements,
                n_elements,
                cfg.p_fa,
                kappa,
                cfg.max_iterations,
                cfg.mode,
                cfg.spacing_ratio,
            )
            out[(m, kappa)] = TrialOutcome(list(lads), detect(resp, det), list(scene.amplitudes))
    return out


def run_multi_target(cfg: ScenarioConfig, delta_units=None, workers: int | None = None, scenario: str = "multi") -> list[dict]:
    """P_FA, P_MD and LAD RMSE versus target spacing.

    Spacing is given in units of the main-lobe half width ``1 / (2N - 1)``.
    """
    delta_units = cfg.delta_units if delta_units is None else delta_units
    methods = [m for m in cfg.methods if m != "absmax"]
    rows = []
    for ni, n in enumerate(cfg.multi_elements):
        order = 2 * n - 1 if cfg.mode == MONOSTATIC else n
        unit = 1 / (2 * cfg.spacing_ratio * order)
        radius = unit / 2
        for li, db in enumerate(cfg.multi_noise_power_db):
            noise = 10 ** (db / 10)
            for di, du in enumerate(delta_units):
                delta = du * unit
                args = [
                    (cfg, n, noise, delta, trial_rng(cfg.rng_seed, ni, li, di, t), methods)
                    for t in range(cfg.trials)
                ]
                results = run_trials(multi_target_trial, args, workers)
                for m in methods:
                    for kappa in cfg.kappas:
                        outs = [r[(m, kappa)] for r in results]
                        p_fa, p_md = fa_md_rates(outs, radius)
                        errs = np.concatenate([multi_target_errors(o, radius, MISSED_LAD_ERROR) for o in outs])
                        for name, val in (("p_fa", p_fa), ("p_md", p_md), ("lad_rmse", rmse(errs))):
                            rows.append(
                                {
                                    **_params(cfg, n_elements=n, noise_power_db=db, kappa=kappa),
                                    "method": m,
                                    "scenario": scenario,
                                    "sweep_name": "delta_lad",
                                    "sweep_value": delta,
                                    "metric": name,
                                    "value": val,
                                    "trials": cfg.trials,
                                }
                            )
    return rows


def random_scene_2d(n_scatterers: int, rng, noise_power: float = 0.0) -> Scene:
    """Scatterers uniform over the physical LAD disk ``az^2 + el^2 <= 1/4``.

    Amplitudes are circular complex Gaussian with per-component standard
    deviation ``1 / sqrt(2K)``, so the total scattered power is about one.
    """
    pts = []
    while len(pts) < n_scatterers:
        cand = rng.uniform(-0.5, 0.5, size=(2 * n_scatterers, 2))
        pts.extend(cand[np.sum(cand**2, axis=1) <= 0.25].tolist())
    pts = np.array(pts[:n_scatterers])
    std = 1 / math.sqrt(2 * n_scatterers)
    amps = std * (rng.standard_normal(n_scatterers) + 1j * rng.standard_normal(n_scatterers))
    return Scene([Scatterer((float(a), float(e)), complex(z)) for (a, e), z in zip(pts, amps)], noise_power)


def imaging_2d(scene: Scene, g2: UraGeometry, upsample: int = 10) -> dict:
    """Scan a URA image on its minimal grid and upsample it with SARA and cubic splines.

    Returns the grids and the normalized errors against the dense direct scan.
    """
    coarse_plan = ura_plan(g2)
    coarse = scan_scene_2d(scene, g2, coarse_plan, RX_ONLY)
    sara = reconstruct_2d(coarse, g2, upsample)
    cubic = cubic_baseline_2d(coarse, upsample, (g2.horizontal.spacing_ratio, g2.vertical.spacing_ratio))
    dense = lad_response_2d(scene, g2, sara.az, sara.el, RX_ONLY)
    return {
        "coarse": coarse,
        "sara": sara,
        "cubic": cubic,
        "dense": dense,
        "eps_sara": normalized_rmse_2d(sara.values, dense),
        "eps_cubic": normalized_rmse_2d(cubic.values, dense),
    }


def run_imaging_2d(scene: Scene, g2: UraGeometry, out_dir, upsample: int = 10) -> dict:
    """Write the true scene, dense scan, coarse scan, kernel and both reconstructions as grid CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = imaging_2d(scene, g2, upsample)
    az, el = res["sara"].az, res["sara"].el
    truth = np.zeros((az.size, el.size), dtype=complex)
    step_a, step_e = az[1] - az[0], el[1] - el[0]
    for s in scene.scatterers:
        i = int(round((s.lad[0] - az[0]) / step_a)) % az.size
        j = int(round((s.lad[1] - el[0]) / step_e)) % el.size
        truth[i, j] += s.amplitude
    gh, gv = g2.horizontal, g2.vertical
    kernel = np.outer(dirichlet(gh.n_elements, 2 * gh.spacing_ratio * az), dirichlet(gv.n_elements, 2 * gv.spacing_ratio * el))
    coarse = res["coarse"]
    write_grid_csv(out / "true_scene.csv", truth.T, az, el)
    write_grid_csv(out / "dense_scan.csv", res["dense"].T, az, el)
    write_grid_csv(out / "coarse_scan.csv", coarse.values.T, coarse.az, coarse.el)
    write_grid_csv(out / "kernel.csv", kernel.T.astype(complex), az, el)
    write_grid_csv(out / "sara.csv", res["sara"].values.T, az, el)
    write_grid_csv(out / "cubic.csv", res["cubic"].values.T, az, el)
    return res


def _time_call(fn, repeats: int, warmup: int) -> float:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def run_benchmark(orders, output_size: int = 256, repeats: int = 100, warmup: int = 10, rng_seed: int = 0) -> list[dict]:
    """Median wall-clock time of one reconstruction per method at a fixed output size.

    Receive-only ULA of order N with ``U = output_size // N``; the kernel
    spectrum is prepared once per order, as in a deployed scanner.
    """
    rows = []
    for n in orders:
        u = max(output_size // n, 1)
        g = UlaGeometry.half_wavelength(n)
        plan = lad_uniform_plan(g)
        rng = trial_rng(rng_seed, n)
        scene = random_phase_scene([rng.uniform(-0.4, 0.4)], rng, 1e-3)
        record = scan_scene(scene, g, plan, RX_ONLY, rng=rng)
        for method in ("ar", "lr", "cubic"):
            t = _time_call(lambda: reconstruct(record, plan, u, method), repeats, warmup)
            rows.append(
                {
                    "method": method,
                    "n_elements": n,
                    "upsample": u,
                    "output_size": n * u,
                    "repeats": repeats,
                    "median_seconds": t,
                }
            )
    return rows
