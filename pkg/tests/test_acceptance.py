"""Acceptance criteria 1-8, each at its stated tolerance.

Every test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  Run standalone with ``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
from scipy.stats import binom

from acceptance_log import report
from sara.detection import cfar_threshold
from sara.geometry import UlaGeometry, UraGeometry, sum_coarray
from sara.metrics import crlb
from sara.reconstruction import LadGrid, build_kernel_vector, build_sample_vector, reconstruct, reconstruct_ar, reconstruct_lr
from sara.sampling import lad_uniform_plan
from sara.signal_model import MONOSTATIC, Scene, ScanRecord, scan_scene
from sara.simulation import ScenarioConfig, imaging_2d, random_scene_2d, run_benchmark, run_multi_target, run_single_target, trial_rng


def _value(rows, method, metric):
    return next(r["value"] for r in rows if r["method"] == method and r["metric"] == metric)


def test_criterion_1_lossless_2d():
    t0 = time.perf_counter()
    ula = UlaGeometry.half_wavelength(16)
    scene = random_scene_2d(100, trial_rng(2024, 1))
    res = imaging_2d(scene, UraGeometry(ula, ula), upsample=10)
    elapsed = time.perf_counter() - t0
    ok = res["eps_sara"] <= 1e-9 and 0.2 <= res["eps_cubic"] <= 0.6 and elapsed < 10
    detail = f"eps_sara={res['eps_sara']:.2e} (<=1e-9), eps_cubic={res['eps_cubic']:.3f} (in [0.2, 0.6]), {elapsed:.2f}s (<10s)"
    assert report(1, "loss-less 16x16 URA reconstruction", ok, detail)


def test_criterion_2_lr_equals_ar():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in (7, 8, 15, 16):
        grid = LadGrid(n, 16)
        plan = lad_uniform_plan(UlaGeometry.half_wavelength(n))
        d = build_kernel_vector(grid)
        for _ in range(50):
            rec = ScanRecord(plan.lad_points, rng.standard_normal(n) + 1j * rng.standard_normal(n), np.zeros(n))
            l = build_sample_vector(rec, grid)
            diff = np.abs(reconstruct_lr(l, d, grid).values - reconstruct_ar(l, d, grid).values)
            worst = max(worst, float(diff.max()))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 5
    assert report(2, "LR equals AR on 200 random inputs", ok, f"max|diff|={worst:.2e} (<1e-9), {elapsed:.2f}s (<5s)")


def test_criterion_3_single_target_vs_crlb():
    t0 = time.perf_counter()
    cfg = ScenarioConfig(noise_power_db=[-30.0], trials=5000, methods=["sara-ar", "cubic"], rng_seed=3)
    rows = run_single_target(cfg)
    elapsed = time.perf_counter() - t0
    sara, cubic = _value(rows, "sara-ar", "lad_rmse"), _value(rows, "cubic", "lad_rmse")
    bound = crlb(math.sqrt(1e-3), 31)
    ok = bound / 2 <= sara <= 2 * bound and cubic >= 3 * sara and elapsed < 120
    detail = (
        f"SARA rmse={sara:.3e}, crlb(31)={bound:.3e}, ratio={sara / bound:.2f} (<=2); "
        f"CUBIC/SARA={cubic / sara:.1f} (>=3); {elapsed:.1f}s (<120s)"
    )
    assert report(3, "single-target RMSE within 2x of CRLB, cubic floor", ok, detail)


def test_criterion_4_lad_vs_angle_sampling():
    lad_cfg = ScenarioConfig(noise_power_db=[-30.0], trials=5000, methods=["sara-ar"], rng_seed=4)
    ang_cfg = ScenarioConfig(noise_power_db=[-30.0], trials=5000, methods=["sara-ar"], rng_seed=4, sampling="angle")
    lad = _value(run_single_target(lad_cfg), "sara-ar", "lad_rmse")
    ang = _value(run_single_target(ang_cfg), "sara-ar", "lad_rmse")
    ok = ang >= 5 * lad
    assert report(4, "uniform-angle sampling error floor", ok, f"angle rmse={ang:.3e}, LAD rmse={lad:.3e}, ratio={ang / lad:.1f} (>=5)")


def test_criterion_5_cfar_calibration():
    t0 = time.perf_counter()
    n, scans, p_fa = 16, 100_000, 1e-3
    noise = 10 ** (-30 / 10)
    g = UlaGeometry.half_wavelength(n)
    plan = lad_uniform_plan(sum_coarray(g))
    zeta = cfar_threshold(noise / n, p_fa, len(plan))
    rng = trial_rng(5)
    scene = Scene([], noise)
    hits = sum(np.max(np.abs(scan_scene(scene, g, plan, MONOSTATIC, rng=rng).values)) > zeta for _ in range(scans))
    elapsed = time.perf_counter() - t0
    lo, hi = binom.interval(0.99, scans, p_fa)
    ok = lo <= hits <= hi and elapsed < 60
    detail = f"exceedances={hits}/{scans} (99% interval [{lo:.0f}, {hi:.0f}]), {elapsed:.1f}s (<60s)"
    assert report(5, "CFAR false-alarm calibration", ok, detail)


def test_criterion_6_multi_target_resolution():
    cfg = ScenarioConfig(
        trials=1000,
        methods=["sara-ar"],
        multi_elements=[8],
        multi_noise_power_db=[-30.0],
        kappas=[0.0, 6.0],
        rng_seed=6,
    )
    rows = run_multi_target(cfg, [0.3, 2.0, 3.0])
    unit = 1 / 15

    def get(du, kappa, metric):
        return next(
            r["value"]
            for r in rows
            if abs(r["sweep_value"] - du * unit) < 1e-12 and r["kappa"] == kappa and r["metric"] == metric
        )

    md_resolved, md_close = get(2.0, 6.0, "p_md"), get(0.3, 6.0, "p_md")
    fa_strict = [get(du, 6.0, "p_fa") for du in (2.0, 3.0)]
    fa_loose = [get(du, 0.0, "p_fa") for du in (2.0, 3.0)]
    limit = 10 * cfg.p_fa
    ok = md_resolved < 0.05 and md_close > 0.5 and max(fa_strict) < limit and min(fa_loose) > limit
    detail = (
        f"P_MD(2/15)={md_resolved:.3f} (<0.05), P_MD(0.3/15)={md_close:.3f} (>0.5), "
        f"P_FA kappa=6 {fa_strict} (<{limit:g}), kappa=0 {fa_loose} (>{limit:g})"
    )
    assert report(6, "three-target resolution and false alarms", ok, detail)


def test_criterion_7_property_suites():
    import test_detection
    import test_geometry
    import test_metrics
    import test_reconstruction
    import test_signal_model

    checks = [
        ("periodicity", test_signal_model.test_replica_periodicity),
        ("dirichlet limits", test_signal_model.test_dirichlet_limits),
        ("dirichlet period", test_signal_model.test_dirichlet_period),
        ("truncated sinc sum", test_signal_model.test_truncated_sinc_sum_converges),
        ("summation oracle", test_reconstruction.test_direct_summation_oracle),
        ("co-array sums", test_geometry.test_sum_coarray_enumerates_pairwise_sums),
        ("lad error bounds", test_metrics.test_lad_error_symmetric_and_bounded),
        ("wrap bounds", test_geometry.test_wrap_bounds),
    ]
    for n in (8, 16, 64):
        for s in (0.01, 0.3):
            checks.append((f"fisher N={n}", lambda n=n, s=s: test_metrics.test_crlb_matches_fisher_oracle(n, s)))
    checks.append(("sidelobe oracle", lambda: test_detection.test_sidelobe_against_sweep(31)))
    failed = []
    for name, fn in checks:
        try:
            fn()
        except Exception as exc:
            failed.append(f"{name}: {type(exc).__name__}")
    ok = not failed
    assert report(7, "property suites", ok, f"{len(checks) - len(failed)}/{len(checks)} passed" + (f"; {failed}" if failed else ""))


def test_criterion_8_benchmark_trend():
    rows = run_benchmark([16, 128], output_size=256, repeats=100, warmup=10)
    t = {(r["method"], r["n_elements"]): r["median_seconds"] for r in rows}
    ratio = {m: t[(m, 128)] / t[(m, 16)] for m in ("ar", "lr", "cubic")}
    ok = ratio["ar"] > ratio["cubic"]
    detail = f"time ratio N=128/N=16: AR={ratio['ar']:.2f}, CUBIC={ratio['cubic']:.2f} (need AR > CUBIC); LR={ratio['lr']:.2f}"
    assert report(8, "reconstruction runtime trend at output 256", ok, detail)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
