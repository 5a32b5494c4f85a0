import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sara.errors import ConfigError, DimensionError, PlanError
from sara.geometry import UlaGeometry, UraGeometry, sum_coarray
from sara.sampling import lad_uniform_plan, ura_plan
from sara.signal_model import (
    MONOSTATIC,
    RX_ONLY,
    Scatterer,
    Scene,
    beamform,
    complex_noise,
    dirichlet,
    doppler_rate,
    lad_response,
    planar_wave,
    point_spread,
    random_phase_scene,
    scan_scene,
    scan_scene_2d,
)

orders = st.integers(min_value=2, max_value=40)


def random_signal(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@given(orders, st.floats(min_value=0.2, max_value=1.5), st.floats(-0.5, 0.5), st.integers(0, 2**31))
def test_replica_periodicity(n, r, lad, seed):
    g = UlaGeometry(n, r, 1.0)
    a = random_signal(np.random.default_rng(seed), n)
    base = beamform(a, g, lad)
    for k in range(-2, 3):
        shifted = beamform(a, g, lad - k * g.alias_period)
        assert abs(shifted - (-1) ** (k * (n - 1)) * base) < 1e-10 * max(1, np.abs(a).sum())


@given(orders, st.integers(0, 2**31), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_beamform_linear(n, seed, alpha, beta):
    g = UlaGeometry.half_wavelength(n)
    rng = np.random.default_rng(seed)
    a, b = random_signal(rng, n), random_signal(rng, n)
    lads = np.linspace(-0.5, 0.5, 13)
    lhs = beamform(alpha * a + beta * b, g, lads)
    rhs = alpha * beamform(a, g, lads) + beta * beamform(b, g, lads)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + abs(alpha) + abs(beta)) * 10)


def test_beamform_dimension():
    with pytest.raises(DimensionError):
        beamform(np.ones(3), UlaGeometry.half_wavelength(4), 0.0)


@pytest.mark.parametrize("n", [3, 8, 15, 16])
def test_planar_wave_response_is_dirichlet(n):
    g = UlaGeometry.half_wavelength(n)
    lads = np.linspace(-0.7, 0.7, 101)
    np.testing.assert_allclose(beamform(planar_wave(g, 0.13), g, lads), dirichlet(n, lads - 0.13), atol=1e-12)


def test_dirichlet_limits():
    assert dirichlet(8, 1.0) == -1.0
    assert dirichlet(8, 2.0) == 1.0
    assert dirichlet(7, 1.0) == 1.0
    assert dirichlet(8, 0.0) == 1.0
    assert dirichlet(8, -3.0) == -1.0
    # continuity right next to the singularity
    for n in (5, 8):
        for k in (0, 1, 2):
            eps = 1e-9
            exact = np.sin(np.pi * n * (k + 1e-4)) / (n * np.sin(np.pi * (k + 1e-4)))
            assert dirichlet(n, k + 1e-4) == pytest.approx(exact, rel=1e-9)
            assert dirichlet(n, k + eps) == pytest.approx(dirichlet(n, float(k)), abs=1e-12)
    with pytest.raises(ConfigError):
        dirichlet(0, 0.1)


@given(orders, st.floats(-3, 3))
def test_dirichlet_period(n, u):
    p = 2 if n % 2 == 0 else 1
    assert dirichlet(n, u + p) == pytest.approx(dirichlet(n, u), abs=1e-9)
    if n % 2 == 0:
        assert dirichlet(n, u + 1) == pytest.approx(-dirichlet(n, u), abs=1e-9)


def test_truncated_sinc_sum_converges():
    n = 8
    g = UlaGeometry.half_wavelength(n)
    lads = np.linspace(-0.5, 0.5, 201)
    target = dirichlet(n, 2 * g.spacing_ratio * lads)
    errors = []
    for kmax in (10, 100, 1000, 10_000):
        k = np.arange(-kmax, kmax + 1)
        terms = (-1.0) ** (k * (n - 1)) * np.sinc(g.bandwidth * lads[:, None] - k[None, :] * n)
        errors.append(np.max(np.abs(terms.sum(axis=1) - target)))
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-3


def test_monostatic_psf_is_squared():
    g = UlaGeometry.half_wavelength(8)
    off = np.linspace(-0.4, 0.4, 17)
    np.testing.assert_allclose(point_spread(g, off, MONOSTATIC), point_spread(g, off, RX_ONLY) ** 2)
    with pytest.raises(ConfigError):
        point_spread(g, off, "bistatic")


def test_noise_variance_after_combining():
    g = UlaGeometry.half_wavelength(16)
    scene = Scene([], noise_power=0.1)
    plan = np.linspace(-0.5, 0.5, 100_000, endpoint=False)
    rec = scan_scene(scene, g, plan, RX_ONLY, rng=3)
    assert np.mean(np.abs(rec.values) ** 2) == pytest.approx(0.1 / 16, rel=0.05)


def test_complex_noise_circular():
    z = complex_noise(1, 2.0, 200_000)
    assert np.var(z.real) == pytest.approx(1.0, rel=0.02)
    assert np.var(z.imag) == pytest.approx(1.0, rel=0.02)
    assert abs(np.mean(z.real * z.imag)) < 0.02


def test_scan_matches_dense_response():
    g = UlaGeometry.half_wavelength(8)
    scene = Scene([Scatterer(0.1, 1 + 1j), Scatterer(-0.3, 0.5)])
    plan = lad_uniform_plan(sum_coarray(g))
    rec = scan_scene(scene, g, plan)
    np.testing.assert_allclose(rec.values, lad_response(scene, g, plan.lad_points), atol=1e-14)
    assert rec.times[-1] == 0.0


def test_doppler_rotates_phase():
    g = UlaGeometry(8, 0.5e-2, 1e-2)
    scene = Scene([Scatterer(0.0, 1.0, radial_speed=10.0)])
    rec = scan_scene(scene, g, [-0.01, 0.0, 0.01], MONOSTATIC, scan_period=1e-4)
    w = doppler_rate(g, 10.0, MONOSTATIC)
    assert w == pytest.approx(2 * np.pi * 2 * 10 / 1e-2)
    assert doppler_rate(g, 10.0, RX_ONLY) == pytest.approx(w / 2)
    assert np.angle(rec.values[1]) == pytest.approx(np.angle(np.exp(1j * w * 1e-4)))


def test_unsorted_plan_rejected():
    g = UlaGeometry.half_wavelength(4)
    with pytest.raises(PlanError):
        scan_scene(Scene(), g, [0.1, 0.0])


def test_scatterer_validation():
    with pytest.raises(ConfigError):
        Scatterer(0.7)
    with pytest.raises(ConfigError):
        Scene([], noise_power=-1)


def test_scene_roundtrip(tmp_path):
    scene = Scene([Scatterer(0.1, 1 - 2j, 3.0), Scatterer((0.1, -0.2), 0.5j)], 1e-3)
    scene.save(tmp_path / "s.json")
    back = Scene.load(tmp_path / "s.json")
    assert back.scatterers == scene.scatterers
    assert back.noise_power == pytest.approx(1e-3)


def test_random_phase_scene_unit_modulus():
    s = random_phase_scene([0.1, 0.2, 0.3], rng=0, speed=5.0)
    np.testing.assert_allclose(np.abs(s.amplitudes), 1.0)
    assert np.all(np.abs(s.speeds) <= 5.0)


@settings(max_examples=20)
@given(st.integers(0, 2**31))
def test_ura_scan_is_separable(seed):
    rng = np.random.default_rng(seed)
    g2 = UraGeometry(UlaGeometry.half_wavelength(4), UlaGeometry.half_wavelength(5))
    az, el = rng.uniform(-0.3, 0.3, 2)
    scene = Scene([Scatterer((az, el), 1.0)])
    rec = scan_scene_2d(scene, g2, ura_plan(g2))
    expect = np.outer(dirichlet(4, rec.az - az), dirichlet(5, rec.el - el))
    np.testing.assert_allclose(rec.values, expect, atol=1e-12)
