import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sara.detection import DetectionReport, Peak
from sara.errors import MetricError
from sara.metrics import (
    MISSED_LAD_ERROR,
    TrialOutcome,
    append_metrics,
    crlb,
    fa_md_rates,
    lad_error,
    lad_rmse,
    match_targets,
    multi_target_errors,
    normalized_rmse_2d,
    peak_rmse,
    rmse,
)

lads = st.floats(-5, 5)


@given(lads, lads)
def test_lad_error_symmetric_and_bounded(a, b):
    e = lad_error(a, b)
    assert e == pytest.approx(lad_error(b, a), abs=1e-9)
    assert 0 <= e <= 0.5


def test_lad_error_wraps():
    assert lad_error(0.49, -0.49) == pytest.approx(0.02)
    assert lad_error(0.9, -0.9, period=2.0) == pytest.approx(0.2)


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=50), st.randoms())
def test_rmse_permutation_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert rmse(xs) == pytest.approx(rmse(ys), rel=1e-12, abs=1e-300)


def test_rmse_values():
    assert rmse([3, -4]) == pytest.approx(np.sqrt(12.5))
    assert lad_rmse([0.1, 0.2], [0.1, 0.3]) == pytest.approx(0.1 / np.sqrt(2))
    assert peak_rmse([(1 + 1j, 1), (2, 2)]) == pytest.approx(np.sqrt(0.5))
    with pytest.raises(MetricError):
        rmse([])
    with pytest.raises(MetricError):
        peak_rmse([])


def fisher_crlb(sigma_n, n, spacing_ratio=0.5, eta=0.07, h=1e-6):
    "Bound from a finite-difference Fisher matrix of the per-antenna single-tone model."
    y = (np.arange(n) - (n - 1) / 2) * 2 * spacing_ratio

    def mean(theta):
        eta_, re, im = theta
        return (re + 1j * im) * np.exp(2j * np.pi * y * eta_)

    theta = np.array([eta, 0.6, 0.8])
    jac = np.empty((n, 3), dtype=complex)
    for k in range(3):
        dt = np.zeros(3)
        dt[k] = h
        jac[:, k] = (mean(theta + dt) - mean(theta - dt)) / (2 * h)
    fim = 2 / sigma_n**2 * np.real(jac.conj().T @ jac)
    return np.sqrt(np.linalg.inv(fim)[0, 0])


@pytest.mark.parametrize("n", [8, 16, 64])
@pytest.mark.parametrize("sigma_n", [0.01, 0.3])
def test_crlb_matches_fisher_oracle(n, sigma_n):
    assert crlb(sigma_n, n) == pytest.approx(fisher_crlb(sigma_n, n), rel=0.02)


def test_crlb_spacing_and_scaling():
    assert crlb(0.1, 16, 0.25) == pytest.approx(2 * crlb(0.1, 16, 0.5))
    assert crlb(0.2, 16) == pytest.approx(2 * crlb(0.1, 16))
    assert crlb(0.1, 16, 0.3) == pytest.approx(fisher_crlb(0.1, 16, 0.3), rel=0.02)


def test_normalized_rmse_2d():
    ref = np.ones((4, 4))
    assert normalized_rmse_2d(ref, ref) == 0.0
    assert normalized_rmse_2d(1.5 * ref, ref) == pytest.approx(0.5)
    with pytest.raises(MetricError):
        normalized_rmse_2d(ref, np.zeros((4, 4)))
    with pytest.raises(MetricError):
        normalized_rmse_2d(ref, np.ones((3, 4)))


def report(*lads_):
    return DetectionReport([Peak(l, 1.0, i) for i, l in enumerate(lads_)])


def test_match_targets_greedy():
    pairs, miss, fa = match_targets([0.0, 0.1], [0.101, 0.02, 0.3], radius=0.03)
    assert sorted(pairs) == [(0, 1), (1, 0)]
    assert miss == [] and fa == [2]
    assert match_targets([0.1], [], 0.1) == ([], [0], [])


def test_fa_md_rates_and_errors():
    outs = [
        TrialOutcome([0.0, 0.2], report(0.001, 0.4, -0.3)),
        TrialOutcome([0.0, 0.2], report(0.199)),
    ]
    p_fa, p_md = fa_md_rates(outs, 0.01)
    assert p_fa == pytest.approx(1.0)
    assert p_md == pytest.approx(0.5)
    errs = multi_target_errors(outs[0], 0.01)
    assert errs == pytest.approx([0.001, MISSED_LAD_ERROR])
    with pytest.raises(MetricError):
        fa_md_rates([], 0.01)


def test_append_metrics(tmp_path):
    path = tmp_path / "m.csv"
    row = {"scenario": "s", "sweep_name": "x", "sweep_value": 1, "metric": "rmse", "value": 0.1, "trials": 5}
    append_metrics(path, [row], {"n_elements": 16})
    append_metrics(path, [row], {"n_elements": 16})
    lines = path.read_text().splitlines()
    assert lines[0] == "n_elements,scenario,sweep_name,sweep_value,metric,value,trials"
    assert len(lines) == 3
