"""Evaluation metrics: wrapped LAD errors, amplitude errors, CRLB and detection rates."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .detection import DetectionReport
from .errors import MetricError
from .geometry import wrap_lad

MISSED_LAD_ERROR = np.sqrt(3) / 4
"LAD error charged for a missed target: the LAD of the largest placement angle, pi/3."


def lad_error(eta, eta_hat, period: float = 1.0):
    "Magnitude of the LAD error wrapped onto [-period/2, period/2)."
    return np.abs(wrap_lad(np.asarray(eta) - np.asarray(eta_hat), period))


def rmse(errors) -> float:
    errors = np.asarray(errors)
    if errors.size == 0:
        raise MetricError("RMSE of an empty sample")
    return float(np.sqrt(np.mean(np.abs(errors) ** 2)))


def lad_rmse(eta, eta_hat, period: float = 1.0) -> float:
    return rmse(lad_error(eta, eta_hat, period))


def peak_rmse(pairs: Sequence[tuple[complex, complex]]) -> float:
    "RMSE of ``true_amplitude - reconstructed_amplitude`` over ``(true, estimate)`` pairs."
    pairs = np.asarray(pairs, dtype=complex)
    if pairs.size == 0:
        raise MetricError("peak RMSE needs at least one pair")
    return rmse(pairs[:, 0] - pairs[:, 1])


def crlb(sigma_n: float, n_elements: int, spacing_ratio: float = 0.5) -> float:
    """Standard-deviation bound on the LAD of a single tone seen by a digital ULA.

    ``sigma_n`` is the per-antenna noise standard deviation for a unit
    amplitude target.  Independent of the LAD itself.
    """
    n = n_elements
    return sigma_n / (2 * np.pi * 2 * spacing_ratio) * np.sqrt(6 / (n * (n * n - 1)))


def normalized_rmse_2d(recon, reference) -> float:
    "sqrt(sum |R - L|^2 / sum |L|^2) over a common grid."
    recon = np.asarray(recon)
    reference = np.asarray(reference)
    if recon.shape != reference.shape:
        raise MetricError("grids differ in shape")
    energy = np.sum(np.abs(reference) ** 2)
    if energy == 0:
        raise MetricError("reference response has zero energy")
    return float(np.sqrt(np.sum(np.abs(recon - reference) ** 2) / energy))


@dataclass
class TrialOutcome:
    true_lads: list[float]
    estimated: DetectionReport
    true_amplitudes: list[complex] = field(default_factory=list)


def match_targets(true_lads, est_lads, radius: float, period: float = 1.0):
    """Greedy nearest-first association of estimates to true targets.

    Returns ``(pairs, unmatched_true, unmatched_est)`` with index pairs
    ``(i_true, j_est)``; only pairs closer than ``radius`` are matched.
    """
    true_lads = np.asarray(true_lads, dtype=float)
    est_lads = np.asarray(est_lads, dtype=float)
    if true_lads.size == 0 or est_lads.size == 0:
        return [], list(range(true_lads.size)), list(range(est_lads.size))
    dist = lad_error(true_lads[:, None], est_lads[None, :], period)
    flat = np.argsort(dist, axis=None, kind="stable")
    used_t, used_e, pairs = set(), set(), []
    for k in flat:
        i, j = divmod(int(k), est_lads.size)
        if dist[i, j] > radius:
            break
        if i in used_t or j in used_e:
            continue
        used_t.add(i)
        used_e.add(j)
        pairs.append((i, j))
    return (
        pairs,
        [i for i in range(true_lads.size) if i not in used_t],
        [j for j in range(est_lads.size) if j not in used_e],
    )


def fa_md_rates(outcomes: Iterable[TrialOutcome], match_radius: float, period: float = 1.0) -> tuple[float, float]:
    """False alarms per experiment and fraction of missed targets.

    The false-alarm rate counts every unmatched estimate, so it can exceed 1.
    """
    n_trials = n_true = n_fa = n_md = 0
    for out in outcomes:
        _, miss, fa = match_targets(out.true_lads, out.estimated.lads, match_radius, period)
        n_trials += 1
        n_true += len(out.true_lads)
        n_fa += len(fa)
        n_md += len(miss)
    if n_trials == 0:
        raise MetricError("no outcomes")
    return n_fa / n_trials, (n_md / n_true if n_true else 0.0)


def multi_target_errors(outcome: TrialOutcome, match_radius: float, missed_error: float = MISSED_LAD_ERROR, period: float = 1.0):
    "Per-true-target LAD errors; missed targets count as ``missed_error``."
    pairs, miss, _ = match_targets(outcome.true_lads, outcome.estimated.lads, match_radius, period)
    errs = [float(lad_error(outcome.true_lads[i], outcome.estimated.peaks[j].lad, period)) for i, j in pairs]
    return errs + [missed_error] * len(miss)


METRIC_FIELDS = ["scenario", "sweep_name", "sweep_value", "metric", "value", "trials"]


def append_metrics(path, rows: Iterable[dict], params: dict | None = None) -> None:
    """Append metric rows to a CSV, writing the header when the file is new.

    Every row carries ``params`` as extra leading columns so files are
    self-describing.
    """
    params = params or {}
    fields = list(params) + METRIC_FIELDS
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        if new:
            w.writeheader()
        for row in rows:
            w.writerow({**params, **row})
