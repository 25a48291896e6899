"""Seeded Monte Carlo harness: detection / false-alarm / miss probabilities
over sweeps of attacker distance, SNR, and threshold.

Every trial owns an independent substream derived from (master_seed, trial
index), so results do not depend on execution order, chunking, or parallelism.
The batched engine shares the covariance/gain recursion across trials (it does
not depend on measurement data in a linear filter) and keeps all per-trial
state math elementwise, which makes chunked and unchunked runs bit-identical.
:func:`reference_trial` is the plain one-trial-at-a-time statement of the same
procedure; tests hold the two routes together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .detection import (
    ATTACKER,
    LEGITIMATE,
    OR_ACROSS_ANCHORS,
    SINGLE_ANCHOR,
    DetectorConfig,
    calibrate_tau,
    detect_step,
)
from .errors import InvalidInputError
from .propagation import sigma_from_snr
from .scenario import (
    PU,
    PUE,
    Scenario,
    emit_position_measurement,
    emit_rss,
    place_attacker_at_offset,
    truth_at,
    with_schedule_at,
)
from .tracking import (
    FilterEstimate,
    MeasurementModel,
    MotionModel,
    TargetState,
    gain_and_updated_covariance,
    initial_estimate,
    predict,
    track,
)

DEFAULT_CHUNK_SIZE = 20_000


@dataclass(frozen=True)
class TrialOutcome:
    """One Monte Carlo trial: what was scheduled, what the detector said."""

    scheduled: str
    verdict: str
    residual: float
    seed: int

    @property
    def is_detection(self) -> bool:
        return self.scheduled == PUE and self.verdict == ATTACKER

    @property
    def is_miss(self) -> bool:
        return self.scheduled == PUE and self.verdict == LEGITIMATE

    @property
    def is_false_alarm(self) -> bool:
        return self.scheduled == PU and self.verdict == ATTACKER


class SweepCoords(NamedTuple):
    d_pu_pue: float | None
    snr_db: float | None
    tau: float


@dataclass(frozen=True)
class MetricsReport:
    """Empirical detection metrics for one experiment cell."""

    pd: float | None
    pfa: float | None
    pm: float | None
    n_attack_trials: int
    n_legit_trials: int
    sweep_coords: SweepCoords | None = None


@dataclass(frozen=True)
class BaselineComparison:
    """Paired proposed-vs-baseline metrics at one distance bin."""

    distance: float
    actual_distance: float
    proposed: MetricsReport
    baseline: MetricsReport


def metrics(outcomes: Sequence[TrialOutcome], sweep_coords: SweepCoords | None = None) -> MetricsReport:
    """Count outcomes into detection / false-alarm / miss probabilities."""
    if not outcomes:
        raise InvalidInputError("need at least one trial outcome")
    n_attack = sum(1 for o in outcomes if o.scheduled == PUE)
    n_legit = len(outcomes) - n_attack
    detections = sum(1 for o in outcomes if o.is_detection)
    false_alarms = sum(1 for o in outcomes if o.is_false_alarm)
    pd = detections / n_attack if n_attack else None
    pm = (n_attack - detections) / n_attack if n_attack else None
    pfa = false_alarms / n_legit if n_legit else None
    return MetricsReport(pd, pfa, pm, n_attack, n_legit, sweep_coords)


def trial_seed_sequence(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    """The substream root for one trial; the whole harness derives randomness
    only through this function."""
    return np.random.SeedSequence((master_seed, trial_index))


def child_seed(master_seed: int, *path: int) -> int:
    """A derived 64-bit seed for a sub-experiment (one sweep cell, etc.)."""
    ss = np.random.SeedSequence((master_seed,) + tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


def _filter_models(scenario: Scenario) -> tuple[MotionModel, MeasurementModel]:
    v = scenario.process_noise_std
    return (
        MotionModel(scenario.dt, v * v, v * v),
        MeasurementModel.isotropic(scenario.meas_noise_std),
    )


def _step_accels(scenario: Scenario, eval_step: int) -> np.ndarray:
    """Acceleration input for the predict into each step (row 0 unused)."""
    acc = np.zeros((eval_step + 1, 2))
    for k in range(1, eval_step + 1):
        acc[k] = scenario.trajectory.accel_at(scenario.step_time(k - 1))
    return acc


@dataclass
class _CellResult:
    is_pue: np.ndarray
    d_kf: np.ndarray
    d_rss: np.ndarray
    residuals: np.ndarray
    attacker_flag: np.ndarray
    seeds: np.ndarray

    def outcomes(self) -> list[TrialOutcome]:
        return [
            TrialOutcome(
                PUE if pue else PU,
                ATTACKER if att else LEGITIMATE,
                float(res),
                int(seed),
            )
            for pue, att, res, seed in zip(
                self.is_pue, self.attacker_flag, self.residuals, self.seeds
            )
        ]


def _fuse(residuals: np.ndarray, config: DetectorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial fused residual and attacker flag from per-anchor residuals."""
    if config.fusion == OR_ACROSS_ANCHORS:
        fused = residuals.max(axis=1)
        flag = (residuals >= config.tau).any(axis=1)
    else:
        fused = residuals[:, 0]
        flag = fused >= config.tau
    return fused, flag


def _run_cell(
    scenario: Scenario,
    config: DetectorConfig,
    is_pue: np.ndarray,
    attacker_xy: np.ndarray,
    master_seed: int,
    chunk_size: int | None = None,
) -> _CellResult:
    """Vectorized execution of one cell's trials.

    The per-trial noise protocol, in substream order, is: (eval_step + 1) x 2
    standard normals for position measurements, then one per anchor for RSS.
    :func:`reference_trial` consumes the identical sequence.
    """
    n = len(is_pue)
    k_eval = scenario.evaluation_step
    n_anchors = len(scenario.anchors)
    chunk = chunk_size if chunk_size is not None else DEFAULT_CHUNK_SIZE
    if chunk < 1:
        raise InvalidInputError("chunk_size must be >= 1")

    motion, meas_model = _filter_models(scenario)
    truth = np.array([truth_at(scenario, k).position for k in range(k_eval + 1)])
    accels = _step_accels(scenario, k_eval)
    anchor_xy = np.array([[a.x, a.y] for a in scenario.anchors])
    link = scenario.link
    a_link = link.link_constant_db
    sigma_z = scenario.meas_noise_std
    sigma_db = scenario.rss_noise.sigma_db
    dt = scenario.dt
    half = 0.5 * dt * dt

    d_kf = np.empty((n, n_anchors))
    d_rss = np.empty((n, n_anchors))
    seeds = np.empty(n, dtype=np.uint64)

    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        m = hi - lo
        meas_noise = np.empty((m, k_eval + 1, 2))
        rss_noise = np.empty((m, n_anchors))
        for row in range(m):
            ss = trial_seed_sequence(master_seed, lo + row)
            gen = np.random.default_rng(ss)
            meas_noise[row] = gen.standard_normal((k_eval + 1, 2))
            rss_noise[row] = gen.standard_normal(n_anchors)
            seeds[lo + row] = ss.generate_state(1, np.uint64)[0]

        # Initialization from the first measurement, zero velocity.
        x = truth[0, 0] + sigma_z * meas_noise[:, 0, 0]
        y = truth[0, 1] + sigma_z * meas_noise[:, 0, 1]
        vx = np.zeros(m)
        vy = np.zeros(m)
        p = initial_estimate(truth[0], meas_model, scenario.v_max).covariance

        for k in range(1, k_eval + 1):
            ux, uy = accels[k]
            px = x + dt * vx + half * ux
            py = y + dt * vy + half * uy
            pvx = vx + dt * ux
            pvy = vy + dt * uy
            # Covariance and gain are measurement-independent: one shared
            # recursion through the exact same code path as tracking.track.
            p_pred = predict(
                FilterEstimate(TargetState(0.0, 0.0, 0.0, 0.0), p), motion, (0.0, 0.0)
            ).covariance
            g, p = gain_and_updated_covariance(p_pred, meas_model)
            ix = truth[k, 0] + sigma_z * meas_noise[:, k, 0] - px
            iy = truth[k, 1] + sigma_z * meas_noise[:, k, 1] - py
            x = px + g[0, 0] * ix + g[0, 1] * iy
            y = py + g[1, 0] * ix + g[1, 1] * iy
            vx = pvx + g[2, 0] * ix + g[2, 1] * iy
            vy = pvy + g[3, 0] * ix + g[3, 1] * iy

        tx = np.where(is_pue[lo:hi, None], attacker_xy[lo:hi], truth[k_eval])
        for j in range(n_anchors):
            d_kf[lo:hi, j] = np.hypot(x - anchor_xy[j, 0], y - anchor_xy[j, 1])
            d_tx = np.hypot(tx[:, 0] - anchor_xy[j, 0], tx[:, 1] - anchor_xy[j, 1])
            if (d_tx <= 0.0).any():
                raise InvalidInputError(
                    f"transmitter coincides with anchor {scenario.anchors[j].id!r}"
                )
            pr = -10.0 * link.alpha * np.log10(d_tx) + a_link + sigma_db * rss_noise[:, j]
            d_rss[lo:hi, j] = 10.0 ** ((a_link - pr) / (10.0 * link.alpha))

    residuals, attacker_flag = _fuse(np.abs(d_kf - d_rss), config)
    return _CellResult(is_pue.copy(), d_kf, d_rss, residuals, attacker_flag, seeds)


def _schedule_labels(n_trials: int, schedule_mix: float) -> np.ndarray:
    n_pue = round(schedule_mix * n_trials)
    return np.arange(n_trials) < n_pue


def _validate_run_args(n_trials: int, schedule_mix: float, master_seed: int) -> None:
    if n_trials < 1:
        raise InvalidInputError(f"n_trials must be >= 1, got {n_trials}")
    if not 0.0 <= schedule_mix <= 1.0:
        raise InvalidInputError(f"schedule_mix must be in [0, 1], got {schedule_mix}")
    if not (isinstance(master_seed, (int, np.integer)) and master_seed >= 0):
        raise InvalidInputError(f"master_seed must be a non-negative integer, got {master_seed!r}")


def run_trials(
    scenario_template: Scenario,
    config: DetectorConfig,
    n_trials: int,
    schedule_mix: float,
    master_seed: int,
    chunk_size: int | None = None,
) -> list[TrialOutcome]:
    """Run independent detection trials; each is a full tracking run evaluated
    at the scenario's designated step, with the trial's schedule label deciding
    which transmitter emits there."""
    _validate_run_args(n_trials, schedule_mix, master_seed)
    is_pue = _schedule_labels(n_trials, schedule_mix)
    attacker_xy = np.tile(np.asarray(scenario_template.attacker_pos, float), (n_trials, 1))
    cell = _run_cell(scenario_template, config, is_pue, attacker_xy, master_seed, chunk_size)
    return cell.outcomes()


def reference_trial(
    scenario: Scenario,
    config: DetectorConfig,
    master_seed: int,
    trial_index: int,
    scheduled: str = PU,
) -> TrialOutcome:
    """One trial executed through the plain per-step API (no batching).

    This is the readable statement of the trial procedure; the batched engine
    must agree with it, and tests enforce that.
    """
    ss = trial_seed_sequence(master_seed, trial_index)
    gen = np.random.default_rng(ss)
    k_eval = scenario.evaluation_step
    run = with_schedule_at(scenario, k_eval, scheduled)

    times = [run.step_time(k) for k in range(k_eval + 1)]
    zs = [emit_position_measurement(run, k, gen) for k in range(k_eval + 1)]
    motion, meas_model = _filter_models(run)
    accels = _step_accels(run, k_eval)
    init = initial_estimate(zs[0], meas_model, run.v_max)
    estimates = track(times, zs, motion, meas_model, init=init, accels=accels)

    samples = [emit_rss(run, k_eval, a, gen) for a in run.anchors]
    verdict = detect_step(estimates[k_eval], samples, run.anchors, run.link, config)
    seed = int(ss.generate_state(1, np.uint64)[0])
    return TrialOutcome(scheduled, verdict.label, verdict.residual, seed)


def _default_bearings(scenario: Scenario, eval_step: int) -> tuple[float, float]:
    """Collinear pair (toward / away from the designated anchor).

    Off-axis bearings shrink the observable residual below the true
    PU-attacker distance; the collinear default keeps the sweep axis equal to
    the detectable offset, which is the regime the comparison figures assume.
    """
    pu = truth_at(scenario, eval_step)
    anchor = scenario.anchors[0]
    theta = math.atan2(anchor.y - pu.y, anchor.x - pu.x)
    return (theta, theta + math.pi)


def _attacker_positions(
    scenario: Scenario,
    eval_step: int,
    distance: float,
    bearings: Sequence[float],
    n_trials: int,
) -> np.ndarray:
    pos = np.array(
        [
            place_attacker_at_offset(scenario.trajectory, eval_step, distance, b, dt=scenario.dt)
            for b in bearings
        ]
    )
    return pos[np.arange(n_trials) % len(bearings)]


def sweep_distance(
    base: Scenario,
    distances: Sequence[float],
    snr_db_list: Sequence[float],
    config: DetectorConfig,
    n_trials: int,
    master_seed: int,
    snr_calibration: float = 10.0,
    bearings: Sequence[float] | None = None,
    schedule_mix: float = 0.5,
    chunk_size: int | None = None,
) -> list[MetricsReport]:
    """One MetricsReport per (attacker distance, SNR) cell, distance-major."""
    if not distances or not snr_db_list:
        raise InvalidInputError("distances and snr_db_list must be non-empty")
    _validate_run_args(n_trials, schedule_mix, master_seed)
    k_eval = base.evaluation_step
    brg = tuple(bearings) if bearings else _default_bearings(base, k_eval)
    is_pue = _schedule_labels(n_trials, schedule_mix)
    reports = []
    for i, d in enumerate(distances):
        attacker_xy = _attacker_positions(base, k_eval, d, brg, n_trials)
        for j, snr in enumerate(snr_db_list):
            cell_scenario = replace(base, rss_noise=sigma_from_snr(snr, snr_calibration))
            cell = _run_cell(
                cell_scenario, config, is_pue, attacker_xy,
                child_seed(master_seed, 0, i, j), chunk_size,
            )
            reports.append(
                metrics(cell.outcomes(), SweepCoords(float(d), float(snr), config.tau))
            )
    return reports


def sweep_roc(
    base: Scenario,
    d_pu_pue: float,
    snr_db_list: Sequence[float],
    pfa_targets: Sequence[float],
    n_trials: int,
    master_seed: int,
    snr_calibration: float = 10.0,
    n_calibration: int | None = None,
    bearings: Sequence[float] | None = None,
    schedule_mix: float = 0.5,
    fusion: str = SINGLE_ANCHOR,
    chunk_size: int | None = None,
) -> list[MetricsReport]:
    """Calibrated-threshold operating points: per SNR, tau is fitted to each
    false-alarm target on a fresh legitimate-only calibration set and then
    evaluated on held-out trials."""
    if not snr_db_list or not pfa_targets:
        raise InvalidInputError("snr_db_list and pfa_targets must be non-empty")
    if any(not 0.0 < t < 1.0 for t in pfa_targets):
        raise InvalidInputError("pfa targets must lie in (0, 1)")
    _validate_run_args(n_trials, schedule_mix, master_seed)
    n_cal = n_calibration if n_calibration is not None else n_trials
    if n_cal < 1:
        raise InvalidInputError("n_calibration must be >= 1")

    k_eval = base.evaluation_step
    brg = tuple(bearings) if bearings else _default_bearings(base, k_eval)
    is_pue = _schedule_labels(n_trials, schedule_mix)
    probe = DetectorConfig(tau=0.0, fusion=fusion)
    reports = []
    for j, snr in enumerate(snr_db_list):
        cell_scenario = replace(base, rss_noise=sigma_from_snr(snr, snr_calibration))
        cal = _run_cell(
            cell_scenario, probe,
            np.zeros(n_cal, dtype=bool), np.zeros((n_cal, 2)),
            child_seed(master_seed, 1, j, 0), chunk_size,
        )
        attacker_xy = _attacker_positions(base, k_eval, d_pu_pue, brg, n_trials)
        eval_cell = _run_cell(
            cell_scenario, probe, is_pue, attacker_xy,
            child_seed(master_seed, 1, j, 1), chunk_size,
        )
        for target in pfa_targets:
            cfg = calibrate_tau(cal.residuals, target, fusion)
            _, flag = _fuse(np.abs(eval_cell.d_kf - eval_cell.d_rss), cfg)
            relabeled = _CellResult(
                eval_cell.is_pue, eval_cell.d_kf, eval_cell.d_rss,
                eval_cell.residuals, flag, eval_cell.seeds,
            )
            reports.append(
                metrics(relabeled.outcomes(), SweepCoords(float(d_pu_pue), float(snr), cfg.tau))
            )
    return reports


def _eval_step_for_distance(scenario: Scenario, reference: np.ndarray, distance: float) -> int:
    """First step at which the PU has moved at least `distance` from `reference`."""
    for k in range(scenario.n_steps):
        pos = truth_at(scenario, k).position
        if math.hypot(pos[0] - reference[0], pos[1] - reference[1]) >= distance:
            return k
    raise InvalidInputError(
        f"trajectory never reaches {distance} m from the reference position"
    )


def compare_baseline(
    base: Scenario,
    config: DetectorConfig,
    n_trials: int,
    master_seed: int,
    distances: Sequence[float] = (30.0, 50.0, 70.0, 90.0, 110.0, 130.0, 150.0),
    schedule_mix: float = 0.5,
    chunk_size: int | None = None,
) -> list[BaselineComparison]:
    """Paired evaluation of the tracking detector against the static-reference
    RSS baseline as the PU walks away from a fixed attacker.

    Both detectors consume the identical trial streams (same measurements,
    same RSS samples); the baseline's reference stays at the PU's initial
    position for the whole run.
    """
    if not distances:
        raise InvalidInputError("distances must be non-empty")
    _validate_run_args(n_trials, schedule_mix, master_seed)
    reference = np.array(base.trajectory.positions[0])
    anchor_xy = np.array([[a.x, a.y] for a in base.anchors])
    d_ref = np.hypot(reference[0] - anchor_xy[:, 0], reference[1] - anchor_xy[:, 1])
    is_pue = _schedule_labels(n_trials, schedule_mix)
    attacker_xy = np.tile(np.asarray(base.attacker_pos, float), (n_trials, 1))

    rows = []
    for i, d in enumerate(distances):
        k = _eval_step_for_distance(base, reference, d)
        pos = truth_at(base, k).position
        actual = float(np.hypot(pos[0] - base.attacker_pos[0], pos[1] - base.attacker_pos[1]))
        cell_scenario = replace(base, eval_step=k)
        cell = _run_cell(
            cell_scenario, config, is_pue, attacker_xy,
            child_seed(master_seed, 2, i), chunk_size,
        )
        base_res, base_flag = _fuse(np.abs(d_ref[None, :] - cell.d_rss), config)
        baseline_cell = _CellResult(
            cell.is_pue, np.tile(d_ref, (n_trials, 1)), cell.d_rss,
            base_res, base_flag, cell.seeds,
        )
        coords = SweepCoords(float(d), None, config.tau)
        rows.append(
            BaselineComparison(
                float(d), actual,
                metrics(cell.outcomes(), coords),
                metrics(baseline_cell.outcomes(), coords),
            )
        )
    return rows


def calibrated_config(
    base: Scenario,
    target_pfa: float,
    n_trials: int,
    master_seed: int,
    fusion: str = SINGLE_ANCHOR,
    chunk_size: int | None = None,
) -> DetectorConfig:
    """Fit tau on legitimate-only trials of the given scenario."""
    _validate_run_args(n_trials, 0.0, master_seed)
    probe = DetectorConfig(tau=0.0, fusion=fusion)
    cal = _run_cell(
        base, probe, np.zeros(n_trials, dtype=bool), np.zeros((n_trials, 2)),
        child_seed(master_seed, 3), chunk_size,
    )
    return calibrate_tau(cal.residuals, target_pfa, fusion)
