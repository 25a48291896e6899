"""World model: ground-truth trajectory, anchors, attacker placement, and the
synthetic measurements (positions and RSS) fed to the tracker and detector.

All emissions are pure functions of (scenario, step, anchor, rng stream);
scenarios and trajectories are immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .propagation import LinkModel, NoiseModel, RssSample, sample_rss
from .tracking import TargetState

PU = "PU"
PUE = "PUE"

_WAYPOINT_TOL = 1e-6


@dataclass(frozen=True)
class AnchorNode:
    """A fixed receiver with known coordinates that measures RSS."""

    id: str
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"anchor coordinates must be finite, got {self}")

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-constant-acceleration motion, closed form within each segment.

    times[i] are waypoint times (strictly increasing); positions/velocities are
    the exact kinematic state at each waypoint; accels[i] applies on the
    half-open segment [times[i], times[i+1]).  Waypoint consistency with the
    acceleration profile is validated on construction.
    """

    times: tuple[float, ...]
    positions: tuple[tuple[float, float], ...]
    velocities: tuple[tuple[float, float], ...]
    accels: tuple[tuple[float, float], ...]

    def __post_init__(self):
        n = len(self.times)
        if n < 2 or len(self.positions) != n or len(self.velocities) != n:
            raise InvalidInputError("trajectory needs >= 2 consistent waypoints")
        if len(self.accels) != n - 1:
            raise InvalidInputError("need one acceleration per segment")
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise InvalidInputError("waypoint times must be strictly increasing")
        flat = [v for wp in self.positions + self.velocities + self.accels for v in wp]
        if not all(math.isfinite(v) for v in list(self.times) + flat):
            raise InvalidInputError("trajectory values must be finite")
        for i, (ax, ay) in enumerate(self.accels):
            dt = self.times[i + 1] - self.times[i]
            px, py = self.positions[i]
            vx, vy = self.velocities[i]
            ex = px + vx * dt + 0.5 * ax * dt * dt
            ey = py + vy * dt + 0.5 * ay * dt * dt
            if math.hypot(ex - self.positions[i + 1][0], ey - self.positions[i + 1][1]) > _WAYPOINT_TOL:
                raise InvalidInputError(f"waypoint {i + 1} inconsistent with acceleration profile")
            if math.hypot(vx + ax * dt - self.velocities[i + 1][0], vy + ay * dt - self.velocities[i + 1][1]) > _WAYPOINT_TOL:
                raise InvalidInputError(f"waypoint {i + 1} velocity inconsistent with profile")

    @classmethod
    def from_segments(
        cls,
        start: tuple[float, float],
        velocity: tuple[float, float],
        segments: Sequence[tuple[float, float, float]],
        t0: float = 0.0,
    ) -> "Trajectory":
        """Build from (duration, ax, ay) segments; waypoints are derived exactly."""
        if not segments:
            raise InvalidInputError("need at least one segment")
        times = [t0]
        positions = [tuple(float(c) for c in start)]
        velocities = [tuple(float(c) for c in velocity)]
        accels = []
        for dur, ax, ay in segments:
            if not (math.isfinite(dur) and dur > 0.0):
                raise InvalidInputError(f"segment duration must be > 0, got {dur}")
            px, py = positions[-1]
            vx, vy = velocities[-1]
            times.append(times[-1] + dur)
            positions.append((px + vx * dur + 0.5 * ax * dur * dur, py + vy * dur + 0.5 * ay * dur * dur))
            velocities.append((vx + ax * dur, vy + ay * dur))
            accels.append((float(ax), float(ay)))
        return cls(tuple(times), tuple(positions), tuple(velocities), tuple(accels))

    @property
    def waypoints(self) -> tuple[tuple[float, float, float], ...]:
        return tuple((t, p[0], p[1]) for t, p in zip(self.times, self.positions))

    @property
    def start_time(self) -> float:
        return self.times[0]

    @property
    def end_time(self) -> float:
        return self.times[-1]

    def _segment_index(self, t: float) -> int:
        if not (self.start_time - 1e-9 <= t <= self.end_time + 1e-9):
            raise InvalidInputError(
                f"time {t} outside trajectory span [{self.start_time}, {self.end_time}]"
            )
        # Half-open segments; the end time belongs to the last segment.
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return min(max(i, 0), len(self.accels) - 1)

    def state_at(self, t: float) -> TargetState:
        i = self._segment_index(t)
        dt = t - self.times[i]
        px, py = self.positions[i]
        vx, vy = self.velocities[i]
        ax, ay = self.accels[i]
        return TargetState(
            px + vx * dt + 0.5 * ax * dt * dt,
            py + vy * dt + 0.5 * ay * dt * dt,
            vx + ax * dt,
            vy + ay * dt,
        )

    def accel_at(self, t: float) -> tuple[float, float]:
        return self.accels[self._segment_index(t)]


@dataclass(frozen=True)
class Scenario:
    """One experiment world: who moves where, who listens, and how noisy it is.

    transmitter_schedule labels the active transmitter per step (PU at its true
    position, or PUE at attacker_pos).  process_noise_std / v_max tune the
    tracker run inside the Monte Carlo harness; eval_step is the designated
    decision step (None = final step).
    """

    trajectory: Trajectory
    attacker_pos: tuple[float, float]
    anchors: tuple[AnchorNode, ...]
    dt: float
    meas_noise_std: float
    link: LinkModel
    rss_noise: NoiseModel
    transmitter_schedule: tuple[str, ...]
    process_noise_std: float = 0.2
    v_max: float = 10.0
    eval_step: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise InvalidInputError(f"dt must be > 0, got {self.dt}")
        if not self.anchors:
            raise InvalidInputError("scenario needs at least one anchor")
        if not (math.isfinite(self.meas_noise_std) and self.meas_noise_std >= 0.0):
            raise InvalidInputError("meas_noise_std must be >= 0")
        if not all(math.isfinite(c) for c in self.attacker_pos):
            raise InvalidInputError("attacker position must be finite")
        bad = [s for s in self.transmitter_schedule if s not in (PU, PUE)]
        if bad:
            raise InvalidInputError(f"invalid schedule labels {sorted(set(bad))!r}")
        if not self.transmitter_schedule:
            raise InvalidInputError("schedule must cover at least one step")
        t_last = self.trajectory.start_time + (self.n_steps - 1) * self.dt
        if t_last > self.trajectory.end_time + 1e-9:
            raise InvalidInputError(
                f"schedule spans {t_last} s but trajectory ends at {self.trajectory.end_time} s"
            )
        if self.eval_step is not None and not (0 <= self.eval_step < self.n_steps):
            raise InvalidInputError(f"eval_step {self.eval_step} out of range")
        if not (math.isfinite(self.process_noise_std) and self.process_noise_std >= 0.0):
            raise InvalidInputError("process_noise_std must be >= 0")
        if not (math.isfinite(self.v_max) and self.v_max > 0.0):
            raise InvalidInputError("v_max must be > 0")

    @property
    def n_steps(self) -> int:
        return len(self.transmitter_schedule)

    @property
    def evaluation_step(self) -> int:
        return self.n_steps - 1 if self.eval_step is None else self.eval_step

    def step_time(self, step: int) -> float:
        if not (isinstance(step, (int, np.integer)) and 0 <= step < self.n_steps):
            raise InvalidInputError(f"step {step!r} out of range [0, {self.n_steps})")
        return self.trajectory.start_time + step * self.dt


def truth_at(scenario: Scenario, step: int) -> TargetState:
    """Exact ground-truth state of the primary user at a sampling step."""
    return scenario.trajectory.state_at(scenario.step_time(step))


def emit_position_measurement(
    scenario: Scenario, step: int, rng: np.random.Generator
) -> np.ndarray:
    """True PU position plus per-axis Gaussian noise of std meas_noise_std.

    Always consumes exactly two draws from the stream, even at zero noise.
    """
    state = truth_at(scenario, step)
    return state.position + scenario.meas_noise_std * rng.standard_normal(2)


def transmitter_position(scenario: Scenario, step: int) -> np.ndarray:
    """Position of whichever transmitter the schedule makes active at `step`."""
    if scenario.transmitter_schedule[step] == PUE:
        return np.array(scenario.attacker_pos, dtype=float)
    return truth_at(scenario, step).position


def emit_rss(
    scenario: Scenario, step: int, anchor: AnchorNode, rng: np.random.Generator
) -> RssSample:
    """RSS sample at `anchor` from the scheduled transmitter."""
    tx = transmitter_position(scenario, step)
    dist = float(np.hypot(tx[0] - anchor.x, tx[1] - anchor.y))
    if dist <= 0.0:
        raise InvalidInputError(f"transmitter coincides with anchor {anchor.id!r}")
    return sample_rss(
        scenario.link, dist, scenario.rss_noise, rng,
        anchor_id=anchor.id, timestamp=scenario.step_time(step),
    )


def place_attacker_at_offset(
    trajectory: Trajectory,
    reference_step: int,
    d_pu_pue: float,
    bearing: float,
    dt: float = 1.0,
) -> tuple[float, float]:
    """Attacker position at distance d_pu_pue from the PU's true position at
    `reference_step`, along the given absolute bearing (rad)."""
    if not (math.isfinite(d_pu_pue) and d_pu_pue >= 0.0):
        raise InvalidInputError(f"d_pu_pue must be >= 0, got {d_pu_pue}")
    ref = trajectory.state_at(trajectory.start_time + reference_step * dt)
    return (ref.x + d_pu_pue * math.cos(bearing), ref.y + d_pu_pue * math.sin(bearing))


DEFAULT_SEGMENTS = (
    (50.0, 0.01, 0.02),
    (50.0, -0.02, 0.01),
    (50.0, -0.01, -0.02),
    (50.0, -0.03, -0.01),
)


def default_scenario(
    n_steps: int = 200,
    dt: float = 1.0,
    meas_noise_std: float = 5.0,
    link: LinkModel | None = None,
    rss_noise: NoiseModel | None = None,
) -> Scenario:
    """The stock experiment world: a 1000 m x 1000 m field, PU starting at
    (100, 100) at (5, 3) m/s with gentle turns, one anchor at (500, 0), and
    the attacker parked at the PU's starting position."""
    traj = Trajectory.from_segments((100.0, 100.0), (5.0, 3.0), DEFAULT_SEGMENTS)
    return Scenario(
        trajectory=traj,
        attacker_pos=(100.0, 100.0),
        anchors=(AnchorNode("a1", 500.0, 0.0),),
        dt=dt,
        meas_noise_std=meas_noise_std,
        link=link if link is not None else LinkModel(),
        rss_noise=rss_noise if rss_noise is not None else NoiseModel(0.0),
        transmitter_schedule=(PU,) * n_steps,
    )


def with_schedule_at(scenario: Scenario, step: int, label: str) -> Scenario:
    """Copy of the scenario with one step's transmitter label replaced."""
    if not 0 <= step < scenario.n_steps:
        raise InvalidInputError(f"step {step} out of range")
    sched = list(scenario.transmitter_schedule)
    sched[step] = label
    return replace(scenario, transmitter_schedule=tuple(sched))
