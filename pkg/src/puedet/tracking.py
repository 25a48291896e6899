"""Linear Kalman filter for a 2-D constant-velocity target with acceleration input.

State vector order is [x, y, vx, vy].  The filter is written as pure
functions over small immutable values; nothing here holds mutable state,
so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, NumericalDegeneracyError

# Fixed 2x4 position selector: measurements observe (x, y) only.
MEASUREMENT_MATRIX = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])

# Innovation covariance S is declared singular when |det S| < DEGENERACY_TOL * trace(S)^2.
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class TargetState:
    """Kinematic state of the tracked transmitter: position (m) and velocity (m/s)."""

    x: float
    y: float
    vx: float
    vy: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.vx, self.vy)):
            raise InvalidInputError(f"target state must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.vx, self.vy])

    @classmethod
    def from_array(cls, v) -> "TargetState":
        x, y, vx, vy = (float(c) for c in v)
        return cls(x, y, vx, vy)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class MotionModel:
    """Constant-velocity transition over a sampling interval dt, with white
    acceleration noise of variance (sigma_wx2, sigma_wy2) per axis."""

    dt: float
    sigma_wx2: float = 0.0
    sigma_wy2: float = 0.0

    def __post_init__(self):
        ok = (
            math.isfinite(self.dt)
            and self.dt >= 0.0
            and self.sigma_wx2 >= 0.0
            and self.sigma_wy2 >= 0.0
        )
        if not ok:
            raise InvalidInputError(f"invalid motion model {self}")

    def transition_matrix(self) -> np.ndarray:
        dt = self.dt
        return np.array(
            [
                [1.0, 0.0, dt, 0.0],
                [0.0, 1.0, 0.0, dt],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )

    def control_matrix(self) -> np.ndarray:
        """4x2 map from a planar acceleration to state increments."""
        dt = self.dt
        h = 0.5 * dt * dt
        return np.array([[h, 0.0], [0.0, h], [dt, 0.0], [0.0, dt]])

    def process_noise(self) -> np.ndarray:
        """Acceleration noise lifted to state space: B diag(s_wx2, s_wy2) B^T."""
        dt = self.dt
        h = 0.5 * dt * dt
        sx, sy = self.sigma_wx2, self.sigma_wy2
        return np.array(
            [
                [h * h * sx, 0.0, h * dt * sx, 0.0],
                [0.0, h * h * sy, 0.0, h * dt * sy],
                [h * dt * sx, 0.0, dt * dt * sx, 0.0],
                [0.0, h * dt * sy, 0.0, dt * dt * sy],
            ]
        )


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    """Position measurement with 2x2 noise covariance r (m^2)."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.shape != (2, 2) or not np.isfinite(r).all():
            raise InvalidInputError("measurement covariance must be a finite 2x2 matrix")
        a, b, b2, c = r[0, 0], r[0, 1], r[1, 0], r[1, 1]
        if abs(b - b2) > 1e-9 * max(1.0, abs(b)):
            raise InvalidInputError("measurement covariance must be symmetric")
        eig_min = 0.5 * (a + c) - math.hypot(0.5 * (a - c), b)
        if eig_min < -1e-9 * max(1.0, a + c):
            raise InvalidInputError("measurement covariance must be PSD")
        object.__setattr__(self, "r", r)

    @classmethod
    def isotropic(cls, std: float) -> "MeasurementModel":
        return cls(np.diag([std * std, std * std]))


@dataclass
class FilterEstimate:
    """A state estimate together with its 4x4 error covariance."""

    state: TargetState
    covariance: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.covariance, dtype=float)
        if p.shape != (4, 4) or not np.isfinite(p).all():
            raise InvalidInputError("covariance must be a finite 4x4 matrix")
        self.covariance = p


def symmetrize(p: np.ndarray) -> np.ndarray:
    return 0.5 * (p + p.T)


def is_valid_covariance(p: np.ndarray, scale_tol: float = 1e-9) -> bool:
    """Symmetric within tolerance and PSD up to -scale_tol * trace."""
    p = np.asarray(p, dtype=float)
    if not np.isfinite(p).all():
        return False
    asym = np.abs(p - p.T)
    bound = scale_tol * np.maximum(1.0, np.abs(p))
    if (asym > bound).any():
        return False
    return np.linalg.eigvalsh(symmetrize(p)).min() >= -scale_tol * max(np.trace(p), 0.0)


def predict(est: FilterEstimate, model: MotionModel, accel=(0.0, 0.0)) -> FilterEstimate:
    """Propagate the estimate through the motion model with a known acceleration input."""
    ux, uy = (float(c) for c in accel)
    if not (math.isfinite(ux) and math.isfinite(uy)):
        raise InvalidInputError(f"acceleration must be a finite 2-vector, got {accel!r}")
    s = est.state
    dt = model.dt
    half = 0.5 * dt * dt
    state = TargetState(
        s.x + dt * s.vx + half * ux,
        s.y + dt * s.vy + half * uy,
        s.vx + dt * ux,
        s.vy + dt * uy,
    )
    a = model.transition_matrix()
    p = symmetrize(a @ est.covariance @ a.T + model.process_noise())
    return FilterEstimate(state, p)


def innovation_covariance(p: np.ndarray, meas_model: MeasurementModel) -> np.ndarray:
    return p[:2, :2] + meas_model.r


def _invert_2x2(s: np.ndarray) -> np.ndarray:
    det = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
    tr = s[0, 0] + s[1, 1]
    if det == 0.0 or abs(det) < DEGENERACY_TOL * tr * tr:
        raise NumericalDegeneracyError(
            f"innovation covariance is singular (det={det:.3e}, trace={tr:.3e})"
        )
    return np.array([[s[1, 1], -s[0, 1]], [-s[1, 0], s[0, 0]]]) / det


def gain_and_updated_covariance(
    p: np.ndarray, meas_model: MeasurementModel
) -> tuple[np.ndarray, np.ndarray]:
    """Kalman gain G = P C^T S^-1 and the posterior covariance (I - G C) P.

    Shared by :func:`update` and the batched Monte Carlo engine so both
    consume identical gain values.
    """
    s_inv = _invert_2x2(innovation_covariance(p, meas_model))
    g = p[:, :2] @ s_inv
    p_new = symmetrize(p - g @ p[:2, :])
    return g, p_new


def update(est: FilterEstimate, meas_model: MeasurementModel, z) -> FilterEstimate:
    """Correct the estimate with a position measurement z (m)."""
    z = np.asarray(z, dtype=float)
    if z.shape != (2,) or not np.isfinite(z).all():
        raise InvalidInputError(f"measurement must be a finite 2-vector, got {z!r}")
    g, p_new = gain_and_updated_covariance(est.covariance, meas_model)
    x = est.state.as_array()
    x_new = x + g @ (z - x[:2])
    return FilterEstimate(TargetState.from_array(x_new), p_new)


def initial_estimate(z, meas_model: MeasurementModel, v_max: float = 10.0) -> FilterEstimate:
    """Measurement-consistent start: position from z, zero velocity, covariance
    diag(R11, R22, v_max^2, v_max^2)."""
    z = np.asarray(z, dtype=float)
    if z.shape != (2,) or not np.isfinite(z).all():
        raise InvalidInputError(f"measurement must be a finite 2-vector, got {z!r}")
    p0 = np.diag([meas_model.r[0, 0], meas_model.r[1, 1], v_max * v_max, v_max * v_max])
    return FilterEstimate(TargetState(float(z[0]), float(z[1]), 0.0, 0.0), p0)


def track(
    times: Sequence[float],
    measurements: Sequence,
    model: MotionModel,
    meas_model: MeasurementModel,
    init: FilterEstimate | None = None,
    accels: Sequence | None = None,
) -> list[FilterEstimate]:
    """Filter a timestamped measurement sequence; one estimate per measurement.

    The initial estimate is taken to be at the first measurement's time, so the
    first output is `init` itself (default: :func:`initial_estimate` from the
    first measurement).  Every later step predicts over the gap between
    consecutive timestamps and then updates.
    """
    times = [float(t) for t in times]
    if len(times) == 0:
        raise InvalidInputError("measurement sequence must be non-empty")
    if len(times) != len(measurements):
        raise InvalidInputError("times and measurements must have equal length")
    if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
        raise InvalidInputError("timestamps must be strictly increasing")
    if accels is not None and len(accels) != len(measurements):
        raise InvalidInputError("accels must have one entry per measurement")

    est = init if init is not None else initial_estimate(measurements[0], meas_model)
    out = [est]
    for k in range(1, len(times)):
        step_model = MotionModel(times[k] - times[k - 1], model.sigma_wx2, model.sigma_wy2)
        u = accels[k] if accels is not None else (0.0, 0.0)
        est = update(predict(est, step_model, u), meas_model, measurements[k])
        out.append(est)
    return out
